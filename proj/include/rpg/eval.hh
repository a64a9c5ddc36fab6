#ifndef RPG_EVAL_HH
#define RPG_EVAL_HH

// Ground evaluation of terms under concrete assignments. Quantifiers get
// bounded-domain semantics (finite enumeration over caller-supplied value
// lists); that is only a testing device, never a substitute for solver
// validity on unbounded sorts.

#include <map>
#include <optional>
#include <vector>

#include "rpg/term.hh"

namespace rpg::fol {

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& m) : std::runtime_error(m) {}
};

struct Value {
  bool is_bool = false;
  bool b = false;
  Rat r;

  static Value of_bool(bool v) { Value x; x.is_bool = true; x.b = v; return x; }
  static Value of_rat(const Rat& v) { Value x; x.r = v; return x; }
  bool operator==(const Value& o) const {
    return is_bool == o.is_bool && (is_bool ? b == o.b : r == o.r);
  }
};

using Valuation = std::map<std::string, Value>;

struct QuantDomain {
  std::vector<Rat> int_values;
  std::vector<Rat> real_values;
  bool empty() const { return int_values.empty() && real_values.empty(); }
};

// Evaluates t; vars and nullary uninterpreted constants both resolve through
// the valuation. Quantified subformulas need a nonempty domain.
Value eval_term(const Term& t, const Valuation& v,
                const QuantDomain* domain = nullptr);

bool eval_formula(const Term& t, const Valuation& v,
                  const QuantDomain* domain = nullptr);

}  // namespace rpg::fol

#endif
