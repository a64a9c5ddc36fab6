#ifndef RPG_TESTS_TESTUTIL_HH
#define RPG_TESTS_TESTUTIL_HH

// Shared helpers for the test suites: a deterministic RNG, random linear
// formula generation over a fixed variable pool, and small-domain
// enumeration used to cross-check symbolic operations by brute force.

#include <functional>
#include <random>
#include <vector>

#include "rpg/eval.hh"
#include "rpg/solver.hh"
#include "rpg/term.hh"

namespace rpgtest {

using namespace rpg::fol;

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  long long pick(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(gen);
  }
  bool flip() { return pick(0, 1) == 1; }
  template <typename T>
  const T& among(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(pick(0, static_cast<long long>(xs.size()) - 1))];
  }
};

// random linear term over vars, coefficients in [-2,2], constant in [-8,8];
// the numeric sort follows the variables (Int when the pool is empty)
inline Term random_linear_term(Rng& rng, const std::vector<VarDecl>& vars) {
  Sort s = vars.empty() ? int_sort() : vars[0].sort;
  std::vector<Term> parts;
  for (const auto& v : vars) {
    long long c = rng.pick(-2, 2);
    if (c == 0) continue;
    Term t = mk_var(v);
    if (c != 1) t = mk_mulc(Rat(c), t);
    parts.push_back(t);
  }
  parts.push_back(mk_num(Rat(rng.pick(-8, 8)), s));
  return mk_add(std::move(parts));
}

inline Term random_atom(Rng& rng, const std::vector<VarDecl>& vars) {
  Term a = random_linear_term(rng, vars);
  Term b = random_linear_term(rng, vars);
  switch (rng.pick(0, 4)) {
    case 0: return mk_le(a, b);
    case 1: return mk_lt(a, b);
    case 2: return mk_ge(a, b);
    case 3: return mk_gt(a, b);
    default: return mk_eq(a, b);
  }
}

inline Term random_formula(Rng& rng, const std::vector<VarDecl>& vars, int depth) {
  if (depth <= 0 || rng.pick(0, 3) == 0) return random_atom(rng, vars);
  switch (rng.pick(0, 3)) {
    case 0:
      return mk_and(random_formula(rng, vars, depth - 1),
                    random_formula(rng, vars, depth - 1));
    case 1:
      return mk_or(random_formula(rng, vars, depth - 1),
                   random_formula(rng, vars, depth - 1));
    case 2:
      return mk_not(random_formula(rng, vars, depth - 1));
    default:
      return mk_implies(random_formula(rng, vars, depth - 1),
                        random_formula(rng, vars, depth - 1));
  }
}

// enumerates all assignments of values to vars, calling fn with each
inline void enumerate_assignments(const std::vector<VarDecl>& vars,
                                  const std::vector<Rat>& values,
                                  const std::function<void(const Valuation&)>& fn) {
  Valuation v;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == vars.size()) {
      fn(v);
      return;
    }
    for (const auto& val : values) {
      v[vars[i].name] = Value::of_rat(val);
      rec(i + 1);
    }
  };
  rec(0);
}

// one solver session per test binary (a logical phase)
inline Session& shared_session() {
  static Session s;
  return s;
}

inline bool solver_says_valid(const Term& t) {
  auto r = shared_session().check_valid(t);
  return r.status == TriBool::True;
}

inline bool solver_says_equiv(const Term& a, const Term& b) {
  return solver_says_valid(mk_iff(a, b));
}

// tri-state equivalence for property tests: the wasm solver's soft timeout is
// wall-clock, so heavier queries can come back unknown under load; callers
// treat False as a refutation and Unknown as a skip
inline TriBool solver_equiv_status(const Term& a, const Term& b, int timeout_ms = 20000) {
  return shared_session().check_valid(mk_iff(a, b), timeout_ms).status;
}

}  // namespace rpgtest

#endif
