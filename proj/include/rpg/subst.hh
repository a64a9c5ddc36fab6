#ifndef RPG_SUBST_HH
#define RPG_SUBST_HH

// Simultaneous capture-avoiding substitution. Keys may be variables or
// nullary uninterpreted constants (the E-constants of acceleration);
// uninterpreted predicate applications are rewritten via UAppRule templates.

#include <map>
#include <string>

#include "rpg/term.hh"

namespace rpg::fol {

struct Subst {
  std::map<std::string, Term> vars;     // variable name -> replacement
  std::map<std::string, Term> uconsts;  // nullary uapp name -> replacement

  bool empty() const { return vars.empty() && uconsts.empty(); }
  static Subst of_var(const std::string& name, Term value) {
    Subst s;
    s.vars[name] = std::move(value);
    return s;
  }
};

Term substitute(const Term& t, const Subst& sigma);

// Rewrites sym(t1..tn) into body[params |-> ti] for every rule; the body's
// non-parameter free variables must not be captured at any occurrence
// (guaranteed when they are globally fresh meta-variables; violated input
// throws SortError).
struct UAppRule {
  std::vector<VarDecl> params;
  Term body;
};
Term replace_uapps(const Term& t, const std::map<std::string, UAppRule>& rules);

}  // namespace rpg::fol

#endif
