#ifndef RPG_PARSE_HH
#define RPG_PARSE_HH

// S-expression to Term elaboration against a symbol table. Understands the
// game-file expression operators, SMT-LIB let/!/quantifiers, and the numeral
// shapes z3 prints in models and qe goals.

#include <map>
#include <string>

#include "rpg/sexpr.hh"
#include "rpg/term.hh"

namespace rpg::fol {

struct SymbolTable {
  std::map<std::string, Sort> vars;        // free variables in scope
  std::map<std::string, FuncDecl> funcs;   // uninterpreted symbols

  void add_var(const std::string& name, Sort s) { vars[name] = s; }
  void add_func(const FuncDecl& d) { funcs[d.name] = d; }
};

// expected: pass a numeric sort to coerce bare integer numerals (so "3" can
// elaborate to a Real constant in a Real context); Bool means "no hint".
Term parse_term(const SExpr& e, const SymbolTable& table,
                Sort expected = bool_sort());

Term parse_term_string(const std::string& text, const SymbolTable& table,
                       Sort expected = bool_sort());

}  // namespace rpg::fol

#endif
