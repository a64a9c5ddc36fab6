#include "rpg/parse.hh"

#include <cctype>
#include <optional>
#include <vector>

namespace rpg::fol {

namespace {

struct Elab {
  const SymbolTable& table;
  // let bindings and quantifier binders, innermost last
  std::vector<std::map<std::string, Term>> lets;
  std::vector<std::map<std::string, Sort>> binders;

  explicit Elab(const SymbolTable& t) : table(t) {}

  [[noreturn]] void err(const SExpr& e, const std::string& msg) {
    throw ParseError(msg + " in '" + e.str().substr(0, 80) + "'", e.line, e.col);
  }

  static bool is_numeral_atom(const std::string& a) {
    size_t i = 0;
    if (a.size() > 1 && (a[0] == '-' || a[0] == '+')) i = 1;
    bool digit = false, dot = false;
    for (; i < a.size(); ++i) {
      if (std::isdigit(static_cast<unsigned char>(a[i]))) { digit = true; continue; }
      if (a[i] == '.' && !dot) { dot = true; continue; }
      return false;
    }
    return digit;
  }

  Term coerce(Term t, Sort expected, const SExpr& at) {
    if (!expected.is_numeric() || t->sort == expected) return t;
    Rat r;
    if (t->sort == int_sort() && expected == real_sort() && as_numeral(t, &r))
      return mk_num(r, real_sort());
    err(at, std::string("expected sort ") + expected.name() + " but got " + t->sort.name());
  }

  // Promotes Int numeral constants to Real when siblings are Real.
  void harmonize(std::vector<Term>& args, const SExpr& at) {
    bool any_real = false;
    for (const auto& a : args) any_real |= (a->sort == real_sort());
    if (!any_real) return;
    for (auto& a : args) {
      if (a->sort == int_sort()) {
        Rat r;
        if (as_numeral(a, &r)) a = mk_num(r, real_sort());
        else err(at, "mixed Int/Real operands");
      }
    }
  }

  std::optional<Term> lookup(const std::string& name) {
    for (auto it = lets.rbegin(); it != lets.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return mk_var(name, f->second);
    }
    auto v = table.vars.find(name);
    if (v != table.vars.end()) return mk_var(name, v->second);
    auto f = table.funcs.find(name);
    if (f != table.funcs.end() && f->second.arg_sorts.empty())
      return mk_uconst(name, f->second.ret);
    return std::nullopt;
  }

  Term atom(const SExpr& e, Sort expected) {
    const std::string& a = e.atom;
    if (a == "true") return tt();
    if (a == "false") return ff();
    if (is_numeral_atom(a)) {
      Rat r = Rat::from_decimal_string(a);
      Sort s = (!r.is_integer() || expected == real_sort()) ? real_sort() : int_sort();
      return mk_num(r, s);
    }
    if (auto t = lookup(a)) return coerce(*t, expected, e);
    err(e, "unknown symbol '" + a + "'");
  }

  Term elab(const SExpr& e, Sort expected) {
    if (e.is_atom) return atom(e, expected);
    if (e.items.empty()) err(e, "empty application");

    // indexed identifier: ((_ divisible n) t)
    if (e[0].is_list()) {
      const SExpr& h = e[0];
      if (h.size() == 3 && h[0].atom == "_" && h[1].atom == "divisible") {
        Term t = elab(e[1], int_sort());
        return mk_eq(mk_modc(t, std::stoll(h[2].atom)), mk_int(0));
      }
      err(e, "unsupported application head");
    }

    const std::string& op = e[0].atom;
    auto arity = e.size() - 1;

    if (op == "let") {
      if (arity != 2 || !e[1].is_list()) err(e, "malformed let");
      std::map<std::string, Term> frame;
      for (const auto& b : e[1].items) {
        if (!b.is_list() || b.size() != 2 || !b[0].is_atom) err(e, "malformed let binding");
        frame[b[0].atom] = elab(b[1], bool_sort());
      }
      lets.push_back(std::move(frame));
      Term body = elab(e[2], expected);
      lets.pop_back();
      return body;
    }
    if (op == "forall" || op == "exists") {
      if (arity != 2 || !e[1].is_list()) err(e, "malformed quantifier");
      std::vector<VarDecl> decls;
      std::map<std::string, Sort> frame;
      for (const auto& b : e[1].items) {
        if (!b.is_list() || b.size() != 2) err(e, "malformed binder");
        Sort s = sort_from_name(b[1].atom);
        decls.push_back({b[0].atom, s});
        frame[b[0].atom] = s;
      }
      binders.push_back(std::move(frame));
      Term body = elab(e[2], bool_sort());
      binders.pop_back();
      return mk_quant(op == "forall", std::move(decls), body);
    }
    if (op == "!") {  // annotation wrapper: keep the term, drop attributes
      if (arity < 1) err(e, "malformed annotation");
      return elab(e[1], expected);
    }
    if (op == "ite") {
      if (arity != 3) err(e, "ite needs 3 arguments");
      Term c = elab(e[1], bool_sort());
      Term a = elab(e[2], expected);
      Term b = elab(e[3], expected);
      if (a->sort != b->sort) {
        std::vector<Term> branches{a, b};
        harmonize(branches, e);
        a = branches[0];
        b = branches[1];
      }
      return mk_ite(c, a, b);
    }
    if (op == "not") {
      if (arity != 1) err(e, "not needs 1 argument");
      return mk_not(elab(e[1], bool_sort()));
    }
    if (op == "and" || op == "or") {
      std::vector<Term> args;
      for (size_t i = 1; i < e.size(); ++i) args.push_back(elab(e[i], bool_sort()));
      return op == "and" ? mk_and(std::move(args)) : mk_or(std::move(args));
    }
    if (op == "=>") {
      if (arity < 2) err(e, "=> needs 2+ arguments");
      std::vector<Term> args;
      for (size_t i = 1; i < e.size(); ++i) args.push_back(elab(e[i], bool_sort()));
      Term r = args.back();  // right-associative chain
      for (size_t i = args.size() - 1; i-- > 0;) r = mk_implies(args[i], r);
      return r;
    }
    if (op == "to_real") {
      if (arity != 1) err(e, "to_real needs 1 argument");
      Term t = elab(e[1], int_sort());
      Rat r;
      if (as_numeral(t, &r)) return mk_num(r, real_sort());
      err(e, "to_real of a non-constant term is unsupported");
    }

    // numeric / polymorphic operators: elaborate children first
    std::vector<Term> args;
    Sort child_hint = (op == "+" || op == "-" || op == "*" || op == "/")
                          ? expected
                          : bool_sort();
    for (size_t i = 1; i < e.size(); ++i) args.push_back(elab(e[i], child_hint));

    if (op == "=" || op == "distinct" || op == "<=" || op == "<" || op == ">=" || op == ">") {
      if (args.size() < 2) err(e, op + " needs 2+ arguments");
      if (args[0]->sort.is_numeric() || args.size() > 2) harmonize(args, e);
      if (op == "distinct") return mk_distinct(std::move(args));
      // chain comparisons pairwise
      std::vector<Term> conj;
      for (size_t i = 0; i + 1 < args.size(); ++i) {
        Term a = args[i], b = args[i + 1];
        if (op == "=") conj.push_back(mk_eq(a, b));
        else if (op == "<=") conj.push_back(mk_le(a, b));
        else if (op == "<") conj.push_back(mk_lt(a, b));
        else if (op == ">=") conj.push_back(mk_ge(a, b));
        else conj.push_back(mk_gt(a, b));
      }
      return mk_and(std::move(conj));
    }
    if (op == "+") {
      harmonize(args, e);
      return mk_add(std::move(args));
    }
    if (op == "-") {
      harmonize(args, e);
      if (args.size() == 1) {
        Rat c;
        if (as_numeral(args[0], &c)) return mk_num(-c, args[0]->sort);
        return mk_neg(args[0]);
      }
      Term r = args[0];
      for (size_t i = 1; i < args.size(); ++i) r = mk_sub(r, args[i]);
      return r;
    }
    if (op == "*") {
      harmonize(args, e);
      if (args.size() < 2) err(e, "* needs 2+ arguments");
      // fold constants; exactly one non-constant factor may remain
      Rat c(1);
      Term sym;
      Sort s = args[0]->sort;
      for (auto& a : args) {
        Rat r;
        if (as_numeral(a, &r)) { c = c * r; continue; }
        if (sym) err(e, "nonlinear product");
        sym = a;
      }
      if (!sym) return mk_num(c, s);
      if (c == Rat(1)) return sym;
      return mk_mulc(c, sym);
    }
    if (op == "/") {
      if (args.size() != 2) err(e, "/ needs 2 arguments");
      Rat a, b;
      if (as_numeral(args[0], &a) && as_numeral(args[1], &b) && !b.is_zero())
        return mk_num(a * Rat(b.den, b.num), real_sort());
      err(e, "/ supported only on numerals");
    }
    if (op == "div" || op == "mod") {
      if (args.size() != 2) err(e, op + " needs 2 arguments");
      Rat d;
      if (!as_numeral(args[1], &d) || !d.is_integer() || d.num <= 0)
        err(e, op + " needs a positive constant divisor");
      return op == "div" ? mk_divc(args[0], d.num) : mk_modc(args[0], d.num);
    }

    // uninterpreted application
    auto f = table.funcs.find(op);
    if (f != table.funcs.end()) {
      const FuncDecl& d = f->second;
      if (args.size() != d.arg_sorts.size()) err(e, "arity mismatch for " + op);
      for (size_t i = 0; i < args.size(); ++i) args[i] = coerce(args[i], d.arg_sorts[i], e);
      return mk_uapp(op, std::move(args), d.ret);
    }
    err(e, "unknown operator '" + op + "'");
  }
};

}  // namespace

Term parse_term(const SExpr& e, const SymbolTable& table, Sort expected) {
  Elab el(table);
  return el.elab(e, expected);
}

Term parse_term_string(const std::string& text, const SymbolTable& table, Sort expected) {
  return parse_term(parse_sexpr(text), table, expected);
}

}  // namespace rpg::fol
