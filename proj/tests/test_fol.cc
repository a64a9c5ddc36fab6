#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rpg/eval.hh"
#include "rpg/fresh.hh"
#include "rpg/parse.hh"
#include "rpg/simplify.hh"
#include "rpg/solver.hh"
#include "rpg/subst.hh"
#include "rpg/term.hh"
#include "testutil.hh"

using namespace rpg::fol;
using rpgtest::enumerate_assignments;
using rpgtest::shared_session;
using rpgtest::solver_says_equiv;
using rpgtest::solver_says_valid;

namespace {
const VarDecl X{"x", int_sort()};
const VarDecl Y{"y", int_sort()};
const VarDecl I{"i", int_sort()};

Term parse_int_formula(const std::string& s) {
  SymbolTable t;
  t.add_var("x", int_sort());
  t.add_var("y", int_sort());
  t.add_var("i", int_sort());
  return parse_term_string(s, t);
}
}  // namespace

TEST_CASE("substitution replaces free occurrences simultaneously") {
  // (x <= 42)[x -> x + i]
  Term phi = mk_le(mk_var(X), mk_int(42));
  Term repl = mk_add({mk_var(X), mk_var(I)});
  Term got = substitute(phi, Subst::of_var("x", repl));
  CHECK(term_eq(got, mk_le(repl, mk_int(42))));

  // simultaneity: x -> y, y -> x swaps rather than chains
  Term both = mk_lt(mk_var(X), mk_var(Y));
  Subst swap;
  swap.vars["x"] = mk_var(Y);
  swap.vars["y"] = mk_var(X);
  CHECK(term_eq(substitute(both, swap), mk_lt(mk_var(Y), mk_var(X))));
}

TEST_CASE("empty substitution is the identity") {
  Term phi = parse_int_formula("(and (<= x 42) (or (= i 0) (< y x)))");
  CHECK(substitute(phi, Subst{}).get() == phi.get());
}

TEST_CASE("substitution avoids capture by renaming bound variables") {
  // (forall x. x <= y)[y -> x] must NOT become forall x. x <= x
  Term phi = mk_forall({X}, mk_le(mk_var(X), mk_var(Y)));
  Term got = substitute(phi, Subst::of_var("y", mk_var(X)));
  REQUIRE(got->kind == NodeKind::Quant);
  CHECK(got->binders.size() == 1);
  CHECK(got->binders[0].name != "x");

  // cross-check semantically on the bounded domain {-1,0,1}: the result must
  // behave like "x is an upper bound of the whole domain", evaluated with the
  // oracle evaluator, and differ from the captured (always-true) reading
  QuantDomain dom;
  dom.int_values = {Rat(-1), Rat(0), Rat(1)};
  int mismatches = 0;
  enumerate_assignments({X}, dom.int_values, [&](const Valuation& v) {
    bool expected = true;  // forall z in dom: z <= x
    for (const auto& z : dom.int_values)
      expected &= (z <= v.at("x").r);
    bool actual = eval_formula(got, v, &dom);
    if (expected != actual) mismatches++;
  });
  CHECK(mismatches == 0);
}

TEST_CASE("substitution rejects ill-sorted replacements") {
  Term phi = mk_le(mk_var(X), mk_int(1));
  Subst bad;
  bad.vars["x"] = tt();
  CHECK_THROWS_AS(substitute(phi, bad), SortError);
}

TEST_CASE("quantify computes free variables correctly") {
  // forall i. (x <= 42 or i = 0 or x+i <= 42 or x-i <= 42) is free exactly in x
  Term body = parse_int_formula(
      "(or (<= x 42) (= i 0) (<= (+ x i) 42) (<= (- x i) 42))");
  Term q = mk_forall({I}, body);
  auto fv = free_vars(q);
  REQUIRE(fv.size() == 1);
  CHECK(fv.begin()->name == "x");

  // empty binder set is the identity
  CHECK(mk_forall({}, body).get() == body.get());
}

TEST_CASE("existential over Int upper bound is a tautology") {
  // exists x. x > y
  Term q = mk_exists({X}, mk_gt(mk_var(X), mk_var(Y)));
  CHECK(solver_says_valid(q));
}

TEST_CASE("check_valid matches the paper's attractor simplification") {
  Term iterate = mk_forall({I}, parse_int_formula(
      "(or (<= x 42) (= i 0) (<= (+ x i) 42) (<= (- x i) 42))"));
  Term simple = parse_int_formula("(<= x 43)");
  CHECK(solver_says_equiv(simple, iterate));
}

TEST_CASE("check_valid basics and counter-models") {
  CHECK(shared_session().check_valid(tt()).status == TriBool::True);
  auto inval = shared_session().check_valid(ff());
  CHECK(inval.status == TriBool::False);

  // x < 5 and x > 3 -> x = 4 over Int; enumeration confirms
  Term f = parse_int_formula("(=> (and (< x 5) (> x 3)) (= x 4))");
  CHECK(solver_says_valid(f));
  for (long long xv = 0; xv <= 8; ++xv) {
    Valuation v{{"x", Value::of_rat(Rat(xv))}};
    CHECK(eval_formula(f, v));
  }

  // over Real the same shape is invalid; x = 3.5 is a witness
  VarDecl xr{"xr", real_sort()};
  Term fr = mk_implies(mk_and(mk_lt(mk_var(xr), mk_num(Rat(5), real_sort())),
                              mk_gt(mk_var(xr), mk_num(Rat(3), real_sort()))),
                       mk_eq(mk_var(xr), mk_num(Rat(4), real_sort())));
  auto res = shared_session().check_valid(fr);
  REQUIRE(res.status == TriBool::False);
  REQUIRE(res.counter.has_value());
  Term w = res.counter->value("xr");
  REQUIRE(w != nullptr);
  Rat wr;
  REQUIRE(as_numeral(w, &wr));
  Valuation v{{"xr", Value::of_rat(wr)}};
  CHECK_FALSE(eval_formula(fr, v));
  // and the canonical witness indeed falsifies it
  Valuation vhalf{{"xr", Value::of_rat(Rat(7, 2))}};
  CHECK_FALSE(eval_formula(fr, vhalf));
}

TEST_CASE("check_sat_model returns usable assignments") {
  // d - 1 <= 42 and d >= 40: sat, witness in [40, 43]
  VarDecl d{"d", int_sort()};
  Term f = mk_and(mk_le(mk_sub(mk_var(d), mk_int(1)), mk_int(42)),
                  mk_ge(mk_var(d), mk_int(40)));
  auto r = shared_session().check_sat_model(f);
  REQUIRE(r.status == TriBool::True);
  REQUIRE(r.model.has_value());
  Term val = r.model->value("d");
  REQUIRE(val != nullptr);
  Rat dv;
  REQUIRE(as_numeral(val, &dv));
  Valuation v{{"d", Value::of_rat(dv)}};
  CHECK(eval_formula(f, v));
  CHECK(Rat(40) <= dv);
  CHECK(dv <= Rat(43));

  CHECK(shared_session().check_sat_model(ff()).status == TriBool::False);
}

TEST_CASE("check_sat_model solves for uninterpreted predicates") {
  // exists interpretation of p with (forall x. p(x) -> x <= 42) and p(0)
  VarDecl x{"x", int_sort()};
  Term px = mk_uapp("p", {mk_var(x)}, bool_sort());
  Term f = mk_and(mk_forall({x}, mk_implies(px, mk_le(mk_var(x), mk_int(42)))),
                  mk_uapp("p", {mk_int(0)}, bool_sort()));
  auto r = shared_session().check_sat_model(f);
  CHECK(r.status == TriBool::True);
}

TEST_CASE("qelim_simplify eliminates the paper's universal input quantifier") {
  Term iterate = mk_forall({I}, parse_int_formula(
      "(or (<= x 42) (= i 0) (<= (+ x i) 42) (<= (- x i) 42))"));
  auto q = shared_session().qelim_simplify(iterate);
  CHECK(q.quantifier_free);
  CHECK(solver_says_equiv(q.formula, parse_int_formula("(<= x 43)")));
}

TEST_CASE("qelim_simplify on quantifier-free input stays quantifier-free") {
  Term f = parse_int_formula("(and (<= x 10) (or (= y 1) (> x y)))");
  auto q = shared_session().qelim_simplify(f);
  CHECK(q.quantifier_free);
  CHECK(solver_says_equiv(q.formula, f));
}

TEST_CASE("qelim_simplify eliminates existentials") {
  VarDecl d{"d", int_sort()};
  Term f = mk_exists({d}, mk_and(mk_le(mk_var(X), mk_var(d)),
                                 mk_le(mk_var(d), mk_int(10))));
  auto q = shared_session().qelim_simplify(f);
  CHECK(q.quantifier_free);
  CHECK(solver_says_equiv(q.formula, mk_le(mk_var(X), mk_int(10))));
}

TEST_CASE("substitution is compositional on random formulas") {
  rpgtest::Rng rng(20260819);
  std::vector<VarDecl> vars{X, Y};
  for (int k = 0; k < 12; ++k) {
    Term phi = rpgtest::random_formula(rng, vars, 2);
    // sigma1: x -> x + 1, sigma2: y -> x - 2 (domains disjoint from ranges'
    // introduced structure, keys distinct)
    Subst s1 = Subst::of_var("x", mk_add({mk_var(X), mk_int(1)}));
    Subst s2 = Subst::of_var("y", mk_sub(mk_var(X), mk_int(2)));
    Term lhs = substitute(substitute(phi, s1), s2);
    // composed: x -> (x+1)[s2] = x+1, y -> x-2
    Subst comp;
    comp.vars["x"] = substitute(mk_add({mk_var(X), mk_int(1)}), s2);
    comp.vars["y"] = mk_sub(mk_var(X), mk_int(2));
    Term rhs = substitute(phi, comp);
    CHECK(solver_says_equiv(lhs, rhs));
  }
}

TEST_CASE("valid formulas have unsatisfiable negations") {
  rpgtest::Rng rng(77);
  std::vector<VarDecl> vars{X, Y};
  int checked = 0;
  for (int k = 0; k < 20; ++k) {
    Term phi = rpgtest::random_formula(rng, vars, 2);
    auto v = shared_session().check_valid(phi);
    if (v.status != TriBool::True) continue;
    auto s = shared_session().check_sat_model(mk_not(phi));
    CHECK(s.status == TriBool::False);
    checked++;
  }
  // tautologies are rare in random draws; force one through to keep the
  // property exercised even on unlucky seeds
  Term taut = mk_or(mk_le(mk_var(X), mk_var(Y)), mk_gt(mk_var(X), mk_var(Y)));
  CHECK(shared_session().check_valid(taut).status == TriBool::True);
  CHECK(shared_session().check_sat_model(mk_not(taut)).status == TriBool::False);
}

TEST_CASE("qelim output is equivalent to input on random quantified formulas") {
  rpgtest::Rng rng(4242);
  std::vector<VarDecl> vars{X, Y, I};
  int decided = 0;
  for (int k = 0; k < 10; ++k) {
    Term body = rpgtest::random_formula(rng, vars, 2);
    Term q = rng.flip() ? mk_forall({I}, body) : mk_exists({I}, body);
    auto r = shared_session().qelim_simplify(q);
    TriBool eq = rpgtest::solver_equiv_status(r.formula, q);
    CHECK(eq != TriBool::False);
    if (eq != TriBool::Unknown) decided++;
  }
  // unknowns are load-dependent skips, but most draws must actually decide
  CHECK(decided >= 6);
}

TEST_CASE("fresh symbols never collide within a run") {
  FreshSymbolSource fresh;
  fresh.reserve("x");
  fresh.reserve("y");
  std::set<std::string> seen{"x", "y"};
  for (int k = 0; k < 500; ++k) {
    std::string n = fresh.fresh(k % 2 ? "x" : "tmp");
    CHECK(seen.insert(n).second);
  }
}

TEST_CASE("simplify preserves semantics on random formulas") {
  rpgtest::Rng rng(991);
  std::vector<VarDecl> vars{X, Y};
  std::vector<Rat> dom{Rat(-2), Rat(-1), Rat(0), Rat(1), Rat(2)};
  for (int k = 0; k < 60; ++k) {
    Term phi = rpgtest::random_formula(rng, vars, 3);
    Term s = simplify(phi);
    enumerate_assignments(vars, dom, [&](const Valuation& v) {
      CHECK(eval_formula(phi, v) == eval_formula(s, v));
    });
  }
}

TEST_CASE("printer and parser round-trip") {
  SymbolTable t;
  t.add_var("x", int_sort());
  t.add_var("y", int_sort());
  t.add_func({"st", {int_sort(), int_sort()}, bool_sort()});
  rpgtest::Rng rng(5150);
  std::vector<VarDecl> vars{X, Y};
  for (int k = 0; k < 40; ++k) {
    Term phi = rpgtest::random_formula(rng, vars, 3);
    Term back = parse_term_string(print_term(phi), t);
    CHECK(term_eq(phi, back));
  }
  // uninterpreted applications and quantifiers round-trip too
  Term f = mk_forall({I}, mk_or(mk_uapp("st", {mk_var(X), mk_add({mk_var(X), mk_var(I)})},
                                        bool_sort()),
                                mk_eq(mk_var(I), mk_int(0))));
  SymbolTable t2 = t;
  t2.add_var("i", int_sort());
  CHECK(term_eq(f, parse_term_string(print_term(f), t2)));
}

TEST_CASE("rationals and reals print and parse exactly") {
  SymbolTable t;
  t.add_var("r", real_sort());
  Term half = mk_num(Rat(1, 2), real_sort());
  Term e = mk_eq(mk_mulc(Rat(1, 2), mk_var("r", real_sort())), half);
  Term back = parse_term_string(print_term(e), t);
  CHECK(term_eq(e, back));
  CHECK(Rat::from_decimal_string("0.5") == Rat(1, 2));
  CHECK(Rat::from_decimal_string("-1.25") == Rat(-5, 4));
  CHECK(Rat::euclid_div(-7, 2) == -4);
  CHECK(Rat::euclid_mod(-7, 2) == 1);
}
