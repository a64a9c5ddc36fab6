#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rpg/eval.hh"
#include "rpg/game.hh"
#include "rpg/simplify.hh"
#include "rpg/symdom.hh"
#include "testgames.hh"
#include "testutil.hh"

using namespace rpg;
using namespace rpg::fol;
using rpgtest::shared_session;

namespace {

Term parse_in(const RPGStructure& g, const std::string& s) {
  SymbolTable t = g.symbols();
  return parse_term_string(s, t);
}

SymSet random_set(rpgtest::Rng& rng, const RPGStructure& g) {
  SymSet d(g, ff());
  for (const auto& l : g.locations) d.set(l, rpgtest::random_formula(rng, g.vars, 2));
  return d;
}

}  // namespace

TEST_CASE("sets are total over locations and reject strangers") {
  RPGStructure g = rpgtest::make_fig1();
  SymSet d(g, ff());
  CHECK(is_false(d.at("l0")));
  CHECK(is_false(d.at("lG")));
  CHECK_THROWS(d.at("lX"));
  CHECK_THROWS(d.set("lX", tt()));
  RPGStructure h = rpgtest::make_fig9();
  SymSet e(h, tt());
  CHECK_THROWS((void)symset_and(d, e));
}

TEST_CASE("boolean structure") {
  RPGStructure g = rpgtest::make_fig1();
  Term phi = parse_in(g, "(<= x 42)");
  SymSet d(g, ff());
  d.set("l0", phi);

  SymSet dn = symset_not(d);
  CHECK(rpgtest::solver_says_equiv(dn.at("l0"), parse_in(g, "(> x 42)")));
  CHECK(is_true(simplify(dn.at("lG"))));

  // absorption: d or (d and top) = d
  SymSet top(g, tt());
  SymSet back = symset_or(d, symset_and(d, top));
  for (const auto& l : g.locations)
    CHECK(rpgtest::solver_says_equiv(back.at(l), d.at(l)));
}

TEST_CASE("conjunction is intersection, pointwise over a finite domain") {
  RPGStructure g = rpgtest::make_fig1();
  rpgtest::Rng rng(90210);
  std::vector<Rat> domain;
  for (int v = -3; v <= 3; ++v) domain.push_back(Rat(v));
  for (int round = 0; round < 12; ++round) {
    SymSet d1 = random_set(rng, g);
    SymSet d2 = random_set(rng, g);
    SymSet both = symset_and(d1, d2);
    SymSet either = symset_or(d1, d2);
    for (const auto& l : g.locations) {
      rpgtest::enumerate_assignments(g.vars, domain, [&](const Valuation& v) {
        bool a = eval_formula(d1.at(l), v);
        bool b = eval_formula(d2.at(l), v);
        CHECK(eval_formula(both.at(l), v) == (a && b));
        CHECK(eval_formula(either.at(l), v) == (a || b));
        CHECK(eval_formula(symset_not(d1).at(l), v) == !a);
      });
    }
  }
}

TEST_CASE("equivalence is modulo the location invariant") {
  RPGStructure g = rpgtest::make_fig6();
  // inside l1 of the halving game: leaving [3,5] now or after one halving
  // covers everything, so the union is equivalent to the full set
  SymSet d1(g, tt());
  SymSet d2(g, tt());
  d2.set("l1", parse_in(g, "(or (or (< x 3.0) (> x 5.0)) "
                            "(and (and (>= x 3.0) (<= x 5.0)) "
                            "(or (< (* 0.5 x) 3.0) (> (* 0.5 x) 5.0))))"));
  CHECK(symset_equiv(d1, d2, shared_session()));

  SymSet e1(g, tt());
  e1.set("l1", parse_in(g, "(or (< x 3.0) (> x 5.0))"));
  CHECK(!symset_equiv(d1, e1, shared_session()));
  CHECK(symset_equiv(e1, e1, shared_session()));
  CHECK(symset_subset(e1, d1, shared_session()));
  CHECK(!symset_subset(d1, e1, shared_session()));
}

TEST_CASE("equivalence ignores states outside the invariant") {
  RPGStructure g = rpgtest::GameBuilder()
                       .theory("LIA")
                       .var("x", int_sort())
                       .loc("l", "(>= x 0)")
                       .trans("l", "true", {{"x", "(+ x 1)"}}, "l")
                       .finish();
  SymSet a(g, parse_in(g, "(>= x (- 5))"));
  SymSet b(g, parse_in(g, "(>= x 0)"));
  CHECK(symset_equiv(a, b, shared_session()));
}

TEST_CASE("sets from location lists") {
  RPGStructure g = rpgtest::make_fig1();
  SymSet d = symset_from_locations(g, {"lG"});
  CHECK(is_false(d.at("l0")));
  CHECK(is_true(d.at("lG")));

  SymSet none = symset_from_locations(g, {});
  for (const auto& l : g.locations) CHECK(is_false(none.at(l)));

  SymSet all = symset_from_locations(g, {"l0", "lG"});
  CHECK(symset_equiv(all, symset_invariants(g), shared_session()));
}

TEST_CASE("lattice laws hold up to solver equivalence") {
  RPGStructure g = rpgtest::make_fig3();
  rpgtest::Rng rng(5150);
  for (int round = 0; round < 8; ++round) {
    SymSet a = random_set(rng, g);
    SymSet b = random_set(rng, g);
    SymSet c = random_set(rng, g);
    auto eq = [&](const SymSet& u, const SymSet& v) {
      return symset_equiv(u, v, shared_session());
    };
    CHECK(eq(symset_and(a, b), symset_and(b, a)));
    CHECK(eq(symset_or(a, b), symset_or(b, a)));
    CHECK(eq(symset_and(a, symset_or(b, c)),
             symset_or(symset_and(a, b), symset_and(a, c))));
    CHECK(eq(symset_not(symset_and(a, b)),
             symset_or(symset_not(a), symset_not(b))));
    CHECK(eq(symset_or(a, symset_and(a, b)), a));
  }
}
