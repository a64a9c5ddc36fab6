#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "rpg/oracle.hh"
#include "rpg/parse.hh"
#include "testgames.hh"
#include "testutil.hh"

using namespace rpg;
using namespace rpg::fol;
using rpgtest::shared_session;

namespace {

DomainBounds fig1_bounds() {
  DomainBounds b;
  b.interval("x", 0, 50).interval("i", -2, 2);
  return b;
}

Objective reach_lG() { return Objective{ObjectiveKind::Reach, {"lG"}, Player::Sys}; }

}  // namespace

TEST_CASE("state enumeration counts invariant grid points") {
  RPGStructure g = rpgtest::make_fig1();
  ExplicitGame eg = build_explicit_game(g, fig1_bounds());
  CHECK(eg.state_count() == 102);  // 2 locations x 51 values
  CHECK(eg.input_combos.size() == 5);
  CHECK(eg.partition_ok);

  // respects invariants: x >= 0 cuts the negative grid half away
  RPGStructure h = rpgtest::GameBuilder()
                       .theory("LIA")
                       .var("x", int_sort())
                       .loc("l", "(>= x 0)")
                       .trans("l", "true", {{"x", "x"}}, "l")
                       .finish();
  DomainBounds hb;
  hb.interval("x", -10, 10);
  CHECK(build_explicit_game(h, hb).state_count() == 11);
}

TEST_CASE("state cap is enforced") {
  RPGStructure g = rpgtest::make_fig1();
  CHECK_THROWS_AS(build_explicit_game(g, fig1_bounds(), 10), std::runtime_error);
}

TEST_CASE("successors follow the evaluated updates") {
  RPGStructure g = rpgtest::make_fig1();
  ExplicitGame eg = build_explicit_game(g, fig1_bounds());
  int s45 = eg.state_id(0, {Rat(45)});
  int s44 = eg.state_id(0, {Rat(44)});
  int s46 = eg.state_id(0, {Rat(46)});
  REQUIRE(s45 >= 0);
  // input combo for i = 1
  int ic = -1;
  for (size_t k = 0; k < eg.input_combos.size(); ++k)
    if (eg.input_combos[k][0] == Rat(1)) ic = static_cast<int>(k);
  REQUIRE(ic >= 0);
  const auto& opts = eg.succ[static_cast<size_t>(s45)][static_cast<size_t>(ic)];
  // x > 42 and i != 0: the two update choices x + i and x - i
  CHECK(opts.size() == 2);
  CHECK(std::find(opts.begin(), opts.end(), s44) != opts.end());
  CHECK(std::find(opts.begin(), opts.end(), s46) != opts.end());
}

TEST_CASE("guard partition holds pointwise on the example games") {
  {
    ExplicitGame eg = build_explicit_game(rpgtest::make_fig1(), fig1_bounds());
    CHECK(eg.partition_ok);
  }
  {
    DomainBounds b;
    b.interval("x", -2, 70).interval("y", -2, 8);
    ExplicitGame eg = build_explicit_game(rpgtest::make_fig3(), b);
    CHECK(eg.partition_ok);
  }
  {
    DomainBounds b;
    b.interval("x", 0, 10);
    ExplicitGame eg = build_explicit_game(rpgtest::make_fig9(), b);
    CHECK(eg.partition_ok);
  }
  {
    // overlapping guards are caught concretely
    RPGStructure g = rpgtest::GameBuilder()
                         .theory("LIA")
                         .var("x", int_sort())
                         .loc("l")
                         .trans("l", "(>= x 0)", {}, "l")
                         .trans("l", "(<= x 0)", {}, "l")
                         .finish();
    DomainBounds b;
    b.interval("x", -3, 3);
    ExplicitGame eg = build_explicit_game(g, b);
    CHECK(!eg.partition_ok);
  }
}

TEST_CASE("bounded decrement game is winning everywhere") {
  RPGStructure g = rpgtest::make_fig1();
  ExplicitGame eg = build_explicit_game(g, fig1_bounds());
  ExplicitWin w = solve_explicit(eg, reach_lG());
  for (size_t s = 0; s < eg.state_count(); ++s) CHECK(w.wins(static_cast<int>(s)));
}

TEST_CASE("reach with every location in the target wins immediately") {
  RPGStructure g = rpgtest::make_fig9();
  DomainBounds b;
  b.interval("x", 0, 10);
  ExplicitGame eg = build_explicit_game(g, b);
  Objective obj{ObjectiveKind::Reach, {"l0", "l1", "l2", "l3"}, Player::Sys};
  ExplicitWin w = solve_explicit(eg, obj);
  for (size_t s = 0; s < eg.state_count(); ++s) CHECK(w.wins(static_cast<int>(s)));
}

TEST_CASE("environment wins the bounded buchi counterexample everywhere") {
  RPGStructure g = rpgtest::make_fig9();
  DomainBounds b;
  b.interval("x", 0, 10);
  ExplicitGame eg = build_explicit_game(g, b);
  // visiting l0 only finitely often is the environment's co-Buchi objective
  Objective env_cb{ObjectiveKind::CoBuchi, {"l1", "l2", "l3"}, Player::Env};
  ExplicitWin w = solve_explicit(eg, env_cb);
  for (size_t s = 0; s < eg.state_count(); ++s) CHECK(w.wins(static_cast<int>(s)));
  // and the system's Buchi view of the same split loses everywhere
  Objective sys_b{ObjectiveKind::Buchi, {"l0"}, Player::Sys};
  ExplicitWin wb = solve_explicit(eg, sys_b);
  for (size_t s = 0; s < eg.state_count(); ++s) CHECK(!wb.wins(static_cast<int>(s)));
}

TEST_CASE("safety and reach are dual") {
  rpgtest::Rng rng(2024);
  for (const auto& g : {rpgtest::make_fig1(), rpgtest::make_fig3(), rpgtest::make_fig9()}) {
    DomainBounds b;
    for (const auto& v : g.vars) b.interval(v.name, -4, 12);
    for (const auto& v : g.inputs) b.interval(v.name, -2, 2);
    ExplicitGame eg = build_explicit_game(g, b);
    for (int round = 0; round < 4; ++round) {
      std::vector<std::string> safe, unsafe;
      for (const auto& l : g.locations)
        (rng.flip() ? safe : unsafe).push_back(l);
      for (Player p : {Player::Sys, Player::Env}) {
        ExplicitWin ws = solve_explicit(eg, Objective{ObjectiveKind::Safety, safe, p});
        ExplicitWin wr =
            solve_explicit(eg, Objective{ObjectiveKind::Reach, unsafe, opponent(p)});
        for (size_t s = 0; s < eg.succ.size(); ++s)
          CHECK(ws.wins(static_cast<int>(s)) != wr.wins(static_cast<int>(s)));
      }
    }
  }
}

TEST_CASE("buchi and co-buchi partitions are complementary") {
  rpgtest::Rng rng(77);
  for (const auto& g : {rpgtest::make_fig1(), rpgtest::make_fig9()}) {
    DomainBounds b;
    for (const auto& v : g.vars) b.interval(v.name, 0, 14);
    for (const auto& v : g.inputs) b.interval(v.name, -2, 2);
    ExplicitGame eg = build_explicit_game(g, b);
    for (int round = 0; round < 4; ++round) {
      std::vector<std::string> acc, rest;
      for (const auto& l : g.locations)
        (rng.flip() ? acc : rest).push_back(l);
      for (Player p : {Player::Sys, Player::Env}) {
        ExplicitWin wb = solve_explicit(eg, Objective{ObjectiveKind::Buchi, acc, p});
        ExplicitWin wc =
            solve_explicit(eg, Objective{ObjectiveKind::CoBuchi, rest, opponent(p)});
        for (size_t s = 0; s < eg.succ.size(); ++s)
          CHECK(wb.wins(static_cast<int>(s)) != wc.wins(static_cast<int>(s)));
      }
    }
  }
}

TEST_CASE("explicit solving is deterministic across runs") {
  RPGStructure g = rpgtest::make_fig1();
  ExplicitGame e1 = build_explicit_game(g, fig1_bounds());
  ExplicitGame e2 = build_explicit_game(g, fig1_bounds());
  CHECK(e1.succ == e2.succ);
  ExplicitWin w1 = solve_explicit(e1, reach_lG());
  ExplicitWin w2 = solve_explicit(e2, reach_lG());
  CHECK(w1.win == w2.win);
}

TEST_CASE("symbolic comparison accepts the true region and flags a mutant") {
  RPGStructure g = rpgtest::make_fig1();
  SymSet truth(g, tt());  // acceleration result: winning everywhere
  CompareReport ok =
      compare_with_symbolic(g, fig1_bounds(), reach_lG(), truth, shared_session());
  CHECK(ok.ok());
  CHECK(ok.compared == 102);

  // drop the accelerated part, as if the fixpoint had stopped early
  SymbolTable t = g.symbols();
  SymSet mutant(g, tt());
  mutant.set("l0", parse_term_string("(<= x 42)", t));
  CompareReport bad =
      compare_with_symbolic(g, fig1_bounds(), reach_lG(), mutant, shared_session());
  CHECK(!bad.ok());
  CHECK(bad.mismatches.size() >= 1);
  for (const auto& m : bad.mismatches) {
    CHECK(m.explicit_win);
    CHECK(!m.symbolic_win);
  }
}

TEST_CASE("comparison over an empty bounded state space is vacuous") {
  RPGStructure g = rpgtest::GameBuilder()
                       .theory("LIA")
                       .var("x", int_sort())
                       .loc("l", "(>= x 0)")
                       .trans("l", "true", {{"x", "x"}}, "l")
                       .finish();
  DomainBounds b;
  b.interval("x", -9, -1);
  CompareReport rep = compare_with_symbolic(
      g, b, Objective{ObjectiveKind::Safety, {"l"}, Player::Sys}, SymSet(g, tt()),
      shared_session());
  CHECK(rep.ok());
  CHECK(rep.compared == 0);
}

TEST_CASE("margin skips the truncation shadow") {
  // pure decrement walk: from x the play x-1, x-2, ... exits [0..9] below,
  // so near the bottom edge the bounded verdict for reaching 9 is distorted
  RPGStructure g = rpgtest::GameBuilder()
                       .theory("LIA")
                       .var("x", int_sort())
                       .loc("l")
                       .loc("goal")
                       .trans("l", "(>= x 9)", {}, "goal")
                       .trans("l", "(< x 9)", {{"x", "(- x 1)"}}, "l")
                       .trans("goal", "true", {}, "goal")
                       .finish();
  DomainBounds b;
  b.interval("x", 0, 9);
  Objective obj{ObjectiveKind::Reach, {"goal"}, Player::Sys};
  SymSet w(g, tt());
  w.set("l", parse_term_string("(>= x 9)", g.symbols()));
  // at margin 0 every in-bounds decrement chain is compared and x < 9 at l
  // explicitly falls to the out-of-bounds sink, matching the symbolic region
  CompareReport r0 = compare_with_symbolic(g, b, obj, w, shared_session(), 0);
  CHECK(r0.ok());
  CHECK(r0.skipped_margin == 0);
  CompareReport r2 = compare_with_symbolic(g, b, obj, w, shared_session(), 2);
  CHECK(r2.skipped_margin > 0);
  CHECK(r2.compared < r0.compared);
}
