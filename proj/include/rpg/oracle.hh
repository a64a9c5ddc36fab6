#ifndef RPG_ORACLE_HH
#define RPG_ORACLE_HH

// Brute-force explicit-state solving on finite restrictions of a game.
// Intentionally naive: guards and updates are evaluated pointwise on an
// enumerated grid and objectives are solved by classical finite fixpoints.
// Serves as independent ground truth for the symbolic engine.

#include <map>
#include <string>
#include <vector>

#include "rpg/eval.hh"
#include "rpg/game.hh"
#include "rpg/symdom.hh"

namespace rpg {

// finite value lists per input/program variable
struct DomainBounds {
  std::map<std::string, std::vector<fol::Rat>> values;

  // integers lo..hi
  DomainBounds& interval(const std::string& name, long long lo, long long hi);
  // real grid lo, lo+step, ..., hi; default step 1/4 keeps the usual
  // benchmark constants exactly representable
  DomainBounds& grid(const std::string& name, const fol::Rat& lo, const fol::Rat& hi,
                     const fol::Rat& step = fol::Rat(1, 4));
  bool covers(const std::string& name) const { return values.count(name) != 0; }
};

// Game finitized to the bounds. States are (location, variable values) pairs
// satisfying the location invariant, plus two absorbing artifact sinks:
//   sink_deadlock: entered when an input leaves no invariant-respecting move;
//                  there the system player is stuck, so the environment wins.
//   sink_oob: entered when the chosen move leaves the bounds; it is scored
//             against whichever player needs progress for the objective.
// succ[s][ic] lists the system's successor choices under input combo ic.
struct ExplicitGame {
  const RPGStructure* game = nullptr;
  std::vector<std::pair<int, std::vector<fol::Rat>>> states;  // (loc idx, X values)
  std::vector<std::vector<fol::Rat>> input_combos;
  std::vector<std::vector<std::vector<int>>> succ;
  int sink_deadlock = -1;
  int sink_oob = -1;
  bool partition_ok = true;   // guard partition held at every (state, input)
  std::string partition_note; // first violation, if any
  std::map<std::string, fol::Rat> max_step;  // per var, max |change| observed

  size_t state_count() const { return states.size(); }
  int state_id(int loc, const std::vector<fol::Rat>& vals) const;  // -1 if absent
  bool is_sink(int s) const { return s == sink_deadlock || s == sink_oob; }
  fol::Valuation valuation_of(int s) const;
  const std::string& location_of(int s) const;

  std::map<std::string, int> ids_;  // packed key -> id
};

// evaluates guards and updates on every in-bounds state; throws
// std::runtime_error when the state count would exceed the cap
ExplicitGame build_explicit_game(const RPGStructure& g, const DomainBounds& bounds,
                                 size_t cap = 1000000);

// exact winning partition for the objective player; win[s] covers sinks too
struct ExplicitWin {
  std::vector<char> win;
  bool wins(int s) const { return s >= 0 && s < static_cast<int>(win.size()) && win[s]; }
};

ExplicitWin solve_explicit(const ExplicitGame& eg, const Objective& obj);

// attractor of player p to an arbitrary seed set (indexed like eg.states plus
// the sinks); used to cross-check intermediate symbolic iterates, not just
// whole objectives
std::vector<char> explicit_attractor(const ExplicitGame& eg, Player p,
                                     std::vector<char> seed);

// which player must make progress (reach / revisit) for this objective
Player progress_player(const Objective& obj);

struct Mismatch {
  std::string location;
  fol::Valuation state;
  bool explicit_win = false;
  bool symbolic_win = false;
};

struct CompareReport {
  std::vector<Mismatch> mismatches;
  long compared = 0;
  long skipped_margin = 0;
  long undecided = 0;  // symbolic membership the solver could not settle
  bool ok() const { return mismatches.empty(); }
};

// Checks every enumerated state's explicit verdict against membership in the
// symbolic winning region for the objective player. States within
// margin_steps * max observed update step of a bounds edge are skipped: their
// explicit verdict can be an artifact of the finite restriction.
CompareReport compare_with_symbolic(const RPGStructure& g, const DomainBounds& bounds,
                                    const Objective& obj, const SymSet& winning,
                                    fol::Session& session, int margin_steps = 0);

}  // namespace rpg

#endif
