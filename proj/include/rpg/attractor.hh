#ifndef RPG_ATTRACTOR_HH
#define RPG_ATTRACTOR_HH

// Symbolic attractor computation: the plain enforceable-predecessor
// iteration and the accelerated variant that conjectures loop summaries
// when the iteration keeps changing the same location. Acceleration works
// on a loop game (the split copy produced by loop_game), collects a
// constraint over placeholder lemma predicates, and asks the lemma module
// for concrete ranking-based lemmas that discharge it.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rpg/game.hh"
#include "rpg/lemmas.hh"
#include "rpg/solver.hh"
#include "rpg/symdom.hh"

namespace rpg {

struct AccelConfig {
  bool enabled = true;
  long max_iter = 200;         // divergence bound on the outer iteration
  long first_k = 3;            // attempt once a location changed this often
  long iter_steps_per_loc = 2; // loop-iteration budget = this * |L|
  long budget_ms_per_k2 = 200; // instantiation solver budget = this * k^2
  int max_template_level = 4;
  bool collect_covers = true;  // build strategy covers for extraction
  int cover_limit = 8;
};

// Per-location change counters driving when and where to accelerate.
// k counts iterations that changed the location; the first attempt happens
// at first_k, later ones whenever k has grown past the last attempt.
struct AccelHeuristics {
  long first_k = 3;
  std::map<std::string, long> k;
  std::map<std::string, long> last_attempt;

  void note_changes(const std::vector<std::string>& locs);
  void attempted(const std::string& l);
  bool eligible(const std::string& l) const;
  // max-k eligible location, declaration order breaking ties; "" if none
  std::string pick(const RPGStructure& g) const;

  int template_level(const std::string& l, int max_level) const;
  long budget_ms(const std::string& l, long per_k2) const;
  int depth_bound(const std::string& l) const;  // 1 + k/2 nested levels
};

struct AccelRecord;

// Mutable state threaded through one acceleration attempt.
struct AccelCtx {
  fol::Session& session;
  fol::FreshSymbolSource& fresh;
  const AccelConfig& cfg;
  int depth = 1;
  int depth_bound = 1;
  int template_level = 1;
  long budget_ms = 0;          // 0: derive from config defaults
  long iter_max_steps = 0;     // 0: iter_steps_per_loc * |L|
  bool allow_nested = true;
};

// Everything one acceleration attempt produced. Kept for extraction and
// diagnostics; loop-game formulas mention the e!* start-state constants.
struct AccelRecord {
  std::string location;
  int depth = 1;
  bool success = false;
  long at_iteration = -1;      // outer iteration the result was added at

  LemmaSymbolTriple syms;
  std::shared_ptr<const RPGStructure> loop;
  std::string l_end;
  std::vector<std::pair<std::string, std::string>> e_of_x;  // var -> e const

  struct IterStep {
    enum Kind { CPre, Nested } kind = CPre;
    SymSet after;              // loop-game iterate after this step
    std::string loc;           // Nested: accelerated location
    int child = -1;            // Nested: index into children
  };
  std::vector<IterStep> steps;
  std::vector<std::shared_ptr<AccelRecord>> children;

  fol::Term psi;               // collected constraint (closed)
  fol::Term phi;               // symbolic conclusion c(X) /\ Inv(l)
  std::map<std::string, fol::Term> d_before;  // attractor iterate at attempt

  TemplateMapping tau;
  fol::Term meta_formula;      // exists Meta. ranges /\ psi[tau] /\ phi[tau]
  fol::Term region;            // its (attempted) quantifier-free equivalent
  bool qe_ok = false;
  SkolemCover cover;
  std::string note;            // failure reason, empty on success
};

struct AttractorResult {
  bool fixpoint = false;
  SymSet result;
  std::vector<SymSet> chain;   // a^0 .. a^n, acceleration folded in
  long iterations = 0;         // index of the returned iterate
  long equiv_checks = 0;
  long accel_attempts = 0;
  std::vector<std::shared_ptr<AccelRecord>> records;  // every attempt

  long accelerations() const {
    long n = 0;
    for (const auto& r : records) n += r->success ? 1 : 0;
    return n;
  }
};

// Plain attractor iteration: a^0 = false, a^1 = d,
// a^{n+1} = a^n \/ CPre(a^n), stopping at the first proven fixpoint or
// after max_iter iterations (fixpoint = false in the result).
AttractorResult attractor(const RPGStructure& g, Player p, const SymSet& d,
                          fol::Session& session, long max_iter = 200);

// Accelerated attractor: same iteration, but when a location keeps
// changing, a loop summary is conjectured and its instantiation is added
// to the current iterate before the next CPre step.
AttractorResult attractor_acc(const RPGStructure& g, Player p, const SymSet& d,
                              fol::Session& session,
                              const AccelConfig& cfg = AccelConfig());

// One acceleration attempt at location l against iterate d: builds the
// loop game, runs the bounded loop iteration (iter_a), and returns the
// constraint psi (closed) plus the symbolic conclusion phi over X.
std::pair<fol::Term, fol::Term> acc_a(const RPGStructure& g, Player p,
                                      const std::string& l, const SymSet& d,
                                      AccelCtx& ctx, AccelRecord& rec);

// Bounded attractor iteration inside a loop game. Accumulates nested
// acceleration constraints into psi; returns the final constraint and
// iterate. d must live on g_loop.
std::pair<fol::Term, SymSet> iter_a(const RPGStructure& g_loop, Player p,
                                    fol::Term psi, SymSet d, AccelCtx& ctx,
                                    AccelRecord& rec);

// Discharges the placeholder predicates in (psi, phi) by ranking-function
// templates: builds the meta formula, eliminates the metas, and returns
// the union of all conclusions of valid instantiations (false when no
// instantiation exists or the solver gives up). Fills rec.tau, rec.region,
// rec.cover.
fol::Term instantiate_lemmas(const fol::Term& psi, const fol::Term& phi,
                             AccelCtx& ctx, AccelRecord& rec);

}  // namespace rpg

#endif
