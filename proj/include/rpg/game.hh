#ifndef RPG_GAME_HH
#define RPG_GAME_HH

// Reactive program game structures: locations with invariants and guarded
// update transitions over input variables (environment-controlled) and
// program variables (system-controlled). Guards at a location must cover all
// assignments and be pairwise disjoint, so the environment's input choice
// fixes which guard fires and the system picks among the updates behind it.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpg/eval.hh"
#include "rpg/solver.hh"
#include "rpg/term.hh"

namespace rpg {

using fol::Session;
using fol::Term;
using fol::VarDecl;

enum class Player { Sys, Env };

inline Player opponent(Player p) { return p == Player::Sys ? Player::Env : Player::Sys; }
inline const char* player_name(Player p) { return p == Player::Sys ? "Sys" : "Env"; }

struct Transition {
  std::string source;
  Term guard;                         // quantifier-free over X ∪ I
  std::map<std::string, Term> update; // total on X after normalization
  std::string target;
};

enum class ObjectiveKind { Reach, Safety, Buchi, CoBuchi };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::Reach;
  std::vector<std::string> locations;
  Player player = Player::Sys;
};

const char* objective_kind_name(ObjectiveKind k);

struct RPGStructure {
  std::string theory;                  // "LIA" or "LRA"
  std::vector<VarDecl> inputs;         // I
  std::vector<VarDecl> vars;           // X, disjoint from I
  std::vector<std::string> locations;  // declaration order is meaningful
  std::map<std::string, Term> invariants;  // location -> formula over X
  std::vector<Transition> transitions;

  bool has_location(const std::string& l) const;
  const Term& inv(const std::string& l) const;  // throws on unknown location
  std::vector<const Transition*> out(const std::string& l) const;
  bool is_input(const std::string& name) const;
  bool is_var(const std::string& name) const;
  fol::SymbolTable symbols() const;  // X ∪ I

  // fills in identity updates for unlisted program variables and defaults
  // missing invariants to ⊤; call once after construction
  void normalize();
};

// one failed well-formedness condition; condition 0 flags syntactic issues
// (unknown locations, variables outside X ∪ I, partial updates), 1-3 are the
// semantic guard conditions, and undecided marks solver unknowns
struct Violation {
  std::string location;
  int condition = 0;  // 0 syntactic, 1 exhaustive+disjoint, 2 unique target, 3 dead end
  std::string detail;
  bool undecided = false;
  std::optional<fol::Valuation> witness;
};

std::vector<Violation> validate_structure(const RPGStructure& g, Session& session);

// applies a transition's update as simultaneous substitution into a formula
// over X
Term apply_update(const RPGStructure& g, const std::map<std::string, Term>& update,
                  const Term& phi);

// redirects every transition into l_split to a fresh copy l_end carrying the
// same invariant, and gives l_end a ⊤/identity self-loop; the returned game
// is well-formed whenever the input was
std::pair<RPGStructure, std::string> loop_game(const RPGStructure& g,
                                               const std::string& l_split);

}  // namespace rpg

#endif
