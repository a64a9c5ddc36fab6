#ifndef RPG_SYMDOM_HH
#define RPG_SYMDOM_HH

// Symbolic state sets: one formula over the program variables per location.
// A set's semantics at location l is the assignments satisfying both the
// formula and the location invariant, so all equivalence checks below are
// relative to the invariants.

#include <map>
#include <string>

#include "rpg/game.hh"

namespace rpg {

class SymSet {
 public:
  SymSet() = default;
  // total map over g's locations, every entry init
  SymSet(const RPGStructure& g, Term init);

  const RPGStructure& game() const;
  const Term& at(const std::string& l) const;
  void set(const std::string& l, Term phi);
  const std::map<std::string, Term>& entries() const { return vals_; }
  bool same_game(const SymSet& other) const { return game_ == other.game_; }

 private:
  const RPGStructure* game_ = nullptr;
  std::map<std::string, Term> vals_;
  void require_game(const SymSet& other) const;

  friend SymSet symset_and(const SymSet&, const SymSet&);
  friend SymSet symset_or(const SymSet&, const SymSet&);
  friend SymSet symset_not(const SymSet&);
};

SymSet symset_and(const SymSet& d1, const SymSet& d2);
SymSet symset_or(const SymSet& d1, const SymSet& d2);
SymSet symset_not(const SymSet& d);

// ⊤ at every l in ls (as Inv(l)), ⊥ elsewhere
SymSet symset_from_locations(const RPGStructure& g, const std::vector<std::string>& ls);

// the invariants themselves (the full state space)
SymSet symset_invariants(const RPGStructure& g);

// per-location validity of Inv(l) → (d1(l) ↔ d2(l)); solver unknown at any
// location makes this false
bool symset_equiv(const SymSet& d1, const SymSet& d2, Session& session);

// d1 ⊆ d2 under the invariants
bool symset_subset(const SymSet& d1, const SymSet& d2, Session& session);

// controllable predecessor: the states from which player p can force the
// next state into d no matter what the opponent does this step; per-location
// results are passed through quantifier elimination
SymSet cpre(const RPGStructure& g, Player p, const SymSet& d, Session& session);

// the raw quantified formula cpre builds for one location, before qelim;
// strategy extraction re-derives per-transition conditions from it
Term cpre_formula(const RPGStructure& g, Player p, const SymSet& d, const std::string& l);

}  // namespace rpg

#endif
