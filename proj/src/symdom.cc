#include "rpg/symdom.hh"

#include <stdexcept>

#include "rpg/simplify.hh"

namespace rpg {

using namespace fol;

SymSet::SymSet(const RPGStructure& g, Term init) : game_(&g) {
  for (const auto& l : g.locations) vals_[l] = init;
}

const RPGStructure& SymSet::game() const {
  if (!game_) throw std::logic_error("empty SymSet");
  return *game_;
}

const Term& SymSet::at(const std::string& l) const {
  auto it = vals_.find(l);
  if (it == vals_.end()) throw std::out_of_range("SymSet: unknown location " + l);
  return it->second;
}

void SymSet::set(const std::string& l, Term phi) {
  if (!vals_.count(l)) throw std::out_of_range("SymSet: unknown location " + l);
  vals_[l] = std::move(phi);
}

void SymSet::require_game(const SymSet& other) const {
  if (game_ != other.game_)
    throw std::logic_error("SymSet operation across different games");
}

SymSet symset_and(const SymSet& d1, const SymSet& d2) {
  d1.require_game(d2);
  SymSet r(d1.game(), ff());
  for (const auto& [l, phi] : d1.vals_) r.vals_[l] = simplify(mk_and(phi, d2.at(l)));
  return r;
}

SymSet symset_or(const SymSet& d1, const SymSet& d2) {
  d1.require_game(d2);
  SymSet r(d1.game(), ff());
  for (const auto& [l, phi] : d1.vals_) r.vals_[l] = simplify(mk_or(phi, d2.at(l)));
  return r;
}

SymSet symset_not(const SymSet& d) {
  SymSet r(d.game(), ff());
  for (const auto& [l, phi] : d.vals_) r.vals_[l] = simplify(mk_not(phi));
  return r;
}

SymSet symset_from_locations(const RPGStructure& g, const std::vector<std::string>& ls) {
  SymSet r(g, ff());
  for (const auto& l : ls) r.set(l, g.inv(l));
  return r;
}

SymSet symset_invariants(const RPGStructure& g) {
  SymSet r(g, ff());
  for (const auto& l : g.locations) r.set(l, g.inv(l));
  return r;
}

bool symset_equiv(const SymSet& d1, const SymSet& d2, Session& session) {
  if (!d1.same_game(d2)) throw std::logic_error("SymSet equivalence across different games");
  // one query per location so a counterexample names the offending location
  for (const auto& l : d1.game().locations) {
    Term goal = mk_implies(d1.game().inv(l), mk_iff(d1.at(l), d2.at(l)));
    if (!session.is_valid(goal)) return false;
  }
  return true;
}

bool symset_subset(const SymSet& d1, const SymSet& d2, Session& session) {
  if (!d1.same_game(d2)) throw std::logic_error("SymSet subset across different games");
  for (const auto& l : d1.game().locations) {
    Term goal = mk_implies(mk_and(d1.game().inv(l), d1.at(l)), d2.at(l));
    if (!session.is_valid(goal)) return false;
  }
  return true;
}

}  // namespace rpg
