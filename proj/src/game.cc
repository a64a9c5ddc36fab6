#include "rpg/game.hh"

#include <set>
#include <sstream>
#include <stdexcept>

#include "rpg/simplify.hh"
#include "rpg/subst.hh"
#include "rpg/symdom.hh"

namespace rpg {

using namespace fol;

const char* objective_kind_name(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::Reach: return "reach";
    case ObjectiveKind::Safety: return "safety";
    case ObjectiveKind::Buchi: return "buchi";
    case ObjectiveKind::CoBuchi: return "cobuchi";
  }
  return "?";
}

bool RPGStructure::has_location(const std::string& l) const {
  for (const auto& loc : locations)
    if (loc == l) return true;
  return false;
}

const Term& RPGStructure::inv(const std::string& l) const {
  auto it = invariants.find(l);
  if (it == invariants.end()) throw std::out_of_range("no invariant for location " + l);
  return it->second;
}

std::vector<const Transition*> RPGStructure::out(const std::string& l) const {
  std::vector<const Transition*> r;
  for (const auto& t : transitions)
    if (t.source == l) r.push_back(&t);
  return r;
}

bool RPGStructure::is_input(const std::string& name) const {
  for (const auto& v : inputs)
    if (v.name == name) return true;
  return false;
}

bool RPGStructure::is_var(const std::string& name) const {
  for (const auto& v : vars)
    if (v.name == name) return true;
  return false;
}

SymbolTable RPGStructure::symbols() const {
  SymbolTable t;
  for (const auto& v : inputs) t.add_var(v.name, v.sort);
  for (const auto& v : vars) t.add_var(v.name, v.sort);
  return t;
}

void RPGStructure::normalize() {
  for (const auto& l : locations)
    if (!invariants.count(l)) invariants[l] = tt();
  for (auto& t : transitions)
    for (const auto& v : vars)
      if (!t.update.count(v.name)) t.update[v.name] = mk_var(v);
}

Term apply_update(const RPGStructure& g, const std::map<std::string, Term>& update,
                  const Term& phi) {
  Subst sigma;
  for (const auto& [x, t] : update) sigma.vars[x] = t;
  (void)g;
  return substitute(phi, sigma);
}

namespace {

// free variables of t confined to the given pools?
bool vars_within(const Term& t, const RPGStructure& g, bool allow_inputs,
                 std::string* offender) {
  for (const auto& v : free_vars(t)) {
    if (g.is_var(v.name)) continue;
    if (allow_inputs && g.is_input(v.name)) continue;
    if (offender) *offender = v.name;
    return false;
  }
  return true;
}

std::string update_key(const std::map<std::string, Term>& u) {
  std::ostringstream os;
  for (const auto& [x, t] : u) os << x << ":=" << print_term(t) << ";";
  return os.str();
}

Violation syntactic(const std::string& l, std::string detail) {
  Violation v;
  v.location = l;
  v.condition = 0;
  v.detail = std::move(detail);
  return v;
}

}  // namespace

std::vector<Violation> validate_structure(const RPGStructure& g, Session& session) {
  std::vector<Violation> out;

  std::set<std::string> seen_locs;
  for (const auto& l : g.locations)
    if (!seen_locs.insert(l).second) out.push_back(syntactic(l, "duplicate location name"));
  if (g.locations.empty()) out.push_back(syntactic("", "game has no locations"));
  for (const auto& iv : g.inputs)
    if (g.is_var(iv.name))
      out.push_back(syntactic("", "variable " + iv.name + " is both input and program variable"));

  for (const auto& [l, phi] : g.invariants) {
    if (!g.has_location(l)) {
      out.push_back(syntactic(l, "invariant for unknown location"));
      continue;
    }
    std::string bad;
    if (!vars_within(phi, g, false, &bad))
      out.push_back(syntactic(l, "invariant mentions " + bad + " outside the program variables"));
    if (!uninterpreted_symbols(phi).empty())
      out.push_back(syntactic(l, "invariant contains uninterpreted symbols"));
  }

  for (const auto& t : g.transitions) {
    const std::string& l = t.source;
    if (!g.has_location(t.source)) out.push_back(syntactic(t.source, "transition from unknown location"));
    if (!g.has_location(t.target)) out.push_back(syntactic(t.source, "transition to unknown location " + t.target));
    if (contains_quantifier(t.guard)) out.push_back(syntactic(l, "guard is not quantifier-free"));
    if (!uninterpreted_symbols(t.guard).empty())
      out.push_back(syntactic(l, "guard contains uninterpreted symbols"));
    std::string bad;
    if (!vars_within(t.guard, g, true, &bad))
      out.push_back(syntactic(l, "guard mentions unknown variable " + bad));
    for (const auto& v : g.vars) {
      auto it = t.update.find(v.name);
      if (it == t.update.end()) {
        out.push_back(syntactic(l, "update not total: missing " + v.name));
        continue;
      }
      if (it->second->sort != v.sort)
        out.push_back(syntactic(l, "update for " + v.name + " has the wrong sort"));
      if (!vars_within(it->second, g, true, &bad))
        out.push_back(syntactic(l, "update term mentions unknown variable " + bad));
      if (!uninterpreted_symbols(it->second).empty())
        out.push_back(syntactic(l, "update contains uninterpreted symbols"));
    }
    for (const auto& [x, term] : t.update)
      if (!g.is_var(x)) out.push_back(syntactic(l, "update assigns unknown variable " + x));
  }
  if (!out.empty()) return out;  // semantic checks assume a sane skeleton

  for (const auto& l : g.locations) {
    auto ts = g.out(l);

    // distinct guard formulas at l, in first-seen order
    std::vector<Term> guards;
    for (const Transition* t : ts) {
      bool dup = false;
      for (const auto& gd : guards) dup = dup || term_eq(gd, t->guard);
      if (!dup) guards.push_back(t->guard);
    }

    // (1a) exhaustiveness over all assignments to X ∪ I
    {
      auto r = session.check_valid(mk_or(guards));
      if (r.status == TriBool::False) {
        Violation v;
        v.location = l;
        v.condition = 1;
        v.detail = "guards are not exhaustive";
        if (r.counter) v.witness = model_to_valuation(*r.counter);
        out.push_back(v);
      } else if (r.status == TriBool::Unknown) {
        Violation v;
        v.location = l;
        v.condition = 1;
        v.detail = "exhaustiveness undecided by the solver";
        v.undecided = true;
        out.push_back(v);
      }
    }

    // (1b) pairwise disjointness of distinct guards
    for (size_t i = 0; i < guards.size(); ++i)
      for (size_t j = i + 1; j < guards.size(); ++j) {
        auto r = session.check_sat_model(mk_and(guards[i], guards[j]));
        if (r.status == TriBool::True) {
          Violation v;
          v.location = l;
          v.condition = 1;
          v.detail = "guards overlap: " + print_term(guards[i]) + " and " + print_term(guards[j]);
          if (r.model) v.witness = model_to_valuation(*r.model);
          out.push_back(v);
        } else if (r.status == TriBool::Unknown) {
          Violation v;
          v.location = l;
          v.condition = 1;
          v.detail = "guard disjointness undecided by the solver";
          v.undecided = true;
          out.push_back(v);
        }
      }

    // (2) a (guard, update) pair fixes the target
    {
      std::map<std::string, std::string> target_of;
      for (const Transition* t : ts) {
        std::string key = print_term(t->guard) + "|" + update_key(t->update);
        auto [it, fresh] = target_of.emplace(key, t->target);
        if (!fresh && it->second != t->target) {
          Violation v;
          v.location = l;
          v.condition = 2;
          v.detail = "same guard and update lead to both " + it->second + " and " + t->target;
          out.push_back(v);
        }
      }
    }

    // (3) no dead ends: every invariant state has some enabled transition
    // whose successor satisfies the target invariant
    {
      std::vector<Term> options;
      for (const Transition* t : ts)
        options.push_back(mk_and(t->guard, apply_update(g, t->update, g.inv(t->target))));
      Term some = mk_or(std::move(options));
      if (!g.inputs.empty()) some = mk_exists(g.inputs, some);
      auto r = session.check_sat_model(mk_and(g.inv(l), mk_not(some)));
      if (r.status == TriBool::True) {
        Violation v;
        v.location = l;
        v.condition = 3;
        v.detail = "dead end: an invariant state has no enabled transition";
        if (r.model) v.witness = model_to_valuation(*r.model);
        out.push_back(v);
      } else if (r.status == TriBool::Unknown) {
        Violation v;
        v.location = l;
        v.condition = 3;
        v.detail = "dead-end check undecided by the solver";
        v.undecided = true;
        out.push_back(v);
      }
    }
  }
  return out;
}

Term cpre_formula(const RPGStructure& g, Player p, const SymSet& d, const std::string& l) {
  std::vector<Term> parts;
  for (const Transition* t : g.out(l)) {
    Term inv_after = apply_update(g, t->update, g.inv(t->target));
    Term d_after = apply_update(g, t->update, d.at(t->target));
    if (p == Player::Sys)
      parts.push_back(mk_and({t->guard, inv_after, d_after}));
    else
      parts.push_back(mk_implies(mk_and(t->guard, inv_after), d_after));
  }
  Term body = p == Player::Sys ? mk_or(std::move(parts)) : mk_and(std::move(parts));
  if (!g.inputs.empty())
    body = p == Player::Sys ? mk_forall(g.inputs, body) : mk_exists(g.inputs, body);
  return mk_and(g.inv(l), body);
}

SymSet cpre(const RPGStructure& g, Player p, const SymSet& d, Session& session) {
  if (&d.game() != &g) throw std::logic_error("cpre: SymSet belongs to a different game");
  SymSet r(g, ff());
  for (const auto& l : g.locations)
    r.set(l, session.qelim_simplify(cpre_formula(g, p, d, l)).formula);
  return r;
}

std::pair<RPGStructure, std::string> loop_game(const RPGStructure& g,
                                               const std::string& l_split) {
  if (!g.has_location(l_split)) throw std::logic_error("loop_game: unknown location " + l_split);
  std::string l_end;
  for (int n = 0;; ++n) {
    l_end = l_split + "$end" + std::to_string(n);
    if (!g.has_location(l_end)) break;
  }
  RPGStructure h = g;
  h.locations.push_back(l_end);
  h.invariants[l_end] = g.inv(l_split);
  for (auto& t : h.transitions)
    if (t.target == l_split) t.target = l_end;
  Transition stay;
  stay.source = l_end;
  stay.guard = tt();
  stay.target = l_end;
  h.transitions.push_back(stay);
  h.normalize();  // fills the identity update of the new self-loop
  return {std::move(h), std::move(l_end)};
}

}  // namespace rpg
