#include "rpg/oracle.hh"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rpg/simplify.hh"
#include "rpg/solver.hh"
#include "rpg/subst.hh"

namespace rpg {

using namespace fol;

DomainBounds& DomainBounds::interval(const std::string& name, long long lo, long long hi) {
  std::vector<Rat> vs;
  for (long long v = lo; v <= hi; ++v) vs.push_back(Rat(v));
  if (vs.empty()) throw std::invalid_argument("empty bounds for " + name);
  values[name] = std::move(vs);
  return *this;
}

DomainBounds& DomainBounds::grid(const std::string& name, const Rat& lo, const Rat& hi,
                                 const Rat& step) {
  if (!(Rat(0) < step)) throw std::invalid_argument("grid step must be positive");
  std::vector<Rat> vs;
  for (Rat v = lo; v <= hi; v = v + step) vs.push_back(v);
  if (vs.empty()) throw std::invalid_argument("empty bounds for " + name);
  values[name] = std::move(vs);
  return *this;
}

namespace {

std::string pack_key(int loc, const std::vector<Rat>& vals) {
  std::ostringstream os;
  os << loc;
  for (const auto& v : vals) os << '|' << v.num << '/' << v.den;
  return os.str();
}

Rat rat_abs(const Rat& r) { return r < Rat(0) ? -r : r; }

}  // namespace

int ExplicitGame::state_id(int loc, const std::vector<Rat>& vals) const {
  auto it = ids_.find(pack_key(loc, vals));
  return it == ids_.end() ? -1 : it->second;
}

Valuation ExplicitGame::valuation_of(int s) const {
  Valuation v;
  const auto& [loc, vals] = states.at(static_cast<size_t>(s));
  (void)loc;
  for (size_t i = 0; i < game->vars.size(); ++i)
    v[game->vars[i].name] = Value::of_rat(vals[i]);
  return v;
}

const std::string& ExplicitGame::location_of(int s) const {
  return game->locations.at(static_cast<size_t>(states.at(static_cast<size_t>(s)).first));
}

ExplicitGame build_explicit_game(const RPGStructure& g, const DomainBounds& bounds,
                                 size_t cap) {
  for (const auto& v : g.vars)
    if (!bounds.covers(v.name)) throw std::invalid_argument("no bounds for " + v.name);
  for (const auto& v : g.inputs)
    if (!bounds.covers(v.name)) throw std::invalid_argument("no bounds for " + v.name);

  ExplicitGame eg;
  eg.game = &g;

  // in-range test per variable
  std::map<std::string, std::set<Rat, bool (*)(const Rat&, const Rat&)>> in_range;
  auto rat_less = [](const Rat& a, const Rat& b) { return a < b; };
  for (const auto& v : g.vars) {
    std::set<Rat, bool (*)(const Rat&, const Rat&)> s(rat_less);
    for (const auto& r : bounds.values.at(v.name)) s.insert(r);
    in_range.emplace(v.name, std::move(s));
  }

  // states: every invariant-satisfying grid point, per location
  std::vector<std::vector<Rat>> grid;
  {
    std::vector<Rat> cur(g.vars.size());
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == g.vars.size()) {
        grid.push_back(cur);
        return;
      }
      for (const auto& r : bounds.values.at(g.vars[i].name)) {
        cur[i] = r;
        rec(i + 1);
      }
    };
    rec(0);
  }
  for (int li = 0; li < static_cast<int>(g.locations.size()); ++li) {
    const Term& inv = g.inv(g.locations[static_cast<size_t>(li)]);
    for (const auto& vals : grid) {
      Valuation v;
      for (size_t i = 0; i < g.vars.size(); ++i) v[g.vars[i].name] = Value::of_rat(vals[i]);
      if (!eval_formula(inv, v)) continue;
      if (eg.states.size() >= cap) throw std::runtime_error("explicit state cap exceeded");
      eg.ids_[pack_key(li, vals)] = static_cast<int>(eg.states.size());
      eg.states.emplace_back(li, vals);
    }
  }
  eg.sink_deadlock = static_cast<int>(eg.states.size());
  eg.sink_oob = eg.sink_deadlock + 1;

  // input combos (a single empty combo when the game has no inputs)
  {
    std::vector<Rat> cur(g.inputs.size());
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == g.inputs.size()) {
        eg.input_combos.push_back(cur);
        return;
      }
      for (const auto& r : bounds.values.at(g.inputs[i].name)) {
        cur[i] = r;
        rec(i + 1);
      }
    };
    rec(0);
  }

  for (const auto& v : g.vars) eg.max_step[v.name] = Rat(0);

  // successor options per (state, input combo)
  size_t n_real = eg.states.size();
  eg.succ.resize(n_real + 2);
  std::map<std::string, std::vector<const Transition*>> by_loc;
  for (const auto& t : g.transitions) by_loc[t.source].push_back(&t);

  for (size_t s = 0; s < n_real; ++s) {
    const auto& [li, vals] = eg.states[s];
    const std::string& lname = g.locations[static_cast<size_t>(li)];
    eg.succ[s].resize(eg.input_combos.size());
    for (size_t ic = 0; ic < eg.input_combos.size(); ++ic) {
      Valuation v;
      for (size_t i = 0; i < g.vars.size(); ++i) v[g.vars[i].name] = Value::of_rat(vals[i]);
      for (size_t i = 0; i < g.inputs.size(); ++i)
        v[g.inputs[i].name] = Value::of_rat(eg.input_combos[ic][i]);

      // enabled transitions, with the pointwise guard-partition check
      std::vector<const Transition*> enabled;
      for (const Transition* t : by_loc[lname])
        if (eval_formula(t->guard, v)) enabled.push_back(t);
      if (eg.partition_ok) {
        bool bad = enabled.empty();
        for (size_t a = 0; !bad && a + 1 < enabled.size(); ++a)
          for (size_t b = a + 1; !bad && b < enabled.size(); ++b)
            if (!term_eq(enabled[a]->guard, enabled[b]->guard)) bad = true;
        if (bad) {
          eg.partition_ok = false;
          std::ostringstream os;
          os << (enabled.empty() ? "no guard enabled" : "distinct guards enabled")
             << " at " << lname << " state " << pack_key(li, vals) << " input combo " << ic;
          eg.partition_note = os.str();
        }
      }

      std::vector<int>& options = eg.succ[s][ic];
      for (const Transition* t : enabled) {
        int tli = -1;
        for (int j = 0; j < static_cast<int>(g.locations.size()); ++j)
          if (g.locations[static_cast<size_t>(j)] == t->target) tli = j;
        std::vector<Rat> nxt(g.vars.size());
        for (size_t i = 0; i < g.vars.size(); ++i) {
          auto it = t->update.find(g.vars[i].name);
          nxt[i] = it == t->update.end() ? vals[i] : eval_term(it->second, v).r;
        }
        Valuation nv;
        for (size_t i = 0; i < g.vars.size(); ++i)
          nv[g.vars[i].name] = Value::of_rat(nxt[i]);
        // a successor violating the target invariant is not a move at all
        if (!eval_formula(g.inv(t->target), nv)) continue;
        bool oob = false;
        for (size_t i = 0; i < g.vars.size(); ++i)
          if (!in_range.at(g.vars[i].name).count(nxt[i])) oob = true;
        int id;
        if (oob) {
          id = eg.sink_oob;
        } else {
          id = eg.state_id(tli, nxt);
          if (id < 0) continue;  // unreachable: in-bounds and invariant-checked
          for (size_t i = 0; i < g.vars.size(); ++i) {
            Rat d = rat_abs(nxt[i] - vals[i]);
            if (eg.max_step[g.vars[i].name] < d) eg.max_step[g.vars[i].name] = d;
          }
        }
        if (std::find(options.begin(), options.end(), id) == options.end())
          options.push_back(id);
      }
      if (options.empty()) options.push_back(eg.sink_deadlock);
    }
  }
  // sinks absorb under every input
  for (int s : {eg.sink_deadlock, eg.sink_oob})
    eg.succ[static_cast<size_t>(s)].assign(eg.input_combos.size(), {s});
  return eg;
}

Player progress_player(const Objective& obj) {
  switch (obj.kind) {
    case ObjectiveKind::Reach:
    case ObjectiveKind::Buchi:
      return obj.player;
    case ObjectiveKind::Safety:
    case ObjectiveKind::CoBuchi:
      return opponent(obj.player);
  }
  return obj.player;
}

namespace {

using Bits = std::vector<char>;

// states from which mover p forces the next state into w in one step:
// the system needs a winning option for every input, the environment one
// input whose every option wins (a deadlocked input has no options, which
// stops the system and lets the environment choose it vacuously)
Bits force(const ExplicitGame& eg, Player p, const Bits& w) {
  size_t n = eg.succ.size();
  Bits out(n, 0);
  for (size_t s = 0; s < n; ++s) {
    bool got;
    if (p == Player::Sys) {
      got = true;
      for (const auto& options : eg.succ[s]) {
        bool some = false;
        for (int t : options) some = some || w[static_cast<size_t>(t)];
        if (!some) { got = false; break; }
      }
    } else {
      got = false;
      for (const auto& options : eg.succ[s]) {
        bool all = true;
        for (int t : options) all = all && w[static_cast<size_t>(t)];
        if (all) { got = true; break; }
      }
    }
    out[s] = got ? 1 : 0;
  }
  return out;
}

Bits attractor(const ExplicitGame& eg, Player p, Bits a) {
  for (;;) {
    Bits f = force(eg, p, a);
    bool changed = false;
    for (size_t s = 0; s < a.size(); ++s)
      if (f[s] && !a[s]) { a[s] = 1; changed = true; }
    if (!changed) return a;
  }
}

Bits complement(const Bits& a) {
  Bits out(a.size());
  for (size_t s = 0; s < a.size(); ++s) out[s] = a[s] ? 0 : 1;
  return out;
}

// winning set of player p for "visit f-states infinitely often":
// repeatedly peel off the opponent's escape region
Bits buchi_win(const ExplicitGame& eg, Player p, Bits f) {
  size_t n = eg.succ.size();
  Bits w_opp(n, 0);
  for (;;) {
    Bits a = attractor(eg, p, f);
    Bits esc = attractor(eg, opponent(p), complement(force(eg, p, a)));
    Bits f_next = f;
    bool shrunk = false;
    for (size_t s = 0; s < n; ++s)
      if (f_next[s] && esc[s]) { f_next[s] = 0; shrunk = true; }
    w_opp = esc;
    if (!shrunk) return complement(w_opp);
    f = f_next;
  }
}

}  // namespace

std::vector<char> explicit_attractor(const ExplicitGame& eg, Player p,
                                     std::vector<char> seed) {
  seed.resize(eg.succ.size(), 0);
  return attractor(eg, p, std::move(seed));
}

ExplicitWin solve_explicit(const ExplicitGame& eg, const Objective& obj) {
  size_t n = eg.succ.size();
  const RPGStructure& g = *eg.game;
  Player prog = progress_player(obj);

  // objective set by location, with the artifact sinks scored per policy:
  // the deadlock sink favors the environment, the bounds sink whoever does
  // not need progress
  Bits in_set(n, 0);
  for (size_t s = 0; s < eg.states.size(); ++s) {
    const std::string& l = g.locations[static_cast<size_t>(eg.states[s].first)];
    bool member = std::find(obj.locations.begin(), obj.locations.end(), l) !=
                  obj.locations.end();
    in_set[s] = member ? 1 : 0;
  }
  in_set[static_cast<size_t>(eg.sink_deadlock)] = obj.player == Player::Env ? 1 : 0;
  in_set[static_cast<size_t>(eg.sink_oob)] = obj.player != prog ? 1 : 0;

  ExplicitWin out;
  switch (obj.kind) {
    case ObjectiveKind::Reach:
      out.win = attractor(eg, obj.player, in_set);
      break;
    case ObjectiveKind::Safety: {
      Bits reach_bad = attractor(eg, opponent(obj.player), complement(in_set));
      out.win = complement(reach_bad);
      break;
    }
    case ObjectiveKind::Buchi:
      out.win = buchi_win(eg, obj.player, in_set);
      break;
    case ObjectiveKind::CoBuchi: {
      // opponent pursues "infinitely often outside the set"
      Bits opp = buchi_win(eg, opponent(obj.player), complement(in_set));
      out.win = complement(opp);
      break;
    }
  }
  return out;
}

CompareReport compare_with_symbolic(const RPGStructure& g, const DomainBounds& bounds,
                                    const Objective& obj, const SymSet& winning,
                                    Session& session, int margin_steps) {
  ExplicitGame eg = build_explicit_game(g, bounds);
  ExplicitWin ew = solve_explicit(eg, obj);
  CompareReport rep;

  // margin: skip states near a bounds edge that finite truncation can distort
  std::map<std::string, std::pair<Rat, Rat>> keep;
  for (const auto& v : g.vars) {
    const auto& vs = bounds.values.at(v.name);
    Rat lo = vs.front(), hi = vs.back();
    for (const auto& r : vs) {
      if (r < lo) lo = r;
      if (hi < r) hi = r;
    }
    Rat m = eg.max_step[v.name] * Rat(margin_steps);
    keep[v.name] = {lo + m, hi - m};
  }

  for (size_t s = 0; s < eg.states.size(); ++s) {
    Valuation v = eg.valuation_of(static_cast<int>(s));
    bool inside = true;
    for (const auto& var : g.vars) {
      const Rat& r = v[var.name].r;
      if (r < keep[var.name].first || keep[var.name].second < r) inside = false;
    }
    if (!inside) {
      rep.skipped_margin++;
      continue;
    }
    const std::string& l = eg.location_of(static_cast<int>(s));
    Term w = winning.at(l);
    Subst sub;
    for (const auto& var : g.vars) sub.vars[var.name] = mk_num(v[var.name].r, var.sort);
    Term inst = simplify(substitute(w, sub));
    bool member;
    if (is_true(inst)) {
      member = true;
    } else if (is_false(inst)) {
      member = false;
    } else {
      auto r = session.check_valid(inst);
      if (r.status == TriBool::Unknown) {
        rep.undecided++;
        continue;
      }
      member = r.status == TriBool::True;
    }
    rep.compared++;
    if (member != ew.wins(static_cast<int>(s))) {
      Mismatch m;
      m.location = l;
      m.state = v;
      m.explicit_win = ew.wins(static_cast<int>(s));
      m.symbolic_win = member;
      rep.mismatches.push_back(std::move(m));
    }
  }
  return rep;
}

}  // namespace rpg
