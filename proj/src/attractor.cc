#include "rpg/attractor.hh"

#include <algorithm>

#include "rpg/simplify.hh"

namespace rpg {

using fol::Term;
using fol::VarDecl;

namespace {

// locations where a and b differ modulo the invariant; solver unknown
// counts as changed, so a fixpoint is only ever declared on proof
std::vector<std::string> changed_locations(const RPGStructure& g,
                                           const SymSet& a, const SymSet& b,
                                           fol::Session& session) {
  std::vector<std::string> out;
  for (const auto& l : g.locations) {
    Term q = fol::simplify(
        fol::mk_implies(g.inv(l), fol::mk_iff(a.at(l), b.at(l))));
    if (fol::is_true(q)) continue;
    if (session.check_valid(q).status != fol::TriBool::True) out.push_back(l);
  }
  return out;
}

SymSet cpre_step(const RPGStructure& g, Player p, const SymSet& d,
                 fol::Session& session) {
  SymSet next = symset_or(d, cpre(g, p, d, session));
  for (const auto& l : g.locations) next.set(l, fol::simplify(next.at(l)));
  return next;
}

}  // namespace

void AccelHeuristics::note_changes(const std::vector<std::string>& locs) {
  for (const auto& l : locs) ++k[l];
}

void AccelHeuristics::attempted(const std::string& l) {
  last_attempt[l] = k.count(l) ? k.at(l) : 0;
}

bool AccelHeuristics::eligible(const std::string& l) const {
  auto it = k.find(l);
  if (it == k.end() || it->second < first_k) return false;
  auto la = last_attempt.find(l);
  return la == last_attempt.end() || it->second > la->second;
}

std::string AccelHeuristics::pick(const RPGStructure& g) const {
  std::string best;
  long best_k = -1;
  for (const auto& l : g.locations) {
    if (!eligible(l)) continue;
    long kl = k.at(l);
    if (kl > best_k) {
      best = l;
      best_k = kl;
    }
  }
  return best;
}

int AccelHeuristics::template_level(const std::string& l, int max_level) const {
  long kl = k.count(l) ? k.at(l) : first_k;
  return (int)std::max(1L, std::min((long)max_level, kl - 2));
}

long AccelHeuristics::budget_ms(const std::string& l, long per_k2) const {
  long kl = k.count(l) ? k.at(l) : first_k;
  return per_k2 * kl * kl;
}

int AccelHeuristics::depth_bound(const std::string& l) const {
  long kl = k.count(l) ? k.at(l) : first_k;
  return (int)(1 + kl / 2);
}

AttractorResult attractor(const RPGStructure& g, Player p, const SymSet& d,
                          fol::Session& session, long max_iter) {
  if (&d.game() != &g) throw fol::SortError("attractor: target on wrong game");
  AttractorResult res;
  res.chain.push_back(SymSet(g, fol::ff()));
  res.chain.push_back(d);
  for (long n = 1;; ++n) {
    ++res.equiv_checks;
    if (changed_locations(g, res.chain[n], res.chain[n - 1], session).empty()) {
      res.fixpoint = true;
      res.result = res.chain[n];
      res.iterations = n;
      return res;
    }
    if (n >= max_iter) {
      res.result = res.chain[n];
      res.iterations = n;
      return res;
    }
    res.chain.push_back(cpre_step(g, p, res.chain[n], session));
  }
}

AttractorResult attractor_acc(const RPGStructure& g, Player p, const SymSet& d,
                              fol::Session& session, const AccelConfig& cfg) {
  if (!cfg.enabled) return attractor(g, p, d, session, cfg.max_iter);
  if (&d.game() != &g) throw fol::SortError("attractor: target on wrong game");

  fol::FreshSymbolSource fresh;
  for (const auto& v : g.vars) fresh.reserve(v.name);
  for (const auto& v : g.inputs) fresh.reserve(v.name);
  for (const auto& l : g.locations) fresh.reserve(l);

  AccelHeuristics h;
  h.first_k = cfg.first_k;

  AttractorResult res;
  res.chain.push_back(SymSet(g, fol::ff()));
  res.chain.push_back(d);
  for (long n = 1;; ++n) {
    ++res.equiv_checks;
    auto changed = changed_locations(g, res.chain[n], res.chain[n - 1], session);
    h.note_changes(changed);
    if (changed.empty()) {
      res.fixpoint = true;
      res.result = res.chain[n];
      res.iterations = n;
      return res;
    }
    if (n >= cfg.max_iter) {
      res.result = res.chain[n];
      res.iterations = n;
      return res;
    }

    std::string l = h.pick(g);
    if (!l.empty()) {
      ++res.accel_attempts;
      auto rec = std::make_shared<AccelRecord>();
      AccelCtx ctx{session, fresh, cfg};
      ctx.depth = 1;
      ctx.depth_bound = h.depth_bound(l);
      ctx.template_level = h.template_level(l, cfg.max_template_level);
      ctx.budget_ms = h.budget_ms(l, cfg.budget_ms_per_k2);
      auto [psi, phi] = acc_a(g, p, l, res.chain[n], ctx, *rec);
      Term added = instantiate_lemmas(psi, phi, ctx, *rec);
      h.attempted(l);
      if (!fol::is_false(added)) {
        rec->success = true;
        rec->at_iteration = n;
        res.chain[n].set(
            l, fol::simplify(fol::mk_or(res.chain[n].at(l), added)));
      }
      res.records.push_back(rec);
    }

    res.chain.push_back(cpre_step(g, p, res.chain[n], session));
  }
}

std::pair<Term, Term> acc_a(const RPGStructure& g, Player p,
                            const std::string& l, const SymSet& d,
                            AccelCtx& ctx, AccelRecord& rec) {
  rec.location = l;
  rec.depth = ctx.depth;
  rec.syms = make_lemma_triple(g.vars, ctx.fresh);
  for (const auto& [loc, phi] : d.entries()) rec.d_before[loc] = phi;

  auto split = loop_game(g, l);
  rec.loop = std::make_shared<RPGStructure>(std::move(split.first));
  rec.l_end = split.second;

  // start-state constants: one e!x per game variable
  std::vector<Term> st_args;
  for (const auto& x : g.vars) {
    std::string e = ctx.fresh.fresh("e!" + x.name);
    rec.e_of_x.emplace_back(x.name, e);
    st_args.push_back(fol::mk_uconst(e, x.sort));
  }
  for (const auto& x : g.vars) st_args.push_back(fol::mk_var(x.name, x.sort));
  Term st_ex = fol::mk_uapp(rec.syms.st, st_args, fol::bool_sort());

  SymSet d_loop(*rec.loop, fol::ff());
  for (const auto& loc : g.locations) d_loop.set(loc, d.at(loc));
  d_loop.set(rec.l_end, st_ex);

  auto iterated = iter_a(*rec.loop, p, fol::tt(), d_loop, ctx, rec);

  // the loop ends one step before l, so reading the iterate at l under
  // e!x = x describes the states that win one full loop round
  fol::Subst e_to_x;
  for (const auto& [x, e] : rec.e_of_x) {
    for (const auto& v : g.vars)
      if (v.name == x) e_to_x.uconsts[e] = fol::mk_var(v.name, v.sort);
  }
  Term psi_rec = fol::substitute(iterated.first, e_to_x);
  Term a_l = fol::substitute(iterated.second.at(l), e_to_x);

  std::vector<Term> xs;
  for (const auto& x : g.vars) xs.push_back(fol::mk_var(x.name, x.sort));
  Term b_x = fol::mk_uapp(rec.syms.b, xs, fol::bool_sort());
  Term c_x = fol::mk_uapp(rec.syms.c, xs, fol::bool_sort());
  Term inv_l = g.inv(l);
  Term d_l = d.at(l);

  // each universal gets its own copy of X so the e!x replacement above
  // cannot touch bound positions
  auto close = [&](Term body) {
    fol::Subst rename;
    std::vector<VarDecl> copies;
    for (const auto& x : g.vars) {
      VarDecl c{ctx.fresh.fresh(x.name), x.sort};
      copies.push_back(c);
      rename.vars[x.name] = fol::mk_var(c.name, c.sort);
    }
    return fol::mk_forall(copies, fol::substitute(body, rename));
  };
  Term conj1 = close(fol::mk_implies(fol::mk_and(inv_l, b_x), d_l));
  Term conj2 = close(fol::mk_implies(
      fol::mk_and({inv_l, fol::mk_not(d_l), c_x}), fol::mk_and(psi_rec, a_l)));

  rec.psi = fol::mk_and(conj1, conj2);
  rec.phi = fol::simplify(fol::mk_and(c_x, inv_l));
  return {rec.psi, rec.phi};
}

std::pair<Term, SymSet> iter_a(const RPGStructure& g_loop, Player p,
                               Term psi, SymSet d, AccelCtx& ctx,
                               AccelRecord& rec) {
  if (&d.game() != &g_loop)
    throw fol::SortError("iter_a: iterate on wrong game");
  long max_steps = ctx.iter_max_steps > 0
                       ? ctx.iter_max_steps
                       : ctx.cfg.iter_steps_per_loc * (long)g_loop.locations.size();
  AccelHeuristics h;
  h.first_k = ctx.cfg.first_k;
  bool nested_ok = ctx.allow_nested && ctx.depth < ctx.depth_bound;

  // one enforceable-predecessor round is enough once the step predicate has
  // propagated back to the split location: the constraint then describes a
  // full loop traversal, and more rounds only bloat it
  auto split_round_done = [&]() {
    if (rec.location.empty() || !g_loop.has_location(rec.location))
      return false;
    for (const auto& f : fol::uninterpreted_symbols(d.at(rec.location)))
      if (f.name == rec.syms.st) return true;
    return false;
  };

  for (long s = 0; s < max_steps; ++s) {
    if (split_round_done()) break;
    if (nested_ok) {
      std::string l = h.pick(g_loop);
      if (!l.empty()) {
        auto child = std::make_shared<AccelRecord>();
        ++ctx.depth;
        auto [cpsi, cphi] = acc_a(g_loop, p, l, d, ctx, *child);
        --ctx.depth;
        h.attempted(l);
        psi = fol::mk_and(psi, cpsi);
        d.set(l, fol::simplify(fol::mk_or(d.at(l), cphi)));
        rec.children.push_back(child);
        AccelRecord::IterStep step;
        step.kind = AccelRecord::IterStep::Nested;
        step.after = d;
        step.loc = l;
        step.child = (int)rec.children.size() - 1;
        rec.steps.push_back(std::move(step));
        continue;
      }
    }
    SymSet next = cpre_step(g_loop, p, d, ctx.session);
    if (nested_ok)
      h.note_changes(changed_locations(g_loop, next, d, ctx.session));
    AccelRecord::IterStep step;
    step.after = next;
    rec.steps.push_back(std::move(step));
    d = next;
  }
  return {psi, d};
}

namespace {

void collect_triples(const AccelRecord& rec,
                     std::vector<LemmaSymbolTriple>* out) {
  out->push_back(rec.syms);
  for (const auto& c : rec.children) collect_triples(*c, out);
}

}  // namespace

Term instantiate_lemmas(const Term& psi, const Term& phi, AccelCtx& ctx,
                        AccelRecord& rec) {
  std::vector<LemmaSymbolTriple> triples;
  collect_triples(rec, &triples);
  try {
    rec.tau = build_templates(triples, ctx.template_level, ctx.fresh);
  } catch (const fol::SortError& e) {
    rec.note = e.what();
    return fol::ff();
  }
  rec.meta_formula = build_meta_formula(psi, phi, rec.tau);

  long budget = ctx.budget_ms > 0 ? ctx.budget_ms : 1000;
  auto sat = ctx.session.check_sat_model(rec.meta_formula, (int)budget);
  if (!sat.is_sat()) {
    rec.note = sat.is_unsat() ? "no lemma satisfies the constraint"
                              : "solver gave up on the constraint";
    return fol::ff();
  }

  auto qr = ctx.session.qelim_simplify(rec.meta_formula, (int)budget);
  rec.region = qr.formula;
  rec.qe_ok = qr.quantifier_free;

  if (ctx.cfg.collect_covers && qr.quantifier_free)
    rec.cover = cover_with_models(qr.formula, psi, phi, rec.tau, ctx.session,
                                  ctx.cfg.cover_limit);

  // on qe failure the meta formula itself is still the exact union of all
  // instantiated conclusions, just not quantifier-free
  return rec.region;
}

}  // namespace rpg
