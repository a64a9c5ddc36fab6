#include "rpg/lemmas.hh"

#include <algorithm>
#include <functional>
#include <set>

#include "rpg/simplify.hh"

namespace rpg {

using fol::FuncDecl;
using fol::Rat;
using fol::Sort;
using fol::Subst;
using fol::Term;
using fol::UAppRule;
using fol::VarDecl;

FuncDecl LemmaSymbolTriple::b_decl() const {
  FuncDecl d;
  d.name = b;
  for (const auto& x : xs) d.arg_sorts.push_back(x.sort);
  d.ret = fol::bool_sort();
  return d;
}

FuncDecl LemmaSymbolTriple::st_decl() const {
  FuncDecl d;
  d.name = st;
  for (const auto& x : xs) d.arg_sorts.push_back(x.sort);
  for (const auto& x : xs) d.arg_sorts.push_back(x.sort);
  d.ret = fol::bool_sort();
  return d;
}

FuncDecl LemmaSymbolTriple::c_decl() const {
  FuncDecl d;
  d.name = c;
  for (const auto& x : xs) d.arg_sorts.push_back(x.sort);
  d.ret = fol::bool_sort();
  return d;
}

LemmaSymbolTriple make_lemma_triple(const std::vector<VarDecl>& xs,
                                    fol::FreshSymbolSource& fresh) {
  LemmaSymbolTriple t;
  t.b = fresh.fresh("b");
  t.st = fresh.fresh("st");
  t.c = fresh.fresh("c");
  t.xs = xs;
  return t;
}

InductivenessReport verify_step_inductiveness(const AccelerationLemma& lem,
                                              fol::Session& session) {
  if (lem.vars.size() != lem.primed.size())
    throw fol::SortError("lemma vars/primed arity mismatch");
  Subst to_primed;
  for (size_t i = 0; i < lem.vars.size(); ++i)
    to_primed.vars[lem.vars[i].name] =
        fol::mk_var(lem.primed[i].name, lem.primed[i].sort);
  Term conc_post = fol::substitute(lem.conc, to_primed);
  Term pre = fol::mk_and({lem.conc, fol::mk_not(lem.base), lem.step});
  Term query = fol::mk_implies(pre, conc_post);

  InductivenessReport rep;
  auto res = session.check_valid(fol::simplify(query));
  if (res.status == fol::TriBool::True) {
    rep.ok = true;
  } else if (res.status == fol::TriBool::False) {
    if (res.counter) rep.witness = fol::model_to_valuation(*res.counter);
  } else {
    rep.undecided = true;
  }
  return rep;
}

namespace {

// p * x for a selector meta p constrained to {-1, 0, 1}. The term language
// has no variable-by-variable product, so the three cases are spelled out.
Term signed_term(const Term& p, const Term& x) {
  Term zero = fol::mk_num(Rat(0), x->sort);
  Term one = fol::mk_num(Rat(1), p->sort);
  Term neg_one = fol::mk_num(Rat(-1), p->sort);
  return fol::mk_ite(fol::mk_eq(p, one), x,
                     fol::mk_ite(fol::mk_eq(p, neg_one), fol::mk_neg(x), zero));
}

Term in_sign_range(const Term& p) {
  Term zero = fol::mk_num(Rat(0), p->sort);
  Term one = fol::mk_num(Rat(1), p->sort);
  Term neg_one = fol::mk_num(Rat(-1), p->sort);
  return fol::mk_or({fol::mk_eq(p, neg_one), fol::mk_eq(p, zero),
                     fol::mk_eq(p, one)});
}

Term is_zero(const Term& p) {
  return fol::mk_eq(p, fol::mk_num(Rat(0), p->sort));
}

// At most `bound` of the coefficients nonzero: every (bound+1)-subset has a
// zero. Coefficient lists are short (one per game variable), so the subset
// enumeration stays tiny.
void at_most_nonzero(const std::vector<Term>& coeffs, size_t bound,
                     std::vector<Term>* out) {
  if (coeffs.size() <= bound) return;
  std::vector<size_t> idx(bound + 1, 0);
  // enumerate strictly increasing index tuples of length bound+1
  std::vector<size_t> pick;
  std::function<void(size_t)> go = [&](size_t from) {
    if (pick.size() == bound + 1) {
      std::vector<Term> any_zero;
      for (size_t i : pick) any_zero.push_back(is_zero(coeffs[i]));
      out->push_back(fol::mk_or(any_zero));
      return;
    }
    for (size_t i = from; i < coeffs.size(); ++i) {
      pick.push_back(i);
      go(i + 1);
      pick.pop_back();
    }
  };
  go(0);
}

struct LinearTemplate {
  std::vector<Term> coeffs;   // meta terms, one per numeric var
  Term combo;                 // sum of signed terms (no offset)
  Term offset;                // meta term
};

LinearTemplate make_linear(const std::vector<VarDecl>& nums, Sort meta_sort,
                           const std::string& prefix, fol::FreshSymbolSource& fresh,
                           std::vector<VarDecl>* metas,
                           std::vector<Term>* ranges) {
  LinearTemplate lt;
  std::vector<Term> parts;
  for (const auto& x : nums) {
    VarDecl p{fresh.fresh(prefix + "_" + x.name), meta_sort};
    metas->push_back(p);
    Term pv = fol::mk_var(p.name, p.sort);
    ranges->push_back(in_sign_range(pv));
    lt.coeffs.push_back(pv);
    parts.push_back(signed_term(pv, fol::mk_var(x.name, x.sort)));
  }
  lt.combo = parts.size() == 1 ? parts[0] : fol::mk_add(parts);
  VarDecl d{fresh.fresh(prefix + "_d"), meta_sort};
  metas->push_back(d);
  lt.offset = fol::mk_var(d.name, d.sort);
  return lt;
}

}  // namespace

TemplateMapping build_templates(const std::vector<LemmaSymbolTriple>& triples,
                                int level, fol::FreshSymbolSource& fresh) {
  if (level < 1) level = 1;
  TemplateMapping tau;
  std::vector<Term> all_ranges;
  for (const auto& tr : triples) {
    // rank over a single numeric sort; Int wins on mixed tuples so the
    // constraint formula stays within one arithmetic theory
    std::vector<VarDecl> nums;
    bool has_int = false;
    for (const auto& x : tr.xs)
      if (x.sort == fol::int_sort()) has_int = true;
    Sort nsort = has_int ? fol::int_sort() : fol::real_sort();
    for (const auto& x : tr.xs)
      if (x.sort == nsort && x.sort != fol::bool_sort()) nums.push_back(x);
    if (nums.empty())
      throw fol::SortError("lemma template over " + tr.st +
                           ": no numeric variable to rank on");

    TemplateEntry e;
    e.syms = tr;
    for (const auto& x : tr.xs)
      e.primed.push_back({fresh.fresh(x.name + "!next"), x.sort});

    std::vector<Term> ranges;
    LinearTemplate rank =
        make_linear(nums, nsort, "rk", fresh, &e.metas, &ranges);
    Term r = fol::mk_add({rank.combo, rank.offset});

    // invariant: `level` one-variable bounds with a direction selector,
    // plus max(0, level-2) two-variable bounds
    std::vector<Term> inv_parts;
    for (int j = 0; j < level; ++j) {
      LinearTemplate t =
          make_linear(nums, nsort, "iv", fresh, &e.metas, &ranges);
      at_most_nonzero(t.coeffs, 1, &ranges);
      VarDecl sel{fresh.fresh("sel"), nsort};
      e.metas.push_back(sel);
      Term sv = fol::mk_var(sel.name, sel.sort);
      Term one = fol::mk_num(Rat(1), nsort);
      Term two = fol::mk_num(Rat(2), nsort);
      Term three = fol::mk_num(Rat(3), nsort);
      ranges.push_back(fol::mk_or(
          {fol::mk_eq(sv, one), fol::mk_eq(sv, two), fol::mk_eq(sv, three)}));
      inv_parts.push_back(fol::mk_or(
          {fol::mk_and(fol::mk_eq(sv, one), fol::mk_le(t.combo, t.offset)),
           fol::mk_and(fol::mk_eq(sv, two), fol::mk_ge(t.combo, t.offset)),
           fol::mk_and(fol::mk_eq(sv, three), fol::mk_eq(t.combo, t.offset))}));
    }
    for (int j = 0; j + 2 < level; ++j) {
      LinearTemplate t =
          make_linear(nums, nsort, "bv", fresh, &e.metas, &ranges);
      at_most_nonzero(t.coeffs, 2, &ranges);
      inv_parts.push_back(fol::mk_le(t.combo, t.offset));
    }
    Term inv = inv_parts.empty() ? fol::tt() : fol::mk_and(inv_parts);

    Subst to_primed;
    for (size_t i = 0; i < tr.xs.size(); ++i)
      to_primed.vars[tr.xs[i].name] =
          fol::mk_var(e.primed[i].name, e.primed[i].sort);
    Term r_post = fol::substitute(r, to_primed);
    Term inv_post = fol::substitute(inv, to_primed);
    Term zero = fol::mk_num(Rat(0), nsort);
    Term eps = fol::mk_num(Rat(1), nsort);

    e.base = fol::mk_and(fol::mk_le(r, zero), inv);
    e.step = fol::mk_and(fol::mk_le(fol::mk_add({r_post, eps}), r), inv_post);
    e.conc = inv;
    e.ranges = ranges.empty() ? fol::tt() : fol::mk_and(ranges);

    all_ranges.push_back(e.ranges);
    for (const auto& m : e.metas) tau.all_metas.push_back(m);
    tau.entries.push_back(std::move(e));
  }
  tau.all_ranges = all_ranges.empty() ? fol::tt() : fol::mk_and(all_ranges);
  return tau;
}

const TemplateEntry* TemplateMapping::find(const std::string& sym) const {
  for (const auto& e : entries)
    if (e.syms.b == sym || e.syms.st == sym || e.syms.c == sym) return &e;
  return nullptr;
}

std::map<std::string, UAppRule> TemplateMapping::rules() const {
  std::map<std::string, UAppRule> r;
  for (const auto& e : entries) {
    std::vector<VarDecl> both = e.syms.xs;
    both.insert(both.end(), e.primed.begin(), e.primed.end());
    r[e.syms.b] = UAppRule{e.syms.xs, e.base};
    r[e.syms.st] = UAppRule{both, e.step};
    r[e.syms.c] = UAppRule{e.syms.xs, e.conc};
  }
  return r;
}

fol::Term build_meta_formula(const Term& psi, const Term& phi,
                             const TemplateMapping& tau) {
  auto rules = tau.rules();
  for (const auto& f : fol::uninterpreted_symbols(fol::mk_and(psi, phi))) {
    if (!f.arg_sorts.empty() && rules.find(f.name) == rules.end())
      throw fol::SortError("no template for lemma symbol " + f.name);
  }
  Term body = fol::simplify(
      fol::mk_and({tau.all_ranges, fol::replace_uapps(psi, rules),
                   fol::replace_uapps(phi, rules)}));
  if (tau.all_metas.empty()) return body;
  return fol::simplify(fol::mk_exists(tau.all_metas, body));
}

AccelerationLemma lemma_of_assignment(const TemplateEntry& entry,
                                      const MetaAssignment& m) {
  Subst sigma;
  for (const auto& mv : entry.metas) {
    auto it = m.find(mv.name);
    sigma.vars[mv.name] =
        it != m.end() ? it->second : fol::mk_num(Rat(0), mv.sort);
  }
  AccelerationLemma lem;
  lem.vars = entry.syms.xs;
  lem.primed = entry.primed;
  lem.base = fol::simplify(fol::substitute(entry.base, sigma));
  lem.step = fol::simplify(fol::substitute(entry.step, sigma));
  lem.conc = fol::simplify(fol::substitute(entry.conc, sigma));
  return lem;
}

std::map<std::string, UAppRule> lemma_rules(const TemplateMapping& tau,
                                            const MetaAssignment& m) {
  std::map<std::string, UAppRule> r;
  for (const auto& e : tau.entries) {
    AccelerationLemma lem = lemma_of_assignment(e, m);
    std::vector<VarDecl> both = lem.vars;
    both.insert(both.end(), lem.primed.begin(), lem.primed.end());
    r[e.syms.b] = UAppRule{lem.vars, lem.base};
    r[e.syms.st] = UAppRule{both, lem.step};
    r[e.syms.c] = UAppRule{lem.vars, lem.conc};
  }
  return r;
}

namespace {

MetaAssignment assignment_from_model(const TemplateMapping& tau,
                                     const fol::Model& model) {
  MetaAssignment m;
  for (const auto& mv : tau.all_metas) {
    Term v = model.has(mv.name) ? model.value(mv.name) : nullptr;
    m[mv.name] = v ? v : fol::mk_num(Rat(0), mv.sort);
  }
  return m;
}

}  // namespace

SkolemCover cover_with_models(const Term& region, const Term& psi,
                              const Term& phi, const TemplateMapping& tau,
                              fol::Session& session, int limit) {
  SkolemCover cover;
  cover.region = region;
  auto rules = tau.rules();
  Term psi_t = fol::replace_uapps(psi, rules);
  Term phi_t = fol::replace_uapps(phi, rules);

  std::set<std::string> meta_names;
  for (const auto& mv : tau.all_metas) meta_names.insert(mv.name);

  Term covered = fol::ff();
  for (int round = 0; round < limit; ++round) {
    Term gap = fol::simplify(fol::mk_and(region, fol::mk_not(covered)));
    auto pick = session.check_sat_model(gap);
    if (pick.is_unsat()) {
      cover.complete = true;
      return cover;
    }
    if (!pick.is_sat() || !pick.model) return cover;  // solver gave up

    // freeze the uncovered state, then solve for metas accepting it
    Subst at_state;
    std::vector<VarDecl> state_vars;
    for (const auto& x : fol::free_vars(fol::mk_and(gap, phi_t))) {
      if (meta_names.count(x.name)) continue;
      state_vars.push_back(x);
      Term v = pick.model->has(x.name) ? pick.model->value(x.name) : nullptr;
      at_state.vars[x.name] = v ? v : fol::mk_num(Rat(0), x.sort);
    }
    Term body = fol::simplify(fol::substitute(
        fol::mk_and({tau.all_ranges, psi_t, phi_t}), at_state));
    // greedy widening: a lemma whose guard swallows the entire remaining
    // gap finishes the cover in this round, so ask for one first
    auto sol = state_vars.empty()
                   ? fol::SatResult{}
                   : session.check_sat_model(fol::simplify(fol::mk_and(
                         body, fol::mk_forall(state_vars,
                                              fol::mk_implies(gap, phi_t)))));
    if (!sol.is_sat() || !sol.model) sol = session.check_sat_model(body);
    if (!sol.is_sat() || !sol.model) return cover;

    CoverEntry entry;
    entry.assignment = assignment_from_model(tau, *sol.model);
    auto inst = lemma_rules(tau, entry.assignment);
    entry.guard = fol::simplify(fol::replace_uapps(phi, inst));
    for (const auto& e : tau.entries)
      entry.lemmas[e.syms.st] = lemma_of_assignment(e, entry.assignment);

    // validate before trusting: the lemma must be inductive and must
    // satisfy the collected constraint
    for (const auto& [sym, lem] : entry.lemmas) {
      if (!verify_step_inductiveness(lem, session).ok) return cover;
    }
    auto ok = session.check_valid(fol::simplify(fol::replace_uapps(psi, inst)));
    if (ok.status != fol::TriBool::True) return cover;

    covered = fol::mk_or(covered, entry.guard);
    cover.entries.push_back(std::move(entry));
  }
  // out of rounds; the region may or may not be exhausted
  auto done =
      session.check_valid(fol::mk_implies(region, covered));
  cover.complete = done.status == fol::TriBool::True;
  return cover;
}

}  // namespace rpg
