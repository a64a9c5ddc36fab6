#include "rpg/subst.hh"

#include <set>

namespace rpg::fol {

namespace {

struct SubstCtx {
  std::set<std::string> avoid;  // names that fresh binder renames must miss
  long counter = 0;

  std::string fresh(const std::string& base) {
    for (;;) {
      std::string cand = base + "!" + std::to_string(++counter);
      if (!avoid.count(cand)) {
        avoid.insert(cand);
        return cand;
      }
    }
  }
};

Term subst_rec(const Term& t, const Subst& sigma, SubstCtx& ctx) {
  switch (t->kind) {
    case NodeKind::Var: {
      auto it = sigma.vars.find(t->sym);
      if (it == sigma.vars.end()) return t;
      if (it->second->sort != t->sort)
        throw SortError("substitution for " + t->sym + " has sort " +
                        it->second->sort.name() + ", expected " + t->sort.name());
      return it->second;
    }
    case NodeKind::Num:
    case NodeKind::BoolC:
      return t;
    case NodeKind::UApp: {
      if (t->args.empty()) {
        auto it = sigma.uconsts.find(t->sym);
        if (it != sigma.uconsts.end()) {
          if (it->second->sort != t->sort)
            throw SortError("substitution for constant " + t->sym + " has sort " +
                            it->second->sort.name() + ", expected " + t->sort.name());
          return it->second;
        }
        return t;
      }
      std::vector<Term> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        Term na = subst_rec(a, sigma, ctx);
        changed |= (na.get() != a.get());
        args.push_back(std::move(na));
      }
      return changed ? mk_uapp(t->sym, std::move(args), t->sort) : t;
    }
    case NodeKind::App: {
      std::vector<Term> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        Term na = subst_rec(a, sigma, ctx);
        changed |= (na.get() != a.get());
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      TermNode n;
      n.kind = NodeKind::App;
      n.sort = t->sort;
      n.op = t->op;
      n.args = std::move(args);
      // rebuild through the checked path to keep hashing consistent
      switch (t->op) {
        case Op::Add: return mk_add(std::move(n.args));
        case Op::Sub: return mk_sub(n.args[0], n.args[1]);
        case Op::Neg: return mk_neg(n.args[0]);
        case Op::MulC: {
          Rat c;
          as_numeral(n.args[0], &c);
          return mk_mulc(c, n.args[1]);
        }
        case Op::DivC: {
          Rat d;
          as_numeral(n.args[1], &d);
          return mk_divc(n.args[0], d.num);
        }
        case Op::ModC: {
          Rat d;
          as_numeral(n.args[1], &d);
          return mk_modc(n.args[0], d.num);
        }
        case Op::Ite: return mk_ite(n.args[0], n.args[1], n.args[2]);
        case Op::Eq: return mk_eq(n.args[0], n.args[1]);
        case Op::Distinct: return mk_distinct(std::move(n.args));
        case Op::Le: return mk_le(n.args[0], n.args[1]);
        case Op::Lt: return mk_lt(n.args[0], n.args[1]);
        case Op::Ge: return mk_ge(n.args[0], n.args[1]);
        case Op::Gt: return mk_gt(n.args[0], n.args[1]);
        case Op::Not: return mk_not(n.args[0]);
        case Op::And: return mk_and(std::move(n.args));
        case Op::Or: return mk_or(std::move(n.args));
        case Op::Implies: return mk_implies(n.args[0], n.args[1]);
      }
      return t;
    }
    case NodeKind::Quant: {
      // drop keys shadowed by this binder
      Subst inner = sigma;
      for (const auto& b : t->binders) inner.vars.erase(b.name);
      if (inner.empty()) return t;

      // names free in any replacement value: those must not be captured
      std::set<std::string> danger;
      for (const auto& [k, v] : inner.vars)
        for (const auto& fv : free_vars(v)) danger.insert(fv.name);
      for (const auto& [k, v] : inner.uconsts)
        for (const auto& fv : free_vars(v)) danger.insert(fv.name);

      std::vector<VarDecl> binders = t->binders;
      bool renamed = false;
      for (auto& b : binders) {
        if (danger.count(b.name)) {
          std::string nn = ctx.fresh(b.name);
          inner.vars[b.name] = mk_var(nn, b.sort);
          b.name = nn;
          renamed = true;
        }
      }
      Term body = subst_rec(t->args[0], inner, ctx);
      if (!renamed && body.get() == t->args[0].get()) return t;
      return mk_quant(t->is_forall, std::move(binders), body);
    }
  }
  return t;
}

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t->kind == NodeKind::Var || t->kind == NodeKind::UApp) out.insert(t->sym);
  if (t->kind == NodeKind::Quant)
    for (const auto& b : t->binders) out.insert(b.name);
  for (const auto& a : t->args) collect_names(a, out);
}

}  // namespace

Term substitute(const Term& t, const Subst& sigma) {
  if (sigma.empty()) return t;
  SubstCtx ctx;
  collect_names(t, ctx.avoid);
  for (const auto& [k, v] : sigma.vars) {
    ctx.avoid.insert(k);
    collect_names(v, ctx.avoid);
  }
  for (const auto& [k, v] : sigma.uconsts) {
    ctx.avoid.insert(k);
    collect_names(v, ctx.avoid);
  }
  return subst_rec(t, sigma, ctx);
}

namespace {

Term replace_rec(const Term& t, const std::map<std::string, UAppRule>& rules,
                 std::set<std::string>& bound) {
  if (t->kind == NodeKind::UApp) {
    auto it = rules.find(t->sym);
    if (it != rules.end()) {
      const UAppRule& rule = it->second;
      if (rule.params.size() != t->args.size())
        throw SortError("template arity mismatch for " + t->sym);
      Subst sigma;
      std::vector<Term> args;
      for (size_t i = 0; i < t->args.size(); ++i) {
        Term a = replace_rec(t->args[i], rules, bound);
        sigma.vars[rule.params[i].name] = a;
      }
      // body free vars beyond the parameters must not collide with binders
      for (const auto& fv : free_vars(rule.body)) {
        bool is_param = false;
        for (const auto& p : rule.params) is_param |= (p.name == fv.name);
        if (!is_param && bound.count(fv.name))
          throw SortError("template for " + t->sym + " would capture " + fv.name);
      }
      return substitute(rule.body, sigma);
    }
  }
  if (t->args.empty()) return t;
  if (t->kind == NodeKind::Quant) {
    std::vector<std::string> added;
    for (const auto& b : t->binders)
      if (bound.insert(b.name).second) added.push_back(b.name);
    Term body = replace_rec(t->args[0], rules, bound);
    for (const auto& n : added) bound.erase(n);
    if (body.get() == t->args[0].get()) return t;
    return mk_quant(t->is_forall, t->binders, body);
  }
  // generic rebuild via substitute machinery: reuse subst_rec's shape by
  // rebuilding manually here
  std::vector<Term> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    Term na = replace_rec(a, rules, bound);
    changed |= (na.get() != a.get());
    args.push_back(std::move(na));
  }
  if (!changed) return t;
  if (t->kind == NodeKind::UApp) return mk_uapp(t->sym, std::move(args), t->sort);
  switch (t->op) {
    case Op::Add: return mk_add(std::move(args));
    case Op::Sub: return mk_sub(args[0], args[1]);
    case Op::Neg: return mk_neg(args[0]);
    case Op::MulC: {
      Rat c;
      as_numeral(args[0], &c);
      return mk_mulc(c, args[1]);
    }
    case Op::DivC: {
      Rat d;
      as_numeral(args[1], &d);
      return mk_divc(args[0], d.num);
    }
    case Op::ModC: {
      Rat d;
      as_numeral(args[1], &d);
      return mk_modc(args[0], d.num);
    }
    case Op::Ite: return mk_ite(args[0], args[1], args[2]);
    case Op::Eq: return mk_eq(args[0], args[1]);
    case Op::Distinct: return mk_distinct(std::move(args));
    case Op::Le: return mk_le(args[0], args[1]);
    case Op::Lt: return mk_lt(args[0], args[1]);
    case Op::Ge: return mk_ge(args[0], args[1]);
    case Op::Gt: return mk_gt(args[0], args[1]);
    case Op::Not: return mk_not(args[0]);
    case Op::And: return mk_and(std::move(args));
    case Op::Or: return mk_or(std::move(args));
    case Op::Implies: return mk_implies(args[0], args[1]);
  }
  return t;
}

}  // namespace

Term replace_uapps(const Term& t, const std::map<std::string, UAppRule>& rules) {
  if (rules.empty()) return t;
  std::set<std::string> bound;
  return replace_rec(t, rules, bound);
}

}  // namespace rpg::fol
