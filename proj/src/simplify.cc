#include "rpg/simplify.hh"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace rpg::fol {

namespace {

// structural key for duplicate detection inside one and/or node
struct TermKey {
  Term t;
  bool operator==(const TermKey& o) const { return term_eq(t, o.t); }
};
struct TermKeyHash {
  size_t operator()(const TermKey& k) const { return k.t->hash; }
};

bool is_neg_of(const Term& a, const Term& b) {
  if (a->kind == NodeKind::App && a->op == Op::Not) return term_eq(a->args[0], b);
  if (b->kind == NodeKind::App && b->op == Op::Not) return term_eq(b->args[0], a);
  return false;
}

Term simp(const Term& t);

Term simp_bool_nary(Op op, std::vector<Term> in) {
  const bool conj = (op == Op::And);
  std::vector<Term> out;
  std::unordered_set<TermKey, TermKeyHash> seen;
  for (auto& raw : in) {
    Term a = raw;
    if (conj ? is_true(a) : is_false(a)) continue;
    if (conj ? is_false(a) : is_true(a)) return conj ? ff() : tt();
    // flatten same-op children
    if (a->kind == NodeKind::App && a->op == op) {
      for (const auto& c : a->args) {
        if (conj ? is_true(c) : is_false(c)) continue;
        if (conj ? is_false(c) : is_true(c)) return conj ? ff() : tt();
        if (seen.insert({c}).second) out.push_back(c);
      }
      continue;
    }
    if (seen.insert({a}).second) out.push_back(a);
  }
  // complementary pair scan (quadratic, bounded to keep cost sane)
  if (out.size() <= 32) {
    for (size_t i = 0; i < out.size(); ++i)
      for (size_t j = i + 1; j < out.size(); ++j)
        if (is_neg_of(out[i], out[j])) return conj ? ff() : tt();
  }
  if (out.empty()) return conj ? tt() : ff();
  if (out.size() == 1) return out[0];
  return conj ? mk_and(std::move(out)) : mk_or(std::move(out));
}

Term simp_add(std::vector<Term> in, Sort s) {
  std::vector<Term> out;
  Rat c(0);
  for (const auto& a : in) {
    if (a->kind == NodeKind::App && a->op == Op::Add) {
      for (const auto& b : a->args) {
        Rat r;
        if (as_numeral(b, &r)) c = c + r;
        else out.push_back(b);
      }
      continue;
    }
    Rat r;
    if (as_numeral(a, &r)) c = c + r;
    else out.push_back(a);
  }
  if (out.empty()) return mk_num(c, s);
  if (!c.is_zero()) out.push_back(mk_num(c, s));
  if (out.size() == 1) return out[0];
  return mk_add(std::move(out));
}

bool rat_cmp(Op op, const Rat& a, const Rat& b) {
  switch (op) {
    case Op::Le: return a <= b;
    case Op::Lt: return a < b;
    case Op::Ge: return b <= a;
    case Op::Gt: return b < a;
    default: return false;
  }
}

Term simp(const Term& t) {
  switch (t->kind) {
    case NodeKind::Var:
    case NodeKind::Num:
    case NodeKind::BoolC:
      return t;
    case NodeKind::UApp: {
      if (t->args.empty()) return t;
      std::vector<Term> args;
      for (const auto& a : t->args) args.push_back(simp(a));
      return mk_uapp(t->sym, std::move(args), t->sort);
    }
    case NodeKind::Quant: {
      Term body = simp(t->args[0]);
      if (is_true(body) || is_false(body)) return body;
      auto fv = free_vars(body);
      std::vector<VarDecl> keep;
      for (const auto& b : t->binders)
        if (fv.count(b)) keep.push_back(b);
      if (keep.empty()) return body;
      return mk_quant(t->is_forall, std::move(keep), body);
    }
    case NodeKind::App:
      break;
  }

  std::vector<Term> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(simp(a));

  switch (t->op) {
    case Op::And:
    case Op::Or:
      return simp_bool_nary(t->op, std::move(args));
    case Op::Not: {
      const Term& a = args[0];
      if (is_true(a)) return ff();
      if (is_false(a)) return tt();
      if (a->kind == NodeKind::App && a->op == Op::Not) return a->args[0];
      return mk_not(a);
    }
    case Op::Implies: {
      const Term &a = args[0], &b = args[1];
      if (is_true(a)) return b;
      if (is_false(a) || is_true(b)) return tt();
      if (is_false(b)) return simp(mk_not(a));
      if (term_eq(a, b)) return tt();
      return mk_implies(a, b);
    }
    case Op::Ite: {
      const Term &c = args[0], &x = args[1], &y = args[2];
      if (is_true(c)) return x;
      if (is_false(c)) return y;
      if (term_eq(x, y)) return x;
      if (x->sort == bool_sort()) {
        if (is_true(x) && is_false(y)) return c;
        if (is_false(x) && is_true(y)) return simp(mk_not(c));
      }
      return mk_ite(c, x, y);
    }
    case Op::Eq: {
      const Term &a = args[0], &b = args[1];
      if (term_eq(a, b)) return tt();
      Rat ra, rb;
      if (as_numeral(a, &ra) && as_numeral(b, &rb)) return mk_bool(ra == rb);
      if (a->sort == bool_sort()) {
        if (is_true(a)) return b;
        if (is_true(b)) return a;
        if (is_false(a)) return simp(mk_not(b));
        if (is_false(b)) return simp(mk_not(a));
      }
      return mk_eq(a, b);
    }
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt: {
      const Term &a = args[0], &b = args[1];
      Rat ra, rb;
      if (as_numeral(a, &ra) && as_numeral(b, &rb)) return mk_bool(rat_cmp(t->op, ra, rb));
      if (term_eq(a, b)) return mk_bool(t->op == Op::Le || t->op == Op::Ge);
      switch (t->op) {
        case Op::Le: return mk_le(a, b);
        case Op::Lt: return mk_lt(a, b);
        case Op::Ge: return mk_ge(a, b);
        default: return mk_gt(a, b);
      }
    }
    case Op::Add:
      return simp_add(std::move(args), t->sort);
    case Op::Sub: {
      const Term &a = args[0], &b = args[1];
      Rat ra, rb;
      bool ca = as_numeral(a, &ra), cb = as_numeral(b, &rb);
      if (ca && cb) return mk_num(ra - rb, t->sort);
      if (cb && rb.is_zero()) return a;
      if (term_eq(a, b)) return mk_num(Rat(0), t->sort);
      return mk_sub(a, b);
    }
    case Op::Neg: {
      Rat r;
      if (as_numeral(args[0], &r)) return mk_num(-r, t->sort);
      if (args[0]->kind == NodeKind::App && args[0]->op == Op::Neg) return args[0]->args[0];
      return mk_neg(args[0]);
    }
    case Op::MulC: {
      Rat c;
      as_numeral(args[0], &c);
      const Term& x = args[1];
      if (c.is_zero()) return mk_num(Rat(0), t->sort);
      if (c == Rat(1)) return x;
      Rat rx;
      if (as_numeral(x, &rx)) return mk_num(c * rx, t->sort);
      if (x->kind == NodeKind::App && x->op == Op::MulC) {
        Rat c2;
        as_numeral(x->args[0], &c2);
        return simp(mk_mulc(c * c2, x->args[1]));
      }
      return mk_mulc(c, x);
    }
    case Op::DivC: {
      Rat a, d;
      as_numeral(args[1], &d);
      if (as_numeral(args[0], &a))
        return mk_int(Rat::euclid_div(a.num, d.num));
      if (d == Rat(1)) return args[0];
      return mk_divc(args[0], d.num);
    }
    case Op::ModC: {
      Rat a, d;
      as_numeral(args[1], &d);
      if (as_numeral(args[0], &a))
        return mk_int(Rat::euclid_mod(a.num, d.num));
      if (d == Rat(1)) return mk_int(0);
      return mk_modc(args[0], d.num);
    }
    case Op::Distinct: {
      bool all_const = true;
      for (const auto& a : args) {
        Rat r;
        if (!as_numeral(a, &r) && a->kind != NodeKind::BoolC) { all_const = false; break; }
      }
      for (size_t i = 0; i < args.size(); ++i)
        for (size_t j = i + 1; j < args.size(); ++j)
          if (term_eq(args[i], args[j])) return ff();
      if (all_const) return tt();  // pairwise distinct constants
      return mk_distinct(std::move(args));
    }
  }
  return t;
}

}  // namespace

Term simplify(const Term& t) { return simp(t); }

}  // namespace rpg::fol
