#include "rpg/term.hh"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rpg::fol {

Sort sort_from_name(const std::string& name) {
  if (name == "Bool" || name == "bool") return bool_sort();
  if (name == "Int" || name == "int") return int_sort();
  if (name == "Real" || name == "real") return real_sort();
  throw SortError("unknown sort: " + name);
}

static long long safe_ll(__int128 v, const char* what) {
  if (v > INT64_MAX / 2 || v < INT64_MIN / 2)
    throw std::overflow_error(std::string("rational overflow in ") + what);
  return static_cast<long long>(v);
}

Rat::Rat(long long n, long long d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) { n = -n; d = -d; }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

Rat Rat::from_decimal_string(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rat(std::stoll(s));
  std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
  bool neg = !ip.empty() && ip[0] == '-';
  if (neg) ip = ip.substr(1);
  if (ip.empty()) ip = "0";
  long long den = 1;
  for (size_t k = 0; k < fp.size(); ++k) den = safe_ll(__int128(den) * 10, "decimal");
  long long num = safe_ll(__int128(std::stoll(ip)) * den + (fp.empty() ? 0 : std::stoll(fp)), "decimal");
  return Rat(neg ? -num : num, den);
}

bool Rat::operator<(const Rat& o) const {
  return __int128(num) * o.den < __int128(o.num) * den;
}
Rat Rat::operator+(const Rat& o) const {
  return Rat(safe_ll(__int128(num) * o.den + __int128(o.num) * den, "+"),
             safe_ll(__int128(den) * o.den, "+"));
}
Rat Rat::operator-(const Rat& o) const { return *this + (-o); }
Rat Rat::operator*(const Rat& o) const {
  return Rat(safe_ll(__int128(num) * o.num, "*"), safe_ll(__int128(den) * o.den, "*"));
}
Rat Rat::operator-() const { Rat r; r.num = -num; r.den = den; return r; }

long long Rat::euclid_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  if (r < 0) q += (b > 0 ? -1 : 1);
  return q;
}
long long Rat::euclid_mod(long long a, long long b) {
  long long r = a % b;
  if (r < 0) r += (b > 0 ? b : -b);
  return r;
}

std::string Rat::str() const {
  std::ostringstream os;
  os << num;
  if (den != 1) os << "/" << den;
  return os.str();
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Neg: return "-";
    case Op::MulC: return "*";
    case Op::DivC: return "div";
    case Op::ModC: return "mod";
    case Op::Ite: return "ite";
    case Op::Eq: return "=";
    case Op::Distinct: return "distinct";
    case Op::Le: return "<=";
    case Op::Lt: return "<";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
  }
  return "?";
}

static size_t hash_mix(size_t a, size_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

static size_t compute_hash(const TermNode& n) {
  size_t h = hash_mix(static_cast<size_t>(n.kind),
                      hash_mix(static_cast<size_t>(n.sort.kind), 0x51ed2701));
  switch (n.kind) {
    case NodeKind::Var:
    case NodeKind::UApp:
      h = hash_mix(h, std::hash<std::string>()(n.sym));
      break;
    case NodeKind::Num:
      h = hash_mix(h, hash_mix(std::hash<long long>()(n.num.num),
                               std::hash<long long>()(n.num.den)));
      break;
    case NodeKind::BoolC:
      h = hash_mix(h, n.bval ? 7 : 3);
      break;
    case NodeKind::App:
      h = hash_mix(h, static_cast<size_t>(n.op));
      break;
    case NodeKind::Quant:
      h = hash_mix(h, n.is_forall ? 11 : 13);
      for (const auto& b : n.binders)
        h = hash_mix(h, hash_mix(std::hash<std::string>()(b.name),
                                 static_cast<size_t>(b.sort.kind)));
      break;
  }
  for (const auto& a : n.args) h = hash_mix(h, a->hash);
  return h;
}

static Term finish(TermNode n) {
  n.hash = compute_hash(n);
  return std::make_shared<const TermNode>(std::move(n));
}

static void require(bool ok, const std::string& msg) {
  if (!ok) throw SortError(msg);
}

static void require_numeric_same(const Term& a, const Term& b, const char* op) {
  require(a->sort.is_numeric() && a->sort == b->sort,
          std::string("operator ") + op + " needs matching numeric sorts, got " +
              a->sort.name() + " and " + b->sort.name());
}

Term mk_var(const std::string& name, Sort s) {
  TermNode n;
  n.kind = NodeKind::Var;
  n.sort = s;
  n.sym = name;
  return finish(std::move(n));
}
Term mk_var(const VarDecl& v) { return mk_var(v.name, v.sort); }

Term mk_int(long long v) {
  TermNode n;
  n.kind = NodeKind::Num;
  n.sort = int_sort();
  n.num = Rat(v);
  return finish(std::move(n));
}

Term mk_num(const Rat& r, Sort s) {
  require(s.is_numeric(), "numeral of non-numeric sort");
  require(s.kind != SortKind::Int || r.is_integer(), "non-integral Int numeral");
  TermNode n;
  n.kind = NodeKind::Num;
  n.sort = s;
  n.num = r;
  return finish(std::move(n));
}

Term mk_bool(bool b) {
  TermNode n;
  n.kind = NodeKind::BoolC;
  n.sort = bool_sort();
  n.bval = b;
  return finish(std::move(n));
}
Term tt() { static Term t = mk_bool(true); return t; }
Term ff() { static Term f = mk_bool(false); return f; }

static Term mk_app(Op op, Sort sort, std::vector<Term> args) {
  TermNode n;
  n.kind = NodeKind::App;
  n.sort = sort;
  n.op = op;
  n.args = std::move(args);
  return finish(std::move(n));
}

Term mk_add(std::vector<Term> args) {
  require(!args.empty(), "empty sum");
  for (const auto& a : args) require_numeric_same(args[0], a, "+");
  if (args.size() == 1) return args[0];
  Sort s = args[0]->sort;
  return mk_app(Op::Add, s, std::move(args));
}

Term mk_sub(Term a, Term b) {
  require_numeric_same(a, b, "-");
  Sort s = a->sort;
  return mk_app(Op::Sub, s, {std::move(a), std::move(b)});
}

Term mk_neg(Term a) {
  require(a->sort.is_numeric(), "negation of non-numeric term");
  Sort s = a->sort;
  return mk_app(Op::Neg, s, {std::move(a)});
}

Term mk_mulc(const Rat& c, Term t) {
  require(t->sort.is_numeric(), "scaling of non-numeric term");
  Sort s = t->sort;
  return mk_app(Op::MulC, s, {mk_num(c, s), std::move(t)});
}

Term mk_divc(Term t, long long d) {
  require(t->sort == int_sort(), "div on non-Int term");
  require(d > 0, "div by non-positive constant");
  return mk_app(Op::DivC, int_sort(), {std::move(t), mk_int(d)});
}

Term mk_modc(Term t, long long d) {
  require(t->sort == int_sort(), "mod on non-Int term");
  require(d > 0, "mod by non-positive constant");
  return mk_app(Op::ModC, int_sort(), {std::move(t), mk_int(d)});
}

Term mk_ite(Term c, Term a, Term b) {
  require(c->sort == bool_sort(), "ite condition must be Bool");
  require(a->sort == b->sort, "ite branches must share a sort");
  Sort s = a->sort;
  return mk_app(Op::Ite, s, {std::move(c), std::move(a), std::move(b)});
}

Term mk_eq(Term a, Term b) {
  require(a->sort == b->sort, "= needs matching sorts");
  return mk_app(Op::Eq, bool_sort(), {std::move(a), std::move(b)});
}

Term mk_distinct(std::vector<Term> args) {
  require(args.size() >= 2, "distinct needs at least two arguments");
  for (const auto& a : args) require(a->sort == args[0]->sort, "distinct sorts differ");
  return mk_app(Op::Distinct, bool_sort(), std::move(args));
}

static Term mk_cmp(Op op, Term a, Term b) {
  require_numeric_same(a, b, op_name(op));
  return mk_app(op, bool_sort(), {std::move(a), std::move(b)});
}
Term mk_le(Term a, Term b) { return mk_cmp(Op::Le, std::move(a), std::move(b)); }
Term mk_lt(Term a, Term b) { return mk_cmp(Op::Lt, std::move(a), std::move(b)); }
Term mk_ge(Term a, Term b) { return mk_cmp(Op::Ge, std::move(a), std::move(b)); }
Term mk_gt(Term a, Term b) { return mk_cmp(Op::Gt, std::move(a), std::move(b)); }

Term mk_not(Term a) {
  require(a->sort == bool_sort(), "not on non-Bool");
  return mk_app(Op::Not, bool_sort(), {std::move(a)});
}

Term mk_and(std::vector<Term> args) {
  for (const auto& a : args) require(a->sort == bool_sort(), "and on non-Bool");
  if (args.empty()) return tt();
  if (args.size() == 1) return args[0];
  return mk_app(Op::And, bool_sort(), std::move(args));
}
Term mk_or(std::vector<Term> args) {
  for (const auto& a : args) require(a->sort == bool_sort(), "or on non-Bool");
  if (args.empty()) return ff();
  if (args.size() == 1) return args[0];
  return mk_app(Op::Or, bool_sort(), std::move(args));
}
Term mk_and(Term a, Term b) { return mk_and(std::vector<Term>{std::move(a), std::move(b)}); }
Term mk_or(Term a, Term b) { return mk_or(std::vector<Term>{std::move(a), std::move(b)}); }

Term mk_implies(Term a, Term b) {
  require(a->sort == bool_sort() && b->sort == bool_sort(), "=> on non-Bool");
  return mk_app(Op::Implies, bool_sort(), {std::move(a), std::move(b)});
}

Term mk_iff(Term a, Term b) { return mk_eq(std::move(a), std::move(b)); }

Term mk_uapp(const std::string& sym, std::vector<Term> args, Sort ret) {
  TermNode n;
  n.kind = NodeKind::UApp;
  n.sort = ret;
  n.sym = sym;
  n.args = std::move(args);
  return finish(std::move(n));
}
Term mk_uconst(const std::string& sym, Sort ret) { return mk_uapp(sym, {}, ret); }

Term mk_quant(bool is_forall, std::vector<VarDecl> binders, Term body) {
  require(body->sort == bool_sort(), "quantifier over non-Bool body");
  if (binders.empty()) return body;
  TermNode n;
  n.kind = NodeKind::Quant;
  n.sort = bool_sort();
  n.is_forall = is_forall;
  n.binders = std::move(binders);
  n.args = {std::move(body)};
  return finish(std::move(n));
}
Term mk_forall(std::vector<VarDecl> binders, Term body) {
  return mk_quant(true, std::move(binders), std::move(body));
}
Term mk_exists(std::vector<VarDecl> binders, Term body) {
  return mk_quant(false, std::move(binders), std::move(body));
}

bool term_eq(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->sort != b->sort) return false;
  switch (a->kind) {
    case NodeKind::Var: return a->sym == b->sym;
    case NodeKind::Num: return a->num == b->num;
    case NodeKind::BoolC: return a->bval == b->bval;
    case NodeKind::UApp:
      if (a->sym != b->sym) return false;
      break;
    case NodeKind::App:
      if (a->op != b->op) return false;
      break;
    case NodeKind::Quant:
      if (a->is_forall != b->is_forall || !(a->binders == b->binders)) return false;
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!term_eq(a->args[i], b->args[i])) return false;
  return true;
}

size_t term_hash(const Term& t) { return t ? t->hash : 0; }

namespace {
void free_vars_rec(const Term& t, std::vector<std::set<std::string>>& scopes,
                   std::set<VarDecl>& out) {
  switch (t->kind) {
    case NodeKind::Var: {
      for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
        if (it->count(t->sym)) return;
      out.insert({t->sym, t->sort});
      return;
    }
    case NodeKind::Quant: {
      std::set<std::string> bound;
      for (const auto& b : t->binders) bound.insert(b.name);
      scopes.push_back(std::move(bound));
      free_vars_rec(t->args[0], scopes, out);
      scopes.pop_back();
      return;
    }
    default:
      for (const auto& a : t->args) free_vars_rec(a, scopes, out);
  }
}
}  // namespace

std::set<VarDecl> free_vars(const Term& t) {
  std::set<VarDecl> out;
  std::vector<std::set<std::string>> scopes;
  free_vars_rec(t, scopes, out);
  return out;
}

static void usyms_rec(const Term& t, std::set<FuncDecl>& out) {
  if (t->kind == NodeKind::UApp) {
    FuncDecl d;
    d.name = t->sym;
    d.ret = t->sort;
    for (const auto& a : t->args) d.arg_sorts.push_back(a->sort);
    out.insert(std::move(d));
  }
  for (const auto& a : t->args) usyms_rec(a, out);
}

std::set<FuncDecl> uninterpreted_symbols(const Term& t) {
  std::set<FuncDecl> out;
  usyms_rec(t, out);
  return out;
}

bool contains_quantifier(const Term& t) {
  if (t->kind == NodeKind::Quant) return true;
  for (const auto& a : t->args)
    if (contains_quantifier(a)) return true;
  return false;
}

bool contains_uninterpreted(const Term& t) {
  if (t->kind == NodeKind::UApp) return true;
  for (const auto& a : t->args)
    if (contains_uninterpreted(a)) return true;
  return false;
}

bool is_true(const Term& t) { return t->kind == NodeKind::BoolC && t->bval; }
bool is_false(const Term& t) { return t->kind == NodeKind::BoolC && !t->bval; }

bool as_numeral(const Term& t, Rat* out) {
  if (t->kind == NodeKind::Num) {
    if (out) *out = t->num;
    return true;
  }
  if (t->kind == NodeKind::App && t->op == Op::Neg) {
    Rat inner;
    if (as_numeral(t->args[0], &inner)) {
      if (out) *out = -inner;
      return true;
    }
  }
  return false;
}

namespace {
void print_rec(const Term& t, std::ostringstream& os) {
  switch (t->kind) {
    case NodeKind::Var:
      os << t->sym;
      return;
    case NodeKind::Num: {
      const Rat& r = t->num;
      bool neg = r.num < 0;
      long long n = neg ? -r.num : r.num;
      if (neg) os << "(- ";
      if (t->sort.kind == SortKind::Int) {
        os << n;
      } else if (r.den == 1) {
        os << n << ".0";
      } else {
        os << "(/ " << n << ".0 " << r.den << ".0)";
      }
      if (neg) os << ")";
      return;
    }
    case NodeKind::BoolC:
      os << (t->bval ? "true" : "false");
      return;
    case NodeKind::UApp:
      if (t->args.empty()) {
        os << t->sym;
        return;
      }
      os << "(" << t->sym;
      for (const auto& a : t->args) {
        os << " ";
        print_rec(a, os);
      }
      os << ")";
      return;
    case NodeKind::App:
      os << "(" << op_name(t->op);
      for (const auto& a : t->args) {
        os << " ";
        print_rec(a, os);
      }
      os << ")";
      return;
    case NodeKind::Quant: {
      os << "(" << (t->is_forall ? "forall" : "exists") << " (";
      bool first = true;
      for (const auto& b : t->binders) {
        if (!first) os << " ";
        first = false;
        os << "(" << b.name << " " << b.sort.name() << ")";
      }
      os << ") ";
      print_rec(t->args[0], os);
      os << ")";
      return;
    }
  }
}
}  // namespace

std::string print_term(const Term& t) {
  std::ostringstream os;
  print_rec(t, os);
  return os.str();
}

}  // namespace rpg::fol
