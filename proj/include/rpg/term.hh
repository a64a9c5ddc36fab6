#ifndef RPG_TERM_HH
#define RPG_TERM_HH

// Many-sorted first-order terms over linear integer/real arithmetic with
// uninterpreted function symbols and block quantifiers. Terms are immutable
// and shared; structural equality is hash-accelerated. Multiplication is
// restricted to numeral-by-term (MulC) and division/modulo to term-by-positive-
// numeral (DivC/ModC) so every term stays linear.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpg::fol {

struct SortError : std::runtime_error {
  explicit SortError(const std::string& m) : std::runtime_error(m) {}
};

enum class SortKind : uint8_t { Bool, Int, Real };

struct Sort {
  SortKind kind = SortKind::Bool;
  bool operator==(const Sort& o) const { return kind == o.kind; }
  bool operator!=(const Sort& o) const { return kind != o.kind; }
  bool is_numeric() const { return kind != SortKind::Bool; }
  const char* name() const {
    switch (kind) {
      case SortKind::Bool: return "Bool";
      case SortKind::Int: return "Int";
      default: return "Real";
    }
  }
};

inline Sort bool_sort() { return Sort{SortKind::Bool}; }
inline Sort int_sort() { return Sort{SortKind::Int}; }
inline Sort real_sort() { return Sort{SortKind::Real}; }
Sort sort_from_name(const std::string& name);

// Exact rational with normalized sign and gcd-reduced representation.
// Intermediate products go through __int128; overflow throws.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d);

  static Rat from_decimal_string(const std::string& s);

  bool is_integer() const { return den == 1; }
  bool is_zero() const { return num == 0; }
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const;
  bool operator<=(const Rat& o) const { return *this < o || *this == o; }

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator-() const;

  // SMT-LIB div/mod semantics: x = div(x,n)*n + mod(x,n), 0 <= mod < |n|.
  static long long euclid_div(long long a, long long b);
  static long long euclid_mod(long long a, long long b);

  std::string str() const;
};

enum class Op : uint8_t {
  Add,       // n-ary, numeric
  Sub,       // binary, numeric
  Neg,       // unary, numeric
  MulC,      // args[0] numeral constant, args[1] term
  DivC,      // Int only: args[0] term, args[1] positive numeral
  ModC,      // Int only: args[0] term, args[1] positive numeral
  Ite,       // (ite Bool t t), both branches same sort
  Eq,        // binary, same sort
  Distinct,  // n-ary, same sort
  Le, Lt, Ge, Gt,  // binary, numeric, same sort
  Not, And, Or, Implies  // Bool
};

const char* op_name(Op op);

enum class NodeKind : uint8_t { Var, Num, BoolC, App, UApp, Quant };

class TermNode;
using Term = std::shared_ptr<const TermNode>;

struct VarDecl {
  std::string name;
  Sort sort;
  bool operator==(const VarDecl& o) const { return name == o.name && sort == o.sort; }
  bool operator<(const VarDecl& o) const {
    if (name != o.name) return name < o.name;
    return static_cast<int>(sort.kind) < static_cast<int>(o.sort.kind);
  }
};

struct FuncDecl {
  std::string name;
  std::vector<Sort> arg_sorts;
  Sort ret;
  bool operator<(const FuncDecl& o) const { return name < o.name; }
  bool operator==(const FuncDecl& o) const {
    return name == o.name && arg_sorts == o.arg_sorts && ret == o.ret;
  }
};

class TermNode {
 public:
  NodeKind kind;
  Sort sort;
  std::string sym;             // Var name or UApp symbol
  Rat num;                     // Num payload
  bool bval = false;           // BoolC payload
  Op op = Op::And;             // App payload
  std::vector<Term> args;      // App/UApp children; Quant body at args[0]
  bool is_forall = false;      // Quant payload
  std::vector<VarDecl> binders;
  size_t hash = 0;
};

// Constructors. All check well-sortedness and throw SortError on misuse.
Term mk_var(const std::string& name, Sort s);
Term mk_var(const VarDecl& v);
Term mk_int(long long v);
Term mk_num(const Rat& r, Sort s);  // s must be numeric; Int requires r integral
Term mk_bool(bool b);
Term tt();
Term ff();
Term mk_add(std::vector<Term> args);
Term mk_sub(Term a, Term b);
Term mk_neg(Term a);
Term mk_mulc(const Rat& c, Term t);
Term mk_divc(Term t, long long d);
Term mk_modc(Term t, long long d);
Term mk_ite(Term c, Term a, Term b);
Term mk_eq(Term a, Term b);
Term mk_distinct(std::vector<Term> args);
Term mk_le(Term a, Term b);
Term mk_lt(Term a, Term b);
Term mk_ge(Term a, Term b);
Term mk_gt(Term a, Term b);
Term mk_not(Term a);
Term mk_and(std::vector<Term> args);  // empty -> true, singleton -> itself
Term mk_or(std::vector<Term> args);   // empty -> false, singleton -> itself
Term mk_and(Term a, Term b);
Term mk_or(Term a, Term b);
Term mk_implies(Term a, Term b);
Term mk_iff(Term a, Term b);
Term mk_uapp(const std::string& sym, std::vector<Term> args, Sort ret);
Term mk_uconst(const std::string& sym, Sort ret);
Term mk_quant(bool is_forall, std::vector<VarDecl> binders, Term body);
Term mk_forall(std::vector<VarDecl> binders, Term body);
Term mk_exists(std::vector<VarDecl> binders, Term body);

bool term_eq(const Term& a, const Term& b);

// Free variables (respecting binders) and uninterpreted symbols.
std::set<VarDecl> free_vars(const Term& t);
std::set<FuncDecl> uninterpreted_symbols(const Term& t);
bool contains_quantifier(const Term& t);
bool contains_uninterpreted(const Term& t);
bool is_true(const Term& t);
bool is_false(const Term& t);

// SMT-LIB rendering; the same prefix syntax serves the game-file and GOTO
// program expression language.
std::string print_term(const Term& t);

// Numeral payload if t is a constant of numeric sort (possibly negated).
bool as_numeral(const Term& t, Rat* out);

size_t term_hash(const Term& t);

}  // namespace rpg::fol

#endif
