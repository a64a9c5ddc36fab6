#ifndef RPG_SEXPR_HH
#define RPG_SEXPR_HH

// Minimal S-expression reader shared by the game-file parser, the GOTO
// program parser, and the SMT-LIB response parser.

#include <stdexcept>
#include <string>
#include <vector>

namespace rpg::fol {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& m, int l, int c)
      : std::runtime_error(m + " at " + std::to_string(l) + ":" + std::to_string(c)),
        line(l), col(c) {}
};

struct SExpr {
  bool is_atom = true;
  std::string atom;         // valid when is_atom
  std::vector<SExpr> items; // valid when !is_atom
  int line = 0, col = 0;

  bool is_list() const { return !is_atom; }
  size_t size() const { return items.size(); }
  const SExpr& operator[](size_t i) const { return items[i]; }
  std::string str() const;
};

// Parses exactly one S-expression; trailing content is an error.
SExpr parse_sexpr(const std::string& text);
// Parses a whole document of S-expressions; ';' comments run to end of line.
std::vector<SExpr> parse_sexprs(const std::string& text);

}  // namespace rpg::fol

#endif
