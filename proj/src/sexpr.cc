#include "rpg/sexpr.hh"

#include <sstream>

namespace rpg::fol {

std::string SExpr::str() const {
  if (is_atom) return atom;
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) os << " ";
    os << items[i].str();
  }
  os << ")";
  return os.str();
}

namespace {

struct Reader {
  const std::string& s;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Reader(const std::string& text) : s(text) {}

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  char advance() {
    char c = s[pos++];
    if (c == '\n') { line++; col = 1; } else { col++; }
    return c;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read() {
    skip_ws();
    if (eof()) throw ParseError("unexpected end of input", line, col);
    SExpr e;
    e.line = line;
    e.col = col;
    char c = peek();
    if (c == '(') {
      advance();
      e.is_atom = false;
      for (;;) {
        skip_ws();
        if (eof()) throw ParseError("unterminated list", e.line, e.col);
        if (peek() == ')') { advance(); break; }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') throw ParseError("unexpected ')'", line, col);
    if (c == '"') {   // string literal (solver error messages); kept verbatim
      advance();
      std::string a = "\"";
      while (!eof() && peek() != '"') a += advance();
      if (eof()) throw ParseError("unterminated string", e.line, e.col);
      advance();
      a += '"';
      e.atom = a;
      return e;
    }
    if (c == '|') {   // quoted symbol; bars stripped
      advance();
      std::string a;
      while (!eof() && peek() != '|') a += advance();
      if (eof()) throw ParseError("unterminated quoted symbol", e.line, e.col);
      advance();
      e.atom = a;
      return e;
    }
    std::string a;
    while (!eof()) {
      char d = peek();
      if (d == '(' || d == ')' || d == ' ' || d == '\t' || d == '\n' || d == '\r' || d == ';')
        break;
      a += advance();
    }
    if (a.empty()) throw ParseError("empty token", line, col);
    e.atom = a;
    return e;
  }
};

}  // namespace

SExpr parse_sexpr(const std::string& text) {
  Reader r(text);
  SExpr e = r.read();
  r.skip_ws();
  if (!r.eof()) throw ParseError("trailing content", r.line, r.col);
  return e;
}

std::vector<SExpr> parse_sexprs(const std::string& text) {
  Reader r(text);
  std::vector<SExpr> out;
  for (;;) {
    r.skip_ws();
    if (r.eof()) return out;
    out.push_back(r.read());
  }
}

}  // namespace rpg::fol
