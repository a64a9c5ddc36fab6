#include "rpg/solver.hh"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <iostream>
#include <sstream>

#include "rpg/simplify.hh"

#ifndef RPG_DEFAULT_SOLVER
#define RPG_DEFAULT_SOLVER "tools/smt/z3smt.sh"
#endif

namespace rpg::fol {

SolverConfig SolverConfig::from_env() {
  SolverConfig cfg;
  const char* env = ::getenv("RPG_SOLVER");
  std::string cmd = env && *env ? env : RPG_DEFAULT_SOLVER;
  std::istringstream is(cmd);
  std::string tok;
  while (is >> tok) cfg.command.push_back(tok);
  const char* dbg = ::getenv("RPG_SOLVER_DEBUG");
  cfg.debug = dbg && *dbg && std::string(dbg) != "0";
  return cfg;
}

struct Session::Proc {
  pid_t pid = -1;
  int in_fd = -1;   // we write solver stdin here
  int out_fd = -1;  // we read solver stdout here
  std::string buffer;

  ~Proc() { close_all(); }

  void close_all() {
    if (in_fd >= 0) ::close(in_fd);
    if (out_fd >= 0) ::close(out_fd);
    in_fd = out_fd = -1;
    if (pid > 0) {
      ::kill(pid, SIGKILL);
      int st = 0;
      ::waitpid(pid, &st, 0);
      pid = -1;
    }
  }
};

Session::Session(SolverConfig cfg) : config_(std::move(cfg)) {
  ::signal(SIGPIPE, SIG_IGN);
}

Session::~Session() {
  if (proc_ && proc_->pid > 0 && proc_->in_fd >= 0) {
    const char* bye = "(exit)\n";
    ssize_t ignored = ::write(proc_->in_fd, bye, strlen(bye));
    (void)ignored;
  }
  proc_.reset();
}

bool Session::ensure_proc() {
  if (proc_ && proc_->pid > 0) return true;
  if (config_.command.empty()) return false;
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) return false;
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    return false;
  }
  pid_t pid = ::fork();
  if (pid < 0) return false;
  if (pid == 0) {
    ::dup2(to_child[0], 0);
    ::dup2(from_child[1], 1);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    std::vector<char*> argv;
    for (auto& s : config_.command) argv.push_back(const_cast<char*>(s.c_str()));
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  proc_ = std::make_unique<Proc>();
  proc_->pid = pid;
  proc_->in_fd = to_child[1];
  proc_->out_fd = from_child[0];
  // session preamble; models are requested explicitly, qe needs no setup
  std::string pre = "(set-option :print-success false)\n(set-logic ALL)\n";
  if (::write(proc_->in_fd, pre.data(), pre.size()) < 0) {
    kill_proc();
    return false;
  }
  return true;
}

void Session::kill_proc() {
  if (proc_) {
    proc_.reset();
    stats_.respawns++;
  }
}

std::optional<std::string> Session::roundtrip(const std::string& batch, int deadline_ms) {
  if (!ensure_proc()) return std::nullopt;
  proc_->buffer.clear();  // never let a stale frame leak into this response
  std::string sent = "%%rpg-done-" + std::to_string(++sentinel_) + "%%";
  std::string full = batch + "\n(echo \"" + sent + "\")\n";
  if (config_.debug) std::cerr << "[smt] >> " << full;

  auto t0 = std::chrono::steady_clock::now();
  size_t off = 0;
  while (off < full.size()) {
    ssize_t w = ::write(proc_->in_fd, full.data() + off, full.size() - off);
    if (w <= 0) {
      kill_proc();
      return std::nullopt;
    }
    off += static_cast<size_t>(w);
  }

  std::string& buf = proc_->buffer;
  std::string out;
  for (;;) {
    // a finished sentinel line?
    size_t pos = buf.find(sent);
    if (pos != std::string::npos) {
      out += buf.substr(0, pos);
      size_t nl = buf.find('\n', pos);
      buf = (nl == std::string::npos) ? std::string() : buf.substr(nl + 1);
      auto t1 = std::chrono::steady_clock::now();
      stats_.wait_seconds += std::chrono::duration<double>(t1 - t0).count();
      if (config_.debug) std::cerr << "[smt] << " << out << "\n";
      return out;
    }
    auto now = std::chrono::steady_clock::now();
    int waited = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(now - t0).count());
    if (waited >= deadline_ms) {
      kill_proc();
      return std::nullopt;
    }
    struct pollfd pfd{proc_->out_fd, POLLIN, 0};
    int pr = ::poll(&pfd, 1, std::min(deadline_ms - waited, 250));
    if (pr < 0) {
      kill_proc();
      return std::nullopt;
    }
    if (pr == 0) continue;
    char chunk[65536];
    ssize_t r = ::read(proc_->out_fd, chunk, sizeof chunk);
    if (r <= 0) {
      kill_proc();
      return std::nullopt;
    }
    buf.append(chunk, static_cast<size_t>(r));
  }
}

namespace {

// the wasm solver occasionally garbles a single form in transit (a parse
// error on input we know is well-formed); any error other than the benign
// get-model-after-unsat complaint means the batch cannot be trusted
bool has_hard_error(const std::string& text) {
  size_t pos = 0;
  while ((pos = text.find("(error", pos)) != std::string::npos) {
    size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (line.find("model is not available") == std::string::npos) return true;
    if (end == std::string::npos) break;
    pos = end;
  }
  return false;
}

}  // namespace

// batches are self-contained (push, declares, asserts, pop), so a garbled
// exchange can be retried wholesale on a fresh process
std::optional<std::string> Session::roundtrip_ok(const std::string& batch, int deadline_ms) {
  for (int attempt = 0; attempt < 3; ++attempt) {
    auto r = roundtrip(batch, deadline_ms);
    if (r && !has_hard_error(*r)) return r;
    if (r) {
      stats_.transport_retries++;
      if (config_.debug) std::cerr << "[smt] retrying garbled batch\n";
      kill_proc();
    }
    // roundtrip failure already killed the process; a retry respawns it
  }
  return std::nullopt;
}

std::string Session::declarations(const Term& phi, SymbolTable* table_out) const {
  std::ostringstream os;
  for (const auto& v : free_vars(phi)) {
    os << "(declare-const " << v.name << " " << v.sort.name() << ")\n";
    if (table_out) table_out->add_var(v.name, v.sort);
  }
  for (const auto& f : uninterpreted_symbols(phi)) {
    os << "(declare-fun " << f.name << " (";
    for (size_t i = 0; i < f.arg_sorts.size(); ++i)
      os << (i ? " " : "") << f.arg_sorts[i].name();
    os << ") " << f.ret.name() << ")\n";
    if (table_out) table_out->add_func(f);
  }
  return os.str();
}

namespace {

// first sat/unsat/unknown token on its own line
TriBool scan_status(const std::string& text, bool* saw_any) {
  std::istringstream is(text);
  std::string line;
  *saw_any = false;
  while (std::getline(is, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line == "sat") { *saw_any = true; return TriBool::True; }
    if (line == "unsat") { *saw_any = true; return TriBool::False; }
    if (line == "unknown" || line == "timeout") { *saw_any = true; return TriBool::Unknown; }
  }
  return TriBool::Unknown;
}

std::string scan_errors(const std::string& text) {
  std::string notes;
  size_t pos = 0;
  while ((pos = text.find("(error", pos)) != std::string::npos) {
    size_t end = text.find('\n', pos);
    notes += text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    notes += " ";
    if (end == std::string::npos) break;
    pos = end;
  }
  return notes;
}

// strips error/status lines, keeping only S-expression payload
std::string payload_after_status(const std::string& text) {
  std::istringstream is(text);
  std::string line, out;
  while (std::getline(is, line)) {
    std::string trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
      trimmed.pop_back();
    if (trimmed == "sat" || trimmed == "unsat" || trimmed == "unknown" ||
        trimmed == "timeout")
      continue;
    if (trimmed.rfind("(error", 0) == 0) continue;
    out += line;
    out += "\n";
  }
  return out;
}

std::optional<Model> parse_model_text(const std::string& text, const SymbolTable& table) {
  std::vector<SExpr> forms;
  try {
    forms = parse_sexprs(payload_after_status(text));
  } catch (const ParseError&) {
    return std::nullopt;
  }
  Model m;
  auto handle_define = [&](const SExpr& d) {
    if (!d.is_list() || d.size() < 5 || d[0].atom != "define-fun") return;
    FuncDef def;
    SymbolTable local = table;
    for (const auto& p : d[2].items) {
      if (!p.is_list() || p.size() != 2) return;
      VarDecl vd{p[0].atom, sort_from_name(p[1].atom)};
      def.params.push_back(vd);
      local.add_var(vd.name, vd.sort);
    }
    Sort ret = sort_from_name(d[3].atom);
    try {
      def.body = parse_term(d[4], local, ret.is_numeric() ? ret : bool_sort());
    } catch (const ParseError&) {
      return;
    } catch (const SortError&) {
      return;
    }
    m.defs[d[1].atom] = std::move(def);
  };
  for (const auto& f : forms) {
    if (!f.is_list() || f.items.empty()) continue;
    if (f[0].is_atom && f[0].atom == "define-fun") {
      handle_define(f);
    } else {
      // (model ...) wrapper or bare paren list of define-funs
      for (const auto& item : f.items)
        if (item.is_list() && !item.items.empty() && item[0].is_atom &&
            item[0].atom == "define-fun")
          handle_define(item);
    }
  }
  if (m.defs.empty()) return std::nullopt;
  return m;
}

}  // namespace

ValidityResult Session::check_valid(const Term& phi, int timeout_ms) {
  Term p = simplify(phi);
  if (is_true(p)) return {TriBool::True, std::nullopt, ""};
  if (is_false(p)) {
    ValidityResult r;
    r.status = TriBool::False;
    r.counter = Model{};
    return r;
  }
  int to = timeout_ms > 0 ? timeout_ms : config_.default_timeout_ms;
  Term neg = simplify(mk_not(p));
  std::string key = std::to_string(to) + "|" + print_term(neg);
  auto memo = valid_memo_.find(key);
  if (memo != valid_memo_.end()) return memo->second;

  SymbolTable table;
  std::ostringstream os;
  os << "(push 1)\n" << declarations(neg, &table);
  os << "(assert " << print_term(neg) << ")\n";
  os << "(set-option :timeout " << to << ")\n(check-sat)\n(get-model)\n(pop 1)";
  stats_.queries++;
  auto resp = roundtrip_ok(os.str(), to * 3 + 20000);
  ValidityResult r;
  if (!resp) {
    r.note = "solver process failure";
    stats_.unknowns++;
    return r;
  }
  bool saw;
  TriBool sat = scan_status(*resp, &saw);
  if (!saw) {
    r.note = "protocol error: " + scan_errors(*resp);
    stats_.unknowns++;
    return r;
  }
  if (sat == TriBool::False) {
    r.status = TriBool::True;
  } else if (sat == TriBool::True) {
    r.status = TriBool::False;
    r.counter = parse_model_text(*resp, table);
    if (!r.counter) r.counter = Model{};
  } else {
    stats_.unknowns++;
    r.note = scan_errors(*resp);
  }
  if (valid_memo_.size() < 20000) valid_memo_[key] = r;
  return r;
}

SatResult Session::check_sat_model(const Term& phi, int timeout_ms) {
  Term p = simplify(phi);
  SatResult r;
  if (is_true(p)) {
    r.status = TriBool::True;
    r.model = Model{};
    return r;
  }
  if (is_false(p)) {
    r.status = TriBool::False;
    return r;
  }
  int to = timeout_ms > 0 ? timeout_ms : config_.default_timeout_ms;
  SymbolTable table;
  std::ostringstream os;
  os << "(push 1)\n" << declarations(p, &table);
  os << "(assert " << print_term(p) << ")\n";
  os << "(set-option :timeout " << to << ")\n(check-sat)\n(get-model)\n(pop 1)";
  stats_.queries++;
  auto resp = roundtrip_ok(os.str(), to * 3 + 20000);
  if (!resp) {
    r.note = "solver process failure";
    stats_.unknowns++;
    return r;
  }
  bool saw;
  TriBool sat = scan_status(*resp, &saw);
  if (!saw) {
    r.note = "protocol error: " + scan_errors(*resp);
    stats_.unknowns++;
    return r;
  }
  r.status = sat;
  if (sat == TriBool::True) {
    r.model = parse_model_text(*resp, table);
    if (!r.model) r.model = Model{};
  }
  if (sat == TriBool::Unknown) stats_.unknowns++;
  return r;
}

QeResult Session::apply_tactic(const Term& phi, const std::string& tactic,
                               int timeout_ms, bool mark_qe) {
  Term p = simplify(phi);
  QeResult out;
  out.formula = p;
  out.quantifier_free = !contains_quantifier(p);
  if (is_true(p) || is_false(p)) {
    out.qe_applied = true;
    return out;
  }
  int to = timeout_ms > 0 ? timeout_ms : config_.default_timeout_ms;
  SymbolTable table;
  std::ostringstream os;
  os << "(push 1)\n" << declarations(p, &table);
  os << "(assert " << print_term(p) << ")\n";
  os << "(apply (try-for " << tactic << " " << to << "))\n(pop 1)";
  stats_.queries++;
  auto resp = roundtrip_ok(os.str(), to * 3 + 20000);
  if (!resp) {
    out.note = "solver process failure";
    return out;
  }
  // any error in an apply batch (bad declare, failed assert) can leave the
  // goal stack empty, which prints as a vacuous "true" goal; reject the whole
  // response rather than trust it
  if (resp->find("(error") != std::string::npos) {
    out.note = scan_errors(*resp);
    return out;
  }
  try {
    auto forms = parse_sexprs(payload_after_status(*resp));
    for (const auto& f : forms) {
      if (!f.is_list() || f.items.empty() || !f[0].is_atom || f[0].atom != "goals")
        continue;
      std::vector<Term> goal_disj;
      for (size_t gi = 1; gi < f.size(); ++gi) {
        const SExpr& g = f[gi];
        if (!g.is_list() || g.items.empty() || g[0].atom != "goal") continue;
        std::vector<Term> conj;
        for (size_t i = 1; i < g.size(); ++i) {
          if (g[i].is_atom && !g[i].atom.empty() && g[i].atom[0] == ':') {
            ++i;  // keyword + its value
            continue;
          }
          conj.push_back(parse_term(g[i], table, bool_sort()));
        }
        goal_disj.push_back(mk_and(std::move(conj)));
      }
      if (goal_disj.empty()) continue;
      Term result = simplify(mk_or(std::move(goal_disj)));
      out.formula = result;
      out.quantifier_free = !contains_quantifier(result);
      out.qe_applied = mark_qe || out.quantifier_free;
      return out;
    }
    out.note = "no goals in tactic output";
  } catch (const std::exception& e) {
    out.note = std::string("tactic output parse failure: ") + e.what();
    out.formula = p;
    out.quantifier_free = !contains_quantifier(p);
    out.qe_applied = false;
  }
  return out;
}

QeResult Session::qelim_simplify(const Term& phi, int timeout_ms) {
  Term p = simplify(phi);
  QeResult out;
  out.formula = p;
  out.quantifier_free = !contains_quantifier(p);
  if (!config_.enable_qe) return out;
  if (is_true(p) || is_false(p)) {
    out.qe_applied = true;
    return out;
  }
  // z3's qe tactic is arithmetic-only; formulas with uninterpreted symbols
  // only get the simplifier, keeping their quantifiers (flagged via
  // quantifier_free/qe_applied). solve-eqs must never appear here: it
  // eliminates free variables, which preserves satisfiability but not the
  // predicate the formula denotes.
  if (contains_uninterpreted(p)) {
    QeResult s = apply_tactic(p, "simplify", timeout_ms, false);
    s.qe_applied = false;
    s.quantifier_free = !contains_quantifier(s.formula);
    return s;
  }
  if (!out.quantifier_free) {
    // qe handles the common one-block case cheaply; qe2 (qsat-based) takes
    // over on alternations qe leaves behind
    QeResult q = apply_tactic(p, "(then qe simplify)", timeout_ms, true);
    if (!q.quantifier_free)
      q = apply_tactic(p, "(then qe2 simplify)", timeout_ms, true);
    if (q.quantifier_free) {
      // the tactic pipeline has shown it can garble a form or emit a goal
      // that is weaker than the input; only a proved equivalence is trusted
      if (term_eq(q.formula, p)) return q;
      auto v = check_valid(mk_iff(p, q.formula), timeout_ms);
      if (v.status == TriBool::True) return q;
    }
    // partial, failed, or unverified qe: fall back to plain simplification
    QeResult s = apply_tactic(p, "simplify", timeout_ms, false);
    s.qe_applied = false;
    s.note = q.note.empty() ? s.note : q.note;
    return s;
  }
  QeResult s = apply_tactic(p, "simplify", timeout_ms, false);
  s.qe_applied = true;  // quantifier-free input stays quantifier-free
  s.quantifier_free = !contains_quantifier(s.formula);
  return s;
}

Term Session::simplify_strong(const Term& phi, int timeout_ms) {
  Term p = simplify(phi);
  if (is_true(p) || is_false(p)) return p;
  QeResult r = apply_tactic(p, "ctx-solver-simplify", timeout_ms, false);
  if (!r.note.empty() || term_eq(r.formula, p)) return p;
  auto v = check_valid(mk_iff(p, r.formula), timeout_ms);
  return v.status == TriBool::True ? r.formula : p;
}

Valuation model_to_valuation(const Model& m) {
  Valuation v;
  for (const auto& [name, def] : m.defs) {
    if (!def.params.empty() || !def.body) continue;
    if (is_true(def.body)) {
      v[name] = Value::of_bool(true);
    } else if (is_false(def.body)) {
      v[name] = Value::of_bool(false);
    } else {
      Rat r;
      if (as_numeral(def.body, &r)) v[name] = Value::of_rat(r);
    }
  }
  return v;
}

}  // namespace rpg::fol
