#ifndef RPG_SOLVER_HH
#define RPG_SOLVER_HH

// SMT-LIB v2 client over a child process's stdin/stdout. One Session per
// logical phase; every query runs in its own (push 1)/(pop 1) scope with its
// own declarations, so queries are independent and the child can be respawned
// transparently. Responses are framed with an (echo ...) sentinel.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpg/eval.hh"
#include "rpg/parse.hh"
#include "rpg/term.hh"

namespace rpg::fol {

enum class TriBool : uint8_t { True, False, Unknown };

struct SolverConfig {
  std::vector<std::string> command;  // argv of the solver process
  int default_timeout_ms = 5000;
  bool enable_qe = true;
  bool debug = false;  // dump traffic to stderr

  // RPG_SOLVER env var (whitespace-split) or the compiled-in default wrapper.
  static SolverConfig from_env();
};

struct FuncDef {
  std::vector<VarDecl> params;
  Term body;
};

struct Model {
  std::map<std::string, FuncDef> defs;

  bool has(const std::string& name) const { return defs.count(name) != 0; }
  // constant value of a 0-ary definition (nullptr when absent or non-constant)
  Term value(const std::string& name) const {
    auto it = defs.find(name);
    if (it == defs.end() || !it->second.params.empty()) return nullptr;
    return it->second.body;
  }
};

struct ValidityResult {
  TriBool status = TriBool::Unknown;
  std::optional<Model> counter;  // model of the negation when invalid
  std::string note;              // protocol errors and solver messages
  bool is_valid() const { return status == TriBool::True; }
};

struct SatResult {
  TriBool status = TriBool::Unknown;
  std::optional<Model> model;
  std::string note;
  bool is_sat() const { return status == TriBool::True; }
  bool is_unsat() const { return status == TriBool::False; }
};

struct QeResult {
  Term formula;
  bool quantifier_free = false;
  bool qe_applied = false;  // false: returned input (flagged per contract)
  std::string note;
};

struct SolverStats {
  long queries = 0;
  long respawns = 0;
  long unknowns = 0;
  long transport_retries = 0;
  double wait_seconds = 0.0;
};

// constant 0-ary definitions of a model as evaluator values; non-constant or
// parameterized entries are skipped
Valuation model_to_valuation(const Model& m);

class Session {
 public:
  explicit Session(SolverConfig cfg = SolverConfig::from_env());
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // valid iff not(phi) is unsatisfiable; counter carries the falsifying model
  ValidityResult check_valid(const Term& phi, int timeout_ms = -1);
  // model covers free variables and the listed (or all) uninterpreted symbols
  SatResult check_sat_model(const Term& phi, int timeout_ms = -1);
  // equivalent formula; quantifier-free when qe succeeds, flagged otherwise
  QeResult qelim_simplify(const Term& phi, int timeout_ms = -1);
  Term simplify_strong(const Term& phi, int timeout_ms = -1);

  bool is_valid(const Term& phi, int timeout_ms = -1) {
    return check_valid(phi, timeout_ms).is_valid();
  }

  const SolverStats& stats() const { return stats_; }
  const SolverConfig& config() const { return config_; }

 private:
  struct Proc;
  SolverConfig config_;
  std::unique_ptr<Proc> proc_;
  SolverStats stats_;
  long sentinel_ = 0;
  std::map<std::string, ValidityResult> valid_memo_;

  bool ensure_proc();
  void kill_proc();
  // sends the batch and returns everything before the sentinel; nullopt on
  // protocol failure (child dead, read deadline exceeded)
  std::optional<std::string> roundtrip(const std::string& batch, int deadline_ms);
  std::optional<std::string> roundtrip_ok(const std::string& batch, int deadline_ms);
  std::string declarations(const Term& phi, SymbolTable* table_out) const;
  QeResult apply_tactic(const Term& phi, const std::string& tactic, int timeout_ms,
                        bool mark_qe);
};

}  // namespace rpg::fol

#endif
