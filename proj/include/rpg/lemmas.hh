#ifndef RPG_LEMMAS_HH
#define RPG_LEMMAS_HH

// Acceleration lemmas and the ranking-function templates that discharge
// them. A lemma is a triple (base, step, conc): from any state in conc,
// every infinite sequence of step-conforming moves eventually enters base,
// and step keeps conc invariant until it does. The accelerated attractor
// introduces placeholder predicates for base/step/conc, collects a
// constraint formula over them, and this module finds concrete lemmas
// that satisfy the constraint.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpg/eval.hh"
#include "rpg/fresh.hh"
#include "rpg/solver.hh"
#include "rpg/subst.hh"
#include "rpg/term.hh"

namespace rpg {

// Concrete lemma over a fixed variable tuple. primed[i] is the post-state
// twin of vars[i]; step is a relation over vars ++ primed, base and conc
// are state predicates over vars.
//
// Well-foundedness (every infinite step-chain from conc hits base) is not
// first-order and is never checked here. Template-produced lemmas have it
// by construction: their step decreases a ranking term by a fixed positive
// amount and their base contains the ranking term's sublevel set. Lemmas
// from any other source must be trusted by the caller.
struct AccelerationLemma {
  std::vector<fol::VarDecl> vars;
  std::vector<fol::VarDecl> primed;
  fol::Term base;
  fol::Term step;
  fol::Term conc;
};

struct InductivenessReport {
  bool ok = false;
  bool undecided = false;              // solver gave up; counts as failure
  std::optional<fol::Valuation> witness;  // values for vars and primed
};

// Checks the first-order half of the lemma conditions:
//   forall V, V'. conc /\ not base /\ step  ->  conc[V -> V']
InductivenessReport verify_step_inductiveness(const AccelerationLemma& lem,
                                              fol::Session& session);

// Placeholder predicates introduced by one acceleration: b(X) and c(X) are
// unary in the state tuple, st(X0, X) relates the state at the start of the
// acceleration to the current state.
struct LemmaSymbolTriple {
  std::string b;
  std::string st;
  std::string c;
  std::vector<fol::VarDecl> xs;

  fol::FuncDecl b_decl() const;
  fol::FuncDecl st_decl() const;
  fol::FuncDecl c_decl() const;
};

LemmaSymbolTriple make_lemma_triple(const std::vector<fol::VarDecl>& xs,
                                    fol::FreshSymbolSource& fresh);

// Template instantiation for one triple. The bodies are parametric in meta
// variables (rank coefficients, offsets, direction selectors); substituting
// any meta assignment that satisfies `ranges` yields a sound lemma:
//
//   base = rank <= 0 /\ inv      step = rank' + eps <= rank /\ inv'
//   conc = inv
//
// rank is a +/-1 integer combination of the numeric variables plus an
// offset; inv is a conjunction of template half-space predicates, each of
// which can also be switched off by zeroing its coefficients.
struct TemplateEntry {
  LemmaSymbolTriple syms;
  std::vector<fol::VarDecl> metas;
  fol::Term ranges;               // meta domain constraints
  fol::Term base;                 // over xs ++ metas
  fol::Term step;                 // over xs ++ primed ++ metas
  fol::Term conc;                 // over xs ++ metas
  std::vector<fol::VarDecl> primed;
};

struct TemplateMapping {
  std::vector<TemplateEntry> entries;
  std::vector<fol::VarDecl> all_metas;
  fol::Term all_ranges = fol::tt();

  const TemplateEntry* find(const std::string& sym) const;
  // Rewrite rules replacing b/st/c applications by template bodies.
  std::map<std::string, fol::UAppRule> rules() const;
};

// Builds level-k templates for every triple. Each triple gets one ranking
// term over the numeric variables (eps = 1 for both Int and Real), k
// single-variable bound conjuncts with a three-way direction selector, and
// max(0, k - 2) two-variable bound conjuncts. Throws SortError if xs has no
// numeric variable to rank on.
TemplateMapping build_templates(const std::vector<LemmaSymbolTriple>& triples,
                                int level, fol::FreshSymbolSource& fresh);

// Substitutes the template bodies for every placeholder application in
// psi /\ phi and closes existentially over the metas:
//   exists Meta. ranges /\ psi[tau] /\ phi[tau]
// Throws SortError if a placeholder application has no template.
fol::Term build_meta_formula(const fol::Term& psi, const fol::Term& phi,
                             const TemplateMapping& tau);

using MetaAssignment = std::map<std::string, fol::Term>;

// One case of a finite strategy cover: if the state satisfies guard when
// the acceleration starts, these concrete lemmas (one per triple) drive it.
struct CoverEntry {
  MetaAssignment assignment;
  fol::Term guard;                // instantiated conclusion, over xs
  std::map<std::string, AccelerationLemma> lemmas;  // keyed by st symbol
};

struct SkolemCover {
  std::vector<CoverEntry> entries;
  fol::Term region = fol::ff();   // quantifier-free union the cover targets
  bool complete = false;          // guards proven to exhaust region
};

// Covers `region` (the quantifier-free equivalent of the meta formula) by
// finitely many meta assignments: repeatedly picks a state not yet covered,
// solves for metas that accept it, and records the induced guard. Every
// entry is validated (step inductiveness plus psi[tau(M)] valid); invalid
// or undecided entries abort with complete = false. A cover that hits
// `limit` before exhausting the region is returned partial.
SkolemCover cover_with_models(const fol::Term& region, const fol::Term& psi,
                              const fol::Term& phi, const TemplateMapping& tau,
                              fol::Session& session, int limit);

// Substitutes a meta assignment into a template entry, producing the
// concrete lemma. Metas absent from the assignment default to 0.
AccelerationLemma lemma_of_assignment(const TemplateEntry& entry,
                                      const MetaAssignment& m);

// Rewrite rules sending each placeholder application to the corresponding
// concrete-lemma formula (b -> base, st -> step, c -> conc).
std::map<std::string, fol::UAppRule> lemma_rules(
    const TemplateMapping& tau, const MetaAssignment& m);

}  // namespace rpg

#endif
