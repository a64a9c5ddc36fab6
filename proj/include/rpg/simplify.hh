#ifndef RPG_SIMPLIFY_HH
#define RPG_SIMPLIFY_HH

// Local syntactic simplification: constant folding, and/or flattening,
// unit/absorber removal, duplicate and complementary literal handling,
// quantifier pruning. Runs before every solver call to keep CPre iterates
// from snowballing. Purely syntactic, always equivalence-preserving.

#include "rpg/term.hh"

namespace rpg::fol {

Term simplify(const Term& t);

}  // namespace rpg::fol

#endif
