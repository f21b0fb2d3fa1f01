// Source-to-source formula transformations.
//
//  - unnest: replaces every nested atom by an equivalent prefix of singleton
//    existentials over a flat conjunction of unnested atoms; value-preserving
//    and qdegree(unnest(f)) == mrank(f).
//  - ppNormalForm: prenexes a positive-primitive formula into an existential
//    chain over one flat conjunction of unnested atoms.
//  - boxToCheck / checkToBox: eval-preserving translations between the box
//    fragment and the check fragment.
#pragma once

#include "workbench/syntax.hpp"

namespace wb {

// Fresh variables introduced by transformations start at this index unless
// the input already mentions higher ones.
inline constexpr int kFreshVarBase = 100;

FormulaPtr unnestAtomic(const FormulaPtr& atom);  // pre: Eq or Rel node
FormulaPtr unnest(const FormulaPtr& f);

// Throws ConfigError("not positive primitive: ...") outside the fragment
// built from atoms with BigAnd and Exists.
FormulaPtr ppNormalForm(const FormulaPtr& f);

FormulaPtr boxToCheck(const FormulaPtr& f);
FormulaPtr checkToBox(const FormulaPtr& f);

}  // namespace wb
