// Independent two-valued (Tarskian) evaluator used as a cross-check: on a
// structure over the two-element algebra whose generators sit at top, a
// box-free formula must get value top exactly when the classical reading
// holds.  This file deliberately re-implements satisfaction from scratch
// (plain recursion over bool) instead of calling the library evaluator.
#pragma once

#include "workbench/presheaf.hpp"
#include "workbench/semantics.hpp"
#include "workbench/syntax.hpp"

namespace wbtest {

// True iff m classically satisfies f under asg.  The classical domain is
// the set of extent-top sections; quantifiers range over exactly those, and
// every assigned section must be one.  Requires a two-element algebra and a
// box/check-free formula; throws std::logic_error otherwise.
bool tarskiHolds(const wb::Structure& m, const wb::FormulaPtr& f,
                 const wb::Assignment& asg);

}  // namespace wbtest
