// Heyting-valued evaluation of terms and formulae over a structure.
//
// An assignment maps variable indices to sections.  Every clause keeps the
// bound eval(f, asg) <= extent(asg) /\ formulaExtent(f); in particular the
// check connective <p> evaluates to extent(asg) /\ p, so that at the empty
// assignment its value is exactly p.
#pragma once

#include <map>
#include <unordered_map>

#include "workbench/presheaf.hpp"
#include "workbench/syntax.hpp"

namespace wb {

using Assignment = std::map<int, Sec>;

// Meet of the extents of all assigned sections (top when empty).
Elem assignmentExtent(const Structure& m, const Assignment& asg);

// Meet of the extents of the constants occurring in the formula/term
// (top when constant-free).  Box and Check are extent-transparent.
Elem formulaExtent(const Structure& m, const FormulaPtr& f);
Elem termExtent(const Structure& m, const TermPtr& t);

Sec evalTerm(const Structure& m, const TermPtr& t, const Assignment& asg);

// Reusable evaluator; memoizes per (node, free-variable bindings), which
// makes repeated evaluation of shared subtrees (invariant sentences are
// DAGs) cheap.  The caches hold shared ownership of every node they have
// seen: keying on bare addresses would go stale once a caller drops a
// formula and the allocator reuses its storage.  Not thread-shared; create
// one per thread if needed.
class Evaluator {
public:
  explicit Evaluator(const Structure& m) : m_(m) {}

  Elem eval(const FormulaPtr& f, const Assignment& asg);
  bool forces(const FormulaPtr& f, const Assignment& asg);

private:
  Elem evalRaw(const FormulaPtr& f, const Assignment& asg);
  const std::vector<int>& freeOf(const FormulaPtr& f);
  // Cached per node: formulaExtent would re-expand shared subtrees on every
  // call, which is quadratic on heavily shared DAGs.
  Elem extentOf(const FormulaPtr& f);

  struct MemoHash {
    std::size_t operator()(const std::pair<FormulaPtr, std::string>& k) const {
      std::size_t h = std::hash<const void*>{}(k.first.get());
      return h ^ (std::hash<std::string>{}(k.second) + 0x9e3779b97f4a7c15ull +
                  (h << 6) + (h >> 2));
    }
  };

  const Structure& m_;
  std::unordered_map<FormulaPtr, std::vector<int>> fv_;
  std::unordered_map<FormulaPtr, Elem> fe_;
  std::unordered_map<std::pair<FormulaPtr, std::string>, Elem, MemoHash> memo_;
};

Elem eval(const Structure& m, const FormulaPtr& f, const Assignment& asg);

// True iff eval(f, asg) == assignmentExtent(asg) /\ formulaExtent(f).
bool forces(const Structure& m, const FormulaPtr& f, const Assignment& asg);

// Positional helper: tuple entry i binds variable v_i.
Assignment positionalAssignment(const std::vector<Sec>& tuple);

}  // namespace wb
