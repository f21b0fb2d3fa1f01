#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "workbench/backforth.hpp"
#include "workbench/presheaf.hpp"
#include "workbench/semantics.hpp"
#include "workbench/syntax.hpp"

namespace wb {

// The invariant hierarchy assigns to each anchored tuple (M, a-bar), per
// level, an algebra-valued table:
//
//   level 0      one value per instantiated unnested atomic over lh(a-bar)
//                variables — the raw interpreted value at a-bar;
//   level k+1    everything from level k plus, for every probe structure K
//                and every tuple s-bar t-bar of K with lh(s-bar) = lh(a-bar),
//                lh(t-bar) <= moveCap and E(t-bar) <= E(a-bar) /\ E(s-bar),
//                the join of E(c-bar) over the c-bar from M of length
//                lh(t-bar) with E(c-bar) <= E(t-bar) whose extended anchor
//                (M, a-bar c-bar) has the same level-k invariant as the
//                restricted key anchor (K, (s-bar t-bar)|E(c-bar)).
//
// Two anchored tuples are alpha-equivalent when their full level-alpha
// tables coincide.  The engine computes equivalence classes of all anchored
// tuples by partition refinement over (level, tuple length), so equality
// queries and table values are exact, not sampled.
struct InvariantCaps {
  int moveCap = 1;  // longest extension tuple in successor keys
  long long searchBudget = defaultSearchBudget();
};

// A materialized invariant for one anchor, suitable for printing and
// key-by-key comparison.  Slab entries carry the level that introduced them
// (0-based: slab level k holds the keys added at stage k+1).
struct InvariantTable {
  struct SlabKey {
    int level = 0;  // 0..alpha-1
    int probe = 0;  // index into probeNames
    std::string tuple;
    auto operator<=>(const SlabKey&) const = default;
  };

  std::string structureName;
  std::string anchorText;
  Elem anchorExtent = 0;
  int anchorLen = 0;
  int alpha = 0;
  int moveCap = 1;
  std::vector<std::string> probeNames;  // canonical, id-sorted

  std::map<std::string, Elem> base;  // printed unnested atomic -> value
  std::map<SlabKey, Elem> slabs;
};

struct Divergence {
  int level = 0;    // 0 = base table, k >= 1 = slab introduced at stage k
  std::string key;  // printed atomic, or "probe : tuple"
  Elem left = 0;
  Elem right = 0;
};

struct CompareResult {
  bool equal = false;
  std::optional<Divergence> firstDivergence;  // least (level, key) that differs
};

// Shared computation for a fixed probe class, anchor length and alpha.
// Anchors may come from any structure in the pool (probes plus extras); all
// structures must share one algebra and one signature instance.
class InvariantEngine {
 public:
  InvariantEngine(std::vector<const Structure*> probes, int anchorLen, int alpha,
                  InvariantCaps caps = {},
                  std::vector<const Structure*> extras = {});
  ~InvariantEngine();

  int alpha() const { return alpha_; }
  int anchorLen() const { return anchorLen_; }
  int moveCap() const { return caps_.moveCap; }

  InvariantTable table(const Structure& m, const std::vector<Sec>& abar);

  // Level-alpha equality of the two anchored invariants (class lookup).
  bool equal(const Structure& m, const std::vector<Sec>& abar,
             const Structure& n, const std::vector<Sec>& bbar);

  // The level-alpha characteristic sentence of (m, abar): a ceu formula over
  // v0..v_{lh-1} whose box subscripts are computed by evaluating the inner
  // sentences in their owning structures.
  FormulaPtr sentence(const Structure& m, const std::vector<Sec>& abar);

  // Sentences for every level 0..alpha at once.  The results share subtrees
  // (level k is the first conjunct of level k+1), so evaluating all of them
  // through one Evaluator costs little more than evaluating the last.
  std::vector<FormulaPtr> sentenceLevels(const Structure& m,
                                         const std::vector<Sec>& abar);

  // Values of the level-0..alpha sentences of (owner, abar) evaluated in
  // host at the positional tuple bbar.  Uses the engine's internal caches,
  // which sentence construction has already warmed, so this costs far less
  // than evaluating the returned sentences with a fresh Evaluator.
  std::vector<Elem> sentenceValuesAt(const Structure& owner,
                                     const std::vector<Sec>& abar,
                                     const Structure& host,
                                     const std::vector<Sec>& bbar);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int anchorLen_ = 0;
  int alpha_ = 0;
  InvariantCaps caps_;
};

// One-shot helpers built on the engine.
InvariantTable gInvariant(const Structure& m, const Structure& n,
                          const std::vector<Sec>& abar, int alpha,
                          InvariantCaps caps = {});
InvariantTable hInvariant(const std::vector<const Structure*>& probes,
                          const Structure& m, const std::vector<Sec>& abar,
                          int alpha, InvariantCaps caps = {});
FormulaPtr scottSentence(const std::vector<const Structure*>& probes,
                         const Structure& m, const std::vector<Sec>& abar,
                         int alpha, InvariantCaps caps = {});

// Key-by-key comparison; throws IncomparableDomains when the anchors have
// different lengths or extents, ConfigError when the tables were built with
// different alpha, caps or probe classes.
CompareResult compareInvariants(const InvariantTable& x, const InvariantTable& y);

// Deterministic multi-line rendering (sorted keys) for reports and tests.
std::string renderInvariantTable(const InvariantTable& t,
                                 const HeytingAlgebra& omega);

}  // namespace wb
