// Seeded random generators: posets and their downset algebras, signatures,
// always-lawful random structures, random formulae, and matched structure
// pairs for the equivalence cross-checks.  Every generator draws only from
// the deterministic Rng, so a fixed seed reproduces a run byte for byte.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "workbench/heyting.hpp"
#include "workbench/presheaf.hpp"
#include "workbench/rng.hpp"
#include "workbench/syntax.hpp"

namespace wb {

struct PosetSample {
  int points = 0;
  std::vector<std::pair<int, int>> less;  // strict assertions i < j
};

// A random poset on 1..maxPoints points (edges transitively closed by the
// algebra constructor; cycles are avoided by orienting edges upward).
PosetSample randomPoset(Rng& rng, int maxPoints);

// Downset algebra of a random poset.  maxElems > 0 redraws until the
// algebra has at most that many elements.
HeytingAlgebra randomDownsetAlgebra(Rng& rng, int maxPoints, int maxElems = 0);

struct SignatureOptions {
  int maxRels = 2;
  int maxRelArity = 2;
  int maxFuns = 1;
  int maxFunArity = 2;
  int maxConsts = 1;
};
Signature randomSignature(Rng& rng, std::string name,
                          const SignatureOptions& opt = {});

struct StructureOptions {
  int maxGens = 3;
  bool topExtentsOnly = false;  // classical carrier: every generator at top
  int maxCarrier = 0;           // 0 = no bound; otherwise shrink until it fits
};

// Random structure that always validates: generator extents are drawn from
// the algebra (the first generator stays at top so constants can be
// interpreted strictly), relation values are kept below the tuple extent,
// function images are restrictions of a generator chosen above the argument
// extent, and identifications are retried away when they make the declared
// interpretations inconsistent.
StructurePtr randomStructure(Rng& rng, const HeytingAlgebra& omega,
                             const Signature& sig, const std::string& name,
                             const StructureOptions& opt = {});

struct FormulaOptions {
  int maxDepth = 3;           // connective nesting
  int maxTermRank = 2;        // mrank budget per atom
  int varPool = 2;            // the root scope is v0..v_{varPool-1}
  bool allowBox = true;       // needs omega for subscript names
  bool allowCheck = true;     // needs omega
  bool unnestedOnly = false;  // atoms restricted to the four unnested shapes
  int maxQDegree = -1;        // -1: no bound
  const HeytingAlgebra* omega = nullptr;
};

// Random formula whose free variables lie in v0..v_{varPool-1}; quantifiers
// bind fresh higher indices, so no binder shadows an outer variable.
FormulaPtr randomFormula(Rng& rng, const Signature& sig,
                         const FormulaOptions& opt = {});

// A matched pair of structures over one shared algebra and signature, with
// same-length anchors of equal componentwise extents: the inputs one
// equivalence comparison needs (invariant tables, similarity, the game, and
// characteristic sentences all accept exactly this shape).
struct EquivalencePair {
  std::shared_ptr<HeytingAlgebra> omega;
  std::shared_ptr<Signature> sig;
  StructurePtr m, n;
  std::vector<Sec> abar, bbar;
  int alpha = 1;
  int moveCap = 1;
};

struct PairOptions {
  int maxAlpha = 3;
  int maxGens = 3;
  int maxAlgebraPoints = 3;  // poset points behind the shared algebra
  int maxAlgebraElems = 5;
  int maxCarrier = 8;  // keeps honest sentence evaluation affordable
};

// Half the time the second structure is rebuilt from a lightly mutated copy
// of the first structure's declarations (pairs likely equivalent), otherwise
// it is drawn independently (pairs likely distinguishable).  Anchor lengths
// shrink as carriers grow so downstream sentence evaluation stays cheap.
EquivalencePair randomEquivalencePair(Rng& rng, const PairOptions& opt = {});

// Deliberate fault injection for the fuzz harness: each value sabotages one
// specific step, proving the cross-checks can fail.
enum class InjectedBug {
  None,
  FlipVerdict,    // negate the invariant-equality verdict (pairs mode)
  DropConjunct,   // evaluate characteristic sentences minus one conjunct (pairs mode)
  SkipInverse,    // skip restricting the image tuple (invariance mode)
};
InjectedBug parseInjectedBug(const std::string& name);  // throws ConfigError

}  // namespace wb
