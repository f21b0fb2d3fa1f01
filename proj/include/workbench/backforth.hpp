// Partial isomorphisms between two structures, the back-and-forth
// refinement hierarchy Q_alpha(p), tuple similarity, and Scott rank.
//
// The universe holds every restriction-closed partial isomorphism generated
// by at most domCap = maxTupleLen + maxAlpha*moveCap pairs; with that bound
// the finite refinement agrees exactly with the unbounded definition at the
// levels and tuple lengths the caps admit (each level strips at most
// moveCap-many fresh sections from a witness).
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "workbench/bitset.hpp"
#include "workbench/presheaf.hpp"

namespace wb {

using IsoPairs = std::vector<std::pair<Sec, Sec>>;  // sorted, restriction-closed

std::uint64_t defaultSearchBudget();  // WORKBENCH_MAX_SEARCH or a fixed default

struct BackForthConfig {
  int moveCap = 1;      // longest move tuple in refinement and games (mu - 1)
  int maxTupleLen = 2;  // longest anchor tuple for similarity queries
  int maxAlpha = 3;     // deepest refinement level the universe must support
  bool q0ExtentVariant = false;  // level 0 keyed by the domain's extent meet
  std::uint64_t searchBudget = defaultSearchBudget();
};

class QTable {
public:
  // Structures must share the signature and algebra and be distinct objects
  // (compare a structure with itself via Structure::clone).
  QTable(StructurePtr m, StructurePtr n, BackForthConfig cfg);

  const Structure& M() const { return *m_; }
  const Structure& N() const { return *n_; }
  const BackForthConfig& config() const { return cfg_; }

  int universeSize() const { return static_cast<int>(isos_.size()); }
  const IsoPairs& isoPairs(int id) const { return isos_[static_cast<std::size_t>(id)]; }

  // Canonical id of the restriction closure of the given pairs; nullopt when
  // the closure is not a partial isomorphism.
  std::optional<int> closeAndFind(const IsoPairs& pairs) const;

  bool inQ(int alpha, Elem p, int isoId);
  std::vector<int> levelMembers(int alpha, Elem p);

  // Least level whose table equals the next one (all further levels agree).
  int stabilization();

  // Cover machinery, also used by the game module.  side 0 means the tuple
  // lives in M (forth), side 1 in N (back).  Returns, for each q with a
  // witness in Q_alpha(q) extending isoId's q-slice and covering the tuple,
  // that q and the smallest such witness.
  struct CoverPiece {
    Elem q;
    int witnessIso;
  };
  std::vector<CoverPiece> feasibleCover(int isoId, int alpha, int side,
                                        const std::vector<Sec>& tuple);

  int sliceId(int isoId, Elem q);  // id of the q-stage slice of isoId

  // Plain queries used by the independent game-search solver.
  bool isoContains(int inner, int outer) const {
    return pairBits_[static_cast<std::size_t>(inner)].subsetOf(
        pairBits_[static_cast<std::size_t>(outer)]);
  }
  bool domHas(int isoId, Sec a) const {
    return hasDom_[a].test(static_cast<std::size_t>(isoId));
  }
  bool rngHas(int isoId, Sec b) const {
    return hasRng_[b].test(static_cast<std::size_t>(isoId));
  }

private:
  void buildUniverse();
  void ensureLevel(int alpha);
  bool surviveRefine(int isoId, Elem p, int prevAlpha);
  bool sideOk(int isoId, Elem p, int prevAlpha, int side);
  const Bitset& supersetsOfSlice(int isoId, Elem q);

  StructurePtr m_, n_;
  BackForthConfig cfg_;
  int domCap_;

  std::vector<IsoPairs> isos_;
  std::map<IsoPairs, int> index_;
  std::vector<Bitset> pairBits_;    // per iso: pair codes a*|N|+b
  std::vector<Bitset> supersets_;   // per iso s: bitset over isos u with s subset of u
  std::vector<Bitset> hasDom_;      // per section a of M: isos with a in dom
  std::vector<Bitset> hasRng_;      // per section b of N: isos with b in rng
  std::vector<std::vector<int>> slice_;  // [iso][q] -> iso id, -1 lazily filled

  std::vector<std::vector<Bitset>> levels_;  // [alpha][p] -> membership
  int stabilizedAt_ = -1;
};

struct SimWitness {
  int alpha;
  Elem p;      // the common tuple extent
  int isoId;   // member of Q_alpha(p)
  IsoPairs pairs;
};

// Positional similarity of two same-length tuples; requires equal extents.
std::optional<SimWitness> simAlpha(QTable& qt, const std::vector<Sec>& abar,
                                   const std::vector<Sec>& bbar, int alpha);

struct ScottRankResult {
  int rank;                             // least alpha with gamma stable
  std::vector<std::size_t> gammaTrace;  // |Gamma_alpha| per level
  int tableStabilizedAt;
};

// Scott analysis of one structure against a clone of itself.
ScottRankResult scottRank(const StructurePtr& m, int maxTupleLen,
                          BackForthConfig cfg = {});

}  // namespace wb
