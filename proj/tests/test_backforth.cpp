#include <memory>
#include <vector>

#include "doctest.h"
#include "support/classical_ef.hpp"
#include "support/fixtures.hpp"
#include "workbench/backforth.hpp"
#include "workbench/error.hpp"
#include "workbench/heyting.hpp"
#include "workbench/presheaf.hpp"
#include "workbench/workspace.hpp"

using namespace wb;

namespace {

BackForthConfig cfg(int maxAlpha, int maxTupleLen = 2, int moveCap = 1) {
  BackForthConfig c;
  c.moveCap = moveCap;
  c.maxTupleLen = maxTupleLen;
  c.maxAlpha = maxAlpha;
  return c;
}

}  // namespace

TEST_CASE("pure sets two vs three: universe and refinement") {
  auto fam = wbtest::pureSetFamily({2, 3});
  QTable qt(fam.at(0), fam.at(1), cfg(4));
  // By hand: the empty map, the bottom pair alone, 2*3 singleton closures
  // and 3*2 two-element matchings.
  CHECK(qt.universeSize() == 14);

  Elem top = fam.omega->top(), bot = fam.omega->bot();
  // Derived by hand: matchings of size two die first, then singletons,
  // then even the empty map once the spoiler has three rounds.
  CHECK(qt.levelMembers(0, top).size() == 14);
  CHECK(qt.levelMembers(1, top).size() == 8);
  CHECK(qt.levelMembers(2, top).size() == 2);
  CHECK(qt.levelMembers(3, top).size() == 0);
  // The bottom stage never separates anything.
  for (int a = 0; a <= 4; ++a) CHECK(qt.levelMembers(a, bot).size() == 14);
  CHECK(qt.stabilization() == 3);

  // Levels are nested.
  for (int a = 0; a < 4; ++a)
    for (Elem p : fam.omega->elements()) {
      auto next = qt.levelMembers(a + 1, p);
      for (int id : next) CHECK(qt.inQ(a, p, id));
    }
}

TEST_CASE("top-stage membership agrees with the classical game") {
  auto fam = wbtest::pureSetFamily({2, 3});
  QTable qt(fam.at(0), fam.at(1), cfg(4));
  Elem top = fam.omega->top();
  for (int id = 0; id < qt.universeSize(); ++id) {
    std::vector<Sec> abar, bbar;
    for (const auto& [a, b] : qt.isoPairs(id)) {
      abar.push_back(a);
      bbar.push_back(b);
    }
    for (int alpha = 0; alpha <= 4; ++alpha) {
      INFO("iso ", id, " alpha ", alpha);
      CHECK(qt.inQ(alpha, top, id) ==
            wbtest::efEquivalent(*fam.at(0), *fam.at(1), abar, bbar, alpha));
    }
  }
}

TEST_CASE("closeAndFind closes under restriction and rejects non-isos") {
  auto fam = wbtest::pureSetFamily({2, 3});
  QTable qt(fam.at(0), fam.at(1), cfg(3));
  const auto& m = *fam.at(0);
  const auto& n = *fam.at(1);
  Sec a0 = m.sectionExpr("x0");
  Sec b0 = n.sectionExpr("x0"), b1 = n.sectionExpr("x1");

  auto id = qt.closeAndFind({{a0, b1}});
  REQUIRE(id.has_value());
  // The closure picked up the bottom restriction pair.
  Sec mBot = m.restrict(a0, fam.omega->bot());
  CHECK(qt.domHas(*id, mBot));
  CHECK(qt.domHas(*id, a0));
  CHECK(qt.rngHas(*id, b1));

  // One element cannot map to two distinct elements.
  CHECK_FALSE(qt.closeAndFind({{a0, b0}, {a0, b1}}).has_value());
}

TEST_CASE("feasible covers exist exactly while the witness level allows") {
  auto fam = wbtest::pureSetFamily({2, 3});
  QTable qt(fam.at(0), fam.at(1), cfg(4));
  auto empty = qt.closeAndFind({});
  REQUIRE(empty.has_value());
  Sec a0 = fam.at(0)->sectionExpr("x0");
  // After the move x0 the needed witness is a singleton: those live in Q_1
  // but not in Q_2.
  auto joinOf = [&](const std::vector<QTable::CoverPiece>& ps) {
    Elem e = fam.omega->bot();
    for (const auto& piece : ps) e = fam.omega->join(e, piece.q);
    return e;
  };
  auto ok = qt.feasibleCover(*empty, 1, 0, {a0});
  CHECK(joinOf(ok) == fam.omega->top());
  bool witnessCovers = false;
  for (const auto& piece : ok)
    if (piece.q == fam.omega->top() && qt.domHas(piece.witnessIso, a0))
      witnessCovers = true;
  CHECK(witnessCovers);
  // At depth two the singleton witnesses are gone, so only the bottom
  // stage remains feasible and the move is uncoverable.
  auto dead = qt.feasibleCover(*empty, 2, 0, {a0});
  CHECK(joinOf(dead) == fam.omega->bot());
}

TEST_CASE("similarity of anchored tuples follows the levels") {
  auto fam = wbtest::pureSetFamily({2, 3});
  QTable qt(fam.at(0), fam.at(1), cfg(3));
  // Empty anchors: equivalent through depth two, separated at three.
  for (int a = 0; a <= 2; ++a) CHECK(simAlpha(qt, {}, {}, a).has_value());
  auto w = simAlpha(qt, {}, {}, 2);
  REQUIRE(w.has_value());
  CHECK(w->alpha == 2);
  CHECK(w->p == fam.omega->top());
  CHECK_FALSE(simAlpha(qt, {}, {}, 3).has_value());

  // Anchored singletons survive one extra stripping round less.
  Sec a0 = fam.at(0)->sectionExpr("x0");
  Sec b2 = fam.at(1)->sectionExpr("x2");
  CHECK(simAlpha(qt, {a0}, {b2}, 1).has_value());
  CHECK_FALSE(simAlpha(qt, {a0}, {b2}, 2).has_value());
}

TEST_CASE("similarity rejects malformed queries") {
  auto fam = wbtest::pureSetFamily({2, 2});
  QTable qt(fam.at(0), fam.at(1), cfg(2, 1));
  Sec a0 = fam.at(0)->sectionExpr("x0");
  Sec b0 = fam.at(1)->sectionExpr("x0");
  Sec bBot = fam.at(1)->restrict(b0, fam.omega->bot());
  CHECK_THROWS_AS(simAlpha(qt, {a0}, {}, 1), ConfigError);
  CHECK_THROWS_AS(simAlpha(qt, {a0, a0}, {b0, b0}, 1), ConfigError);  // cap
  CHECK_THROWS_AS(simAlpha(qt, {a0}, {bBot}, 1), ConfigError);  // extents
}

TEST_CASE("construction enforces shared context and distinct objects") {
  auto fam = wbtest::pureSetFamily({2, 2});
  auto other = wbtest::pureSetFamily({2});
  CHECK_THROWS_AS(QTable(fam.at(0), fam.at(0), cfg(2)), CrossStructureError);
  CHECK_THROWS_AS(QTable(fam.at(0), other.at(0), cfg(2)), CrossStructureError);
  auto clone = fam.at(0)->clone("copy");
  QTable qt(fam.at(0), clone, cfg(2));
  CHECK(qt.universeSize() > 0);
  BackForthConfig bad;
  bad.moveCap = 0;
  CHECK_THROWS_AS(QTable(fam.at(0), fam.at(1), bad), ConfigError);
}

TEST_CASE("self-similarity via a clone holds at every level") {
  auto fam = wbtest::pureSetFamily({3});
  auto clone = fam.at(0)->clone("copy");
  QTable qt(fam.at(0), clone, cfg(3));
  Sec a0 = fam.at(0)->sectionExpr("x0");
  Sec c1 = clone->sectionExpr("x1");
  for (int a = 0; a <= 3; ++a) {
    CHECK(simAlpha(qt, {}, {}, a).has_value());
    // Any element maps to any other: pure sets are homogeneous.
    CHECK(simAlpha(qt, {a0}, {c1}, a).has_value());
  }
}

TEST_CASE("scott rank of pure sets matches the classical computation") {
  for (int k : {1, 2, 3}) {
    auto fam = wbtest::pureSetFamily({k});
    auto res = scottRank(fam.at(0), 1, cfg(4, 1));
    CHECK(res.rank == wbtest::efScottRank(*fam.at(0), 1, 4));
    // Gamma counts non-equivalent pairs, so refinement only grows them.
    for (std::size_t i = 0; i + 1 < res.gammaTrace.size(); ++i)
      CHECK(res.gammaTrace[i] <= res.gammaTrace[i + 1]);
    CHECK(res.tableStabilizedAt >= 0);
  }
}

TEST_CASE("a three-element strict order has rank one") {
  // Worked out by hand: all singletons look alike atomically (R(x,x) is
  // false everywhere), but one round of play separates the endpoints from
  // the middle, and nothing changes after that.
  auto omega = std::make_shared<HeytingAlgebra>(makeOmega2());
  auto sig = std::make_shared<Signature>();
  sig->name = "Ord";
  sig->rels.push_back({"R", 2});
  StructureBuilder b(*omega, *sig, "L3");
  for (const char* s : {"a", "b", "c"}) b.addSection(s, omega->top());
  b.setRel("R", {"a", "b"}, omega->top());
  b.setRel("R", {"b", "c"}, omega->top());
  b.setRel("R", {"a", "c"}, omega->top());
  auto [m, report] = b.build();
  REQUIRE(report.ok());
  auto res = scottRank(m, 1, cfg(4, 1));
  CHECK(res.rank == 1);
  CHECK(res.rank == wbtest::efScottRank(*m, 1, 4));
}

TEST_CASE("scott rank on a non-classical fixture is stable and monotone") {
  auto ws = loadWorkspace(wbtest::kChainWorkspace);
  auto m = ws.structurePtr("M");
  auto res = scottRank(m, 1, cfg(4, 1));
  CHECK(res.rank >= 0);
  CHECK(res.rank <= 4);
  for (std::size_t i = 0; i + 1 < res.gammaTrace.size(); ++i)
    CHECK(res.gammaTrace[i] <= res.gammaTrace[i + 1]);
  // Rank is the first repeat in the trace.
  if (res.rank + 1 < static_cast<int>(res.gammaTrace.size()))
    CHECK(res.gammaTrace[static_cast<std::size_t>(res.rank)] ==
          res.gammaTrace[static_cast<std::size_t>(res.rank) + 1]);
}

TEST_CASE("the level-zero extent variant keys by domain extent") {
  auto ws = loadWorkspace(wbtest::kChainWorkspace);
  auto m = ws.structurePtr("M");
  auto n = ws.structurePtr("N");
  auto variant = cfg(2);
  variant.q0ExtentVariant = true;
  QTable qt(m, n, variant);
  QTable plain(m, n, cfg(2));
  CHECK(qt.universeSize() == plain.universeSize());
  Elem mid = m->omega().elemOrThrow("m");
  // With the variant, membership at stage p requires the domain extent to
  // reach p; the plain table admits everything at level 0.
  CHECK(plain.levelMembers(0, mid).size() ==
        static_cast<std::size_t>(plain.universeSize()));
  CHECK(qt.levelMembers(0, mid).size() <
        static_cast<std::size_t>(qt.universeSize()));
  // Nesting still holds level over level.
  for (int a = 0; a < 2; ++a)
    for (Elem p : m->omega().elements())
      for (int id : qt.levelMembers(a + 1, p)) CHECK(qt.inQ(a, p, id));
}
