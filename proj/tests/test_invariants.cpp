#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "workbench/error.hpp"
#include "workbench/invariants.hpp"
#include "workbench/semantics.hpp"
#include "workbench/syntax.hpp"
#include "workbench/workspace.hpp"

using namespace wb;

namespace {

struct ChainPair {
  Workspace ws;
  const Structure* m;
  const Structure* n;
  Sec aM, aN, bM;
  Elem top, mid;

  ChainPair() : ws(loadWorkspace(wbtest::kChainWorkspace)) {
    m = &ws.structure("M");
    n = &ws.structure("N");
    aM = m->sectionExpr("a");
    aN = n->sectionExpr("a");
    bM = m->sectionExpr("b");
    top = m->omega().top();
    mid = m->omega().elemOrThrow("m");
  }
};

}  // namespace

TEST_CASE("the base table holds the raw interpreted atomic values") {
  ChainPair fx;
  InvariantEngine eng({fx.m, fx.n}, 1, 0);
  auto tM = eng.table(*fx.m, {fx.aM});
  CHECK(tM.base.size() == 2);
  CHECK(tM.base.at("v0 = v0") == fx.top);
  CHECK(tM.base.at("R(v0)") == fx.mid);
  CHECK(tM.slabs.empty());
  CHECK(tM.structureName == "M");
  CHECK(tM.anchorText == "a");
  CHECK(tM.anchorExtent == fx.top);

  auto tN = eng.table(*fx.n, {fx.aN});
  CHECK(tN.base.at("R(v0)") == fx.top);

  auto cmp = compareInvariants(tM, tN);
  CHECK_FALSE(cmp.equal);
  REQUIRE(cmp.firstDivergence.has_value());
  CHECK(cmp.firstDivergence->level == 0);
  CHECK(cmp.firstDivergence->key == "R(v0)");
  CHECK(cmp.firstDivergence->left == fx.mid);
  CHECK(cmp.firstDivergence->right == fx.top);

  CHECK_FALSE(eng.equal(*fx.m, {fx.aM}, *fx.n, {fx.aN}));
  CHECK(eng.equal(*fx.m, {fx.aM}, *fx.m, {fx.aM}));
}

TEST_CASE("two versus three pure sets diverge exactly at level three") {
  auto fam = wbtest::pureSetFamily({2, 3});
  const Structure& two = *fam.at(0);
  const Structure& three = *fam.at(1);

  for (int alpha = 0; alpha <= 2; ++alpha) {
    InvariantEngine eng({&two, &three}, 0, alpha);
    CHECK(eng.equal(two, {}, three, {}));
  }
  InvariantEngine eng3({&two, &three}, 0, 3);
  CHECK_FALSE(eng3.equal(two, {}, three, {}));

  auto cmp = compareInvariants(eng3.table(two, {}), eng3.table(three, {}));
  CHECK_FALSE(cmp.equal);
  REQUIRE(cmp.firstDivergence.has_value());
  CHECK(cmp.firstDivergence->level == 3);
}

TEST_CASE("tables of lower alpha are prefixes of deeper tables") {
  auto fam = wbtest::pureSetFamily({2, 3});
  const Structure& two = *fam.at(0);
  const Structure& three = *fam.at(1);
  InvariantEngine shallow({&two, &three}, 0, 2);
  InvariantEngine deep({&two, &three}, 0, 3);
  auto t2 = shallow.table(two, {});
  auto t3 = deep.table(two, {});
  CHECK(t2.base == t3.base);
  for (const auto& [k, v] : t2.slabs) {
    auto it = t3.slabs.find(k);
    REQUIRE(it != t3.slabs.end());
    CHECK(it->second == v);
  }
  CHECK(t3.slabs.size() > t2.slabs.size());
}

TEST_CASE("characteristic sentences force themselves at the anchor extent") {
  ChainPair fx;
  InvariantEngine eng({fx.m, fx.n}, 1, 2);
  auto self = eng.sentenceValuesAt(*fx.m, {fx.aM}, *fx.m, {fx.aM});
  REQUIRE(self.size() == 3);
  for (Elem v : self) CHECK(v == fx.top);

  // The anchored-at-b sentence can only reach E(b) = m.
  auto selfB = eng.sentenceValuesAt(*fx.m, {fx.bM}, *fx.m, {fx.bM});
  for (Elem v : selfB) CHECK(v == fx.mid);
}

TEST_CASE("sentences separate the chain structures in both directions") {
  ChainPair fx;
  InvariantEngine eng({fx.m, fx.n}, 1, 1);
  auto mInN = eng.sentenceValuesAt(*fx.m, {fx.aM}, *fx.n, {fx.aN});
  auto nInM = eng.sentenceValuesAt(*fx.n, {fx.aN}, *fx.m, {fx.aM});
  REQUIRE(mInN.size() == 2);
  for (Elem v : mInN) CHECK(v != fx.top);
  for (Elem v : nInM) CHECK(v != fx.top);
}

TEST_CASE("sentence levels share structure and match fresh evaluation") {
  ChainPair fx;
  InvariantEngine eng({fx.m, fx.n}, 1, 2);
  auto levels = eng.sentenceLevels(*fx.m, {fx.aM});
  REQUIRE(levels.size() == 3);
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    REQUIRE(levels[k + 1]->kind() == Formula::Kind::BigAnd);
    CHECK(levels[k + 1]->members().front().get() == levels[k].get());
  }

  // The cached evaluation path must agree with a fresh evaluator.
  auto vals = eng.sentenceValuesAt(*fx.m, {fx.aM}, *fx.n, {fx.aN});
  REQUIRE(vals.size() == levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k)
    CHECK(vals[k] == eval(*fx.n, levels[k], {{0, fx.aN}}));
}

TEST_CASE("comparison refuses mismatched domains and parameters") {
  ChainPair fx;
  InvariantEngine eng({fx.m, fx.n}, 1, 1);
  auto tA = eng.table(*fx.m, {fx.aM});
  auto tB = eng.table(*fx.m, {fx.bM});
  CHECK_THROWS_AS(compareInvariants(tA, tB), IncomparableDomains);  // extents

  InvariantEngine eng0({fx.m, fx.n}, 0, 1);
  CHECK_THROWS_AS(compareInvariants(tA, eng0.table(*fx.m, {})),
                  IncomparableDomains);  // lengths

  InvariantEngine engDeep({fx.m, fx.n}, 1, 2);
  CHECK_THROWS_AS(compareInvariants(tA, engDeep.table(*fx.m, {fx.aM})),
                  ConfigError);  // alpha

  InvariantEngine engSolo({fx.m}, 1, 1);
  CHECK_THROWS_AS(compareInvariants(tA, engSolo.table(*fx.m, {fx.aM})),
                  ConfigError);  // probe classes
}

TEST_CASE("engine construction and queries validate their inputs") {
  ChainPair fx;
  CHECK_THROWS_AS(InvariantEngine({}, 0, 1), ConfigError);
  InvariantCaps lame;
  lame.moveCap = 0;
  CHECK_THROWS_AS(InvariantEngine({fx.m}, 0, 1, lame), ConfigError);

  // A separately loaded workspace yields distinct algebra instances.
  auto other = loadWorkspace(wbtest::kChainWorkspace);
  CHECK_THROWS_AS(InvariantEngine({fx.m, &other.structure("N")}, 0, 1),
                  CrossStructureError);

  InvariantEngine eng({fx.m, fx.n}, 1, 1);
  CHECK_THROWS_AS(eng.table(*fx.m, {}), ConfigError);  // anchor length
  CHECK_THROWS_AS(eng.table(other.structure("M"), {fx.aM}), ConfigError);
}

TEST_CASE("one-shot helpers agree with an explicitly built engine") {
  ChainPair fx;
  InvariantEngine eng({fx.m, fx.n}, 1, 1);
  auto viaHelper = gInvariant(*fx.m, *fx.n, {fx.aM}, 1);
  CHECK(renderInvariantTable(viaHelper, fx.m->omega()) ==
        renderInvariantTable(eng.table(*fx.m, {fx.aM}), fx.m->omega()));

  auto fam = wbtest::pureSetFamily({2, 3});
  const Structure& two = *fam.at(0);
  const Structure& three = *fam.at(1);
  InvariantEngine eng2({&two, &three}, 0, 2);
  auto hv = hInvariant({&two, &three}, two, {}, 2);
  CHECK(renderInvariantTable(hv, *fam.omega) ==
        renderInvariantTable(eng2.table(two, {}), *fam.omega));
  auto sent = scottSentence({&two, &three}, two, {}, 2);
  CHECK(sameFormula(sent, eng2.sentence(two, {})));
}

TEST_CASE("rendering is deterministic and names every value") {
  ChainPair fx;
  InvariantEngine one({fx.m, fx.n}, 1, 1);
  InvariantEngine twoEng({fx.m, fx.n}, 1, 1);
  auto ra = renderInvariantTable(one.table(*fx.m, {fx.aM}), fx.m->omega());
  auto rb = renderInvariantTable(twoEng.table(*fx.m, {fx.aM}), fx.m->omega());
  CHECK(ra == rb);
  CHECK(ra.find("invariant M anchor=a extent=top alpha=1") != std::string::npos);
  CHECK(ra.find("base R(v0) = m") != std::string::npos);
  CHECK(ra.find("base v0 = v0 = top") != std::string::npos);
  CHECK(ra.find("level 1 probe=") != std::string::npos);
}

TEST_CASE("sentences refuse constants whose extent is below top") {
  const char* text = R"(
algebra C3 {
  elements: bot, m, top;
  order: bot <= m, m <= top;
}
signature K {
  const k extent m;
}
structure S over C3 sig K {
  section s extent m;
  const k = s;
}
)";
  LoadOptions lax;
  lax.laxConstants = true;
  auto ws = loadWorkspace(text, lax);
  const Structure& s = ws.structure("S");
  InvariantEngine eng({&s}, 0, 1);
  CHECK_NOTHROW(eng.table(s, {}));
  CHECK_THROWS_AS(eng.sentence(s, {}), ConfigError);
}
