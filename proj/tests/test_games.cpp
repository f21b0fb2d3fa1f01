#include <string>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "workbench/backforth.hpp"
#include "workbench/error.hpp"
#include "workbench/games.hpp"
#include "workbench/workspace.hpp"

using namespace wb;

namespace {

GameSession makeSession(const wbtest::Family& fam, std::vector<Sec> abar,
                        std::vector<Sec> bbar, int alpha) {
  GameConfig cfg;
  cfg.m = fam.at(0);
  cfg.n = fam.at(1);
  cfg.abar = std::move(abar);
  cfg.bbar = std::move(bbar);
  cfg.alpha = alpha;
  cfg.moveCap = 1;
  return GameSession(std::move(cfg));
}

bool logContains(const Transcript& tr, const std::string& needle) {
  for (const auto& line : tr.log)
    if (line.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("both solvers agree and match the refinement depth on pure sets") {
  auto fam = wbtest::pureSetFamily({2, 3});
  for (int alpha = 0; alpha <= 3; ++alpha) {
    auto session = makeSession(fam, {}, {}, alpha);
    Winner table = session.solve(SolveMode::Table);
    Winner search = session.solve(SolveMode::Search);
    CHECK(table == search);
    // A two-element set survives two rounds against a three-element one
    // and loses the third.
    CHECK(table == (alpha <= 2 ? Winner::II : Winner::I));
  }
}

TEST_CASE("anchored starts follow tuple similarity") {
  auto fam = wbtest::pureSetFamily({2, 3});
  Sec a0 = fam.at(0)->sectionExpr("x0");
  Sec b2 = fam.at(1)->sectionExpr("x2");
  for (int alpha = 1; alpha <= 2; ++alpha) {
    auto session = makeSession(fam, {a0}, {b2}, alpha);
    Winner table = session.solve(SolveMode::Table);
    CHECK(table == session.solve(SolveMode::Search));
    bool similar = simAlpha(session.table(), {a0}, {b2}, alpha).has_value();
    CHECK((table == Winner::II) == similar);
    CHECK(table == (alpha == 1 ? Winner::II : Winner::I));
  }
}

TEST_CASE("the chain fixture separates as soon as play begins") {
  auto ws = loadWorkspace(wbtest::kChainWorkspace);
  wbtest::Family fam{nullptr, nullptr, {ws.structurePtr("M"), ws.structurePtr("N")}};
  for (int alpha = 0; alpha <= 2; ++alpha) {
    auto session = makeSession(fam, {}, {}, alpha);
    Winner table = session.solve(SolveMode::Table);
    CHECK(table == session.solve(SolveMode::Search));
    // R(a) differs at the top, so the first unanswered move already wins.
    CHECK(table == (alpha == 0 ? Winner::II : Winner::I));
  }
}

TEST_CASE("a start map that is not a partial isomorphism loses outright") {
  auto fam = wbtest::pureSetFamily({2, 2});
  Sec a0 = fam.at(0)->sectionExpr("x0");
  Sec b0 = fam.at(1)->sectionExpr("x0");
  Sec b1 = fam.at(1)->sectionExpr("x1");
  auto bad = makeSession(fam, {a0, a0}, {b0, b1}, 2);
  CHECK_FALSE(bad.initialState().has_value());
  CHECK(bad.solve(SolveMode::Table) == Winner::I);
  CHECK(bad.solve(SolveMode::Search) == Winner::I);
  ScriptedMoveSource quiet({});
  auto tr = bad.play(-1, quiet);
  CHECK(tr.winner == Winner::I);
  CHECK(logContains(tr, "not a partial isomorphism"));

  // Mismatched anchor extents also yield no start position.
  Sec bBot = fam.at(1)->restrict(b0, fam.omega->bot());
  auto off = makeSession(fam, {a0}, {bBot}, 2);
  CHECK_FALSE(off.initialState().has_value());
  CHECK(off.solve(SolveMode::Search) == Winner::I);
}

TEST_CASE("machine versus machine play realizes the solved winner") {
  auto fam = wbtest::pureSetFamily({2, 3});
  {
    auto session = makeSession(fam, {}, {}, 2);
    ScriptedMoveSource quiet({});
    auto tr = session.play(-1, quiet);
    CHECK(tr.winner == Winner::II);
    CHECK(tr.log.front() == "game: Set2 vs Set3 alpha=2 moveCap=1");
    CHECK(logContains(tr, "player I cannot move (budget 0); player II wins"));
  }
  {
    auto session = makeSession(fam, {}, {}, 3);
    ScriptedMoveSource quiet({});
    auto tr = session.play(-1, quiet);
    CHECK(tr.winner == Winner::I);
    CHECK(logContains(tr, "player II has no legal cover; player I wins"));
  }
}

TEST_CASE("move legality is enforced for player I") {
  auto fam = wbtest::pureSetFamily({2, 3});
  auto session = makeSession(fam, {}, {}, 2);
  auto st = *session.initialState();
  Sec a0 = fam.at(0)->sectionExpr("x0");

  MoveI good{1, 0, {a0}};
  CHECK(session.checkMoveI(st, good).empty());

  GameState broke{st.isoId, st.q, 0};
  CHECK(session.checkMoveI(broke, good) ==
        "player I cannot move: the budget is 0");
  MoveI lazy{2, 0, {a0}};
  CHECK(session.checkMoveI(st, lazy).find("strictly below") !=
        std::string::npos);
  MoveI lost{1, 2, {a0}};
  CHECK(session.checkMoveI(st, lost) == "side must be M or N");
  MoveI empty{1, 0, {}};
  CHECK(session.checkMoveI(st, empty) == "move tuples are nonempty");
  MoveI wide{1, 0, {a0, a0}};
  CHECK(session.checkMoveI(st, wide).find("length at most 1") !=
        std::string::npos);
  GameState low{st.isoId, fam.omega->bot(), 2};
  CHECK(session.checkMoveI(low, good).find("does not live below") !=
        std::string::npos);
}

TEST_CASE("cover legality is enforced for player II") {
  auto fam = wbtest::pureSetFamily({2, 3});
  auto session = makeSession(fam, {}, {}, 2);
  auto st = *session.initialState();
  Sec a0 = fam.at(0)->sectionExpr("x0");
  Sec b0 = fam.at(1)->sectionExpr("x0");
  Sec b1 = fam.at(1)->sectionExpr("x1");
  MoveI mv{1, 0, {a0}};

  auto reply = session.machineReplyII(st, mv);
  REQUIRE(reply.has_value());
  CHECK(session.checkMoveII(st, mv, *reply).empty());
  auto all = session.legalMovesII(st, mv);
  CHECK_FALSE(all.empty());
  for (const auto& cand : all) CHECK(session.checkMoveII(st, mv, cand).empty());

  auto pairIso = session.table().closeAndFind({{a0, b0}});
  REQUIRE(pairIso.has_value());

  MoveII shortReply{{{fam.omega->top(), {}, *pairIso}}};
  CHECK(session.checkMoveII(st, mv, shortReply).find("length") !=
        std::string::npos);
  MoveII offStage{{{fam.omega->bot(), {b0}, *pairIso}}};
  CHECK(session.checkMoveII(st, mv, offStage)
            .find("extent must equal its stage") != std::string::npos);
  MoveII misMapped{{{fam.omega->top(), {b1}, *pairIso}}};
  CHECK(session.checkMoveII(st, mv, misMapped)
            .find("map the moved tuple pointwise") != std::string::npos);

  Sec aBot = fam.at(0)->restrict(a0, fam.omega->bot());
  Sec bBot = fam.at(1)->restrict(b0, fam.omega->bot());
  auto botIso = session.table().closeAndFind({{aBot, bBot}});
  REQUIRE(botIso.has_value());
  MoveII tooLow{{{fam.omega->bot(), {bBot}, *botIso}}};
  CHECK(session.checkMoveII(st, mv, tooLow).find("join to the moved tuple") !=
        std::string::npos);
}

TEST_CASE("a cover piece must extend the current isomorphism's slice") {
  auto fam = wbtest::pureSetFamily({2, 3});
  Sec a0 = fam.at(0)->sectionExpr("x0");
  Sec a1 = fam.at(0)->sectionExpr("x1");
  Sec b0 = fam.at(1)->sectionExpr("x0");
  Sec b1 = fam.at(1)->sectionExpr("x1");
  auto session = makeSession(fam, {a0}, {b0}, 1);
  auto st = *session.initialState();
  MoveI mv{0, 0, {a1}};
  // An isomorphism holding only x1 -> x1 drops the anchored pair.
  auto loose = session.table().closeAndFind({{a1, b1}});
  REQUIRE(loose.has_value());
  MoveII drifting{{{fam.omega->top(), {b1}, *loose}}};
  CHECK(session.checkMoveII(st, mv, drifting).find("must extend the stage") !=
        std::string::npos);
}

TEST_CASE("legal move enumeration stays within the caps") {
  auto fam = wbtest::pureSetFamily({2, 3});
  auto session = makeSession(fam, {}, {}, 2);
  auto st = *session.initialState();
  auto moves = session.legalMovesI(st);
  // Two budgets times the 3 + 4 sections of the two carriers.
  CHECK(moves.size() == 14);
  for (const auto& mv : moves) {
    CHECK(mv.alphaNext < st.bound);
    CHECK(!mv.tuple.empty());
    CHECK(session.checkMoveI(st, mv).empty());
  }
  GameState spent{st.isoId, st.q, 0};
  CHECK(session.legalMovesI(spent).empty());
}

TEST_CASE("scripted play validates human moves for player I") {
  auto fam = wbtest::pureSetFamily({2, 3});
  {
    auto session = makeSession(fam, {}, {}, 1);
    ScriptedMoveSource src({"nonsense", "alpha=1 side=M s=x0",
                            "alpha=0 side=M s=x0", "0"});
    auto tr = session.play(0, src);
    CHECK(tr.winner == Winner::II);
    CHECK(logContains(tr, "rejected: expected key=value tokens"));
    CHECK(logContains(tr, "illegal move: the new budget must be strictly"));
    CHECK(logContains(tr, "I: alpha=0 side=M s=(x0)"));
    CHECK(logContains(tr, "player I cannot move (budget 0); player II wins"));
  }
  {
    auto session = makeSession(fam, {}, {}, 1);
    ScriptedMoveSource src({});
    auto tr = session.play(0, src);
    CHECK(tr.winner == Winner::II);
    CHECK(logContains(tr, "player I resigns"));
  }
}

TEST_CASE("scripted play validates human covers for player II") {
  auto fam = wbtest::pureSetFamily({2, 3});
  // Predict the machine's opening on an identical twin session.
  auto twin = makeSession(fam, {}, {}, 1);
  auto opening = twin.machineMoveI(*twin.initialState());
  REQUIRE(opening.has_value());
  REQUIRE(opening->side == 0);
  REQUIRE(opening->tuple.size() == 1);
  std::string moved = fam.at(0)->secName(opening->tuple[0]);
  REQUIRE(moved == "x0");

  auto session = makeSession(fam, {}, {}, 1);
  ScriptedMoveSource src({"empty", "q=top t=x0"});
  auto tr = session.play(1, src);
  CHECK(tr.winner == Winner::II);
  CHECK(logContains(tr, "illegal cover: the stages of the cover must join"));
  CHECK(logContains(tr, "II: {q=top t=(x0)}"));

  auto giveUp = makeSession(fam, {}, {}, 1);
  ScriptedMoveSource silent({});
  auto tr2 = giveUp.play(1, silent);
  CHECK(tr2.winner == Winner::I);
  CHECK(logContains(tr2, "player II resigns"));
}

TEST_CASE("session construction validates the start tuples") {
  auto fam = wbtest::pureSetFamily({2, 3});
  GameConfig cfg;
  cfg.m = fam.at(0);
  cfg.n = fam.at(1);
  cfg.abar = {fam.at(0)->sectionExpr("x0")};
  cfg.alpha = 1;
  CHECK_THROWS_AS(GameSession(std::move(cfg)), ConfigError);
}
