#include "workbench/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "workbench/backforth.hpp"
#include "workbench/error.hpp"
#include "workbench/fuzz.hpp"
#include "workbench/games.hpp"
#include "workbench/invariants.hpp"
#include "workbench/parser.hpp"
#include "workbench/rng.hpp"
#include "workbench/semantics.hpp"
#include "workbench/transform.hpp"
#include "workbench/workspace.hpp"

namespace wb {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCounterexample = 2;
constexpr int kExitUsage = 64;

struct Ctx {
  std::ostream& out;
  std::ostream& err;
  std::string format = "text";

  bool json() const { return format == "json"; }
  void emit(const Json& j) const { out << j.dump(2) << "\n"; }
};

HeytingAlgebra makeBuiltin(const std::string& name) {
  if (name == "omega2") return makeOmega2();
  if (name == "chain3") return makeChain3();
  if (name == "diamond") return makeDiamond();
  throw ConfigError("unknown builtin algebra '" + name +
                    "'; available: omega2, chain3, diamond");
}

Workspace loadFrom(const std::vector<std::string>& files, bool lax) {
  if (files.empty())
    throw ConfigError("no workspace files given; pass --in FILE");
  LoadOptions lo;
  lo.laxConstants = lax;
  return loadWorkspaceFiles(files, lo);
}

std::vector<Sec> parseAnchor(const Structure& m, const std::string& spec) {
  if (spec.empty()) return {};
  return m.parseTuple(spec);
}

std::string anchorText(const Structure& m, const std::vector<Sec>& t) {
  return tupleToString(m, t);
}

// Exhaustive a /\ b <= c  <=>  a <= (b -> c) sweep; the constructor already
// guarantees this, the command re-derives it so `check` shows its work.
bool adjunctionHolds(const HeytingAlgebra& o) {
  for (Elem a = 0; a < o.size(); ++a)
    for (Elem b = 0; b < o.size(); ++b)
      for (Elem c = 0; c < o.size(); ++c)
        if (o.leq(o.meet(a, b), c) != o.leq(a, o.implies(b, c))) return false;
  return true;
}

// ---------------------------------------------------------------- check ---

int cmdCheck(const Ctx& ctx, const std::vector<std::string>& files,
             const std::vector<std::string>& builtins, bool lax) {
  if (files.empty() && builtins.empty())
    throw ConfigError("nothing to check; pass workspace files or --builtin");
  bool allOk = true;
  Json j;
  j["builtins"] = Json::array();
  for (const auto& name : builtins) {
    auto alg = makeBuiltin(name);
    bool ok = adjunctionHolds(alg);
    allOk = allOk && ok;
    if (ctx.json())
      j["builtins"].push_back(
          {{"name", name}, {"elements", alg.size()}, {"ok", ok}});
    else
      ctx.out << "builtin algebra " << name << (ok ? " ok (" : " BROKEN (")
              << alg.size() << " elements, adjunction "
              << (ok ? "verified" : "fails") << ")\n";
  }

  j["algebras"] = Json::array();
  j["signatures"] = Json::array();
  j["structures"] = Json::array();
  if (!files.empty()) {
    Workspace ws = loadFrom(files, lax);
    for (const auto& [name, alg] : ws.algebras) {
      bool ok = adjunctionHolds(*alg);
      allOk = allOk && ok;
      if (ctx.json())
        j["algebras"].push_back(
            {{"name", name}, {"elements", alg->size()}, {"ok", ok}});
      else
        ctx.out << "algebra " << name << (ok ? " ok (" : " BROKEN (")
                << alg->size() << " elements)\n";
    }
    for (const auto& [name, sig] : ws.signatures) {
      if (ctx.json())
        j["signatures"].push_back({{"name", name},
                                   {"relations", sig->rels.size()},
                                   {"functions", sig->funs.size()},
                                   {"constants", sig->consts.size()},
                                   {"ok", true}});
      else
        ctx.out << "signature " << name << " ok (" << sig->rels.size()
                << " relations, " << sig->funs.size() << " functions, "
                << sig->consts.size() << " constants)\n";
    }
    for (const auto& [name, m] : ws.structures) {
      auto report = validateStructure(*m);
      allOk = allOk && report.ok();
      if (ctx.json()) {
        Json violations = Json::array();
        for (const auto& v : report.violations)
          violations.push_back({{"law", v.law}, {"detail", v.detail}});
        j["structures"].push_back({{"name", name},
                                   {"carrier", m->carrierSize()},
                                   {"ok", report.ok()},
                                   {"violations", violations}});
      } else if (report.ok()) {
        ctx.out << "structure " << name << " ok (carrier " << m->carrierSize()
                << ", laws verified)\n";
      } else {
        ctx.out << "structure " << name << " INVALID\n" << report.summary();
      }
    }
    for (const auto& issue : ws.issues) {
      allOk = false;
      if (ctx.json()) {
        Json violations = Json::array();
        for (const auto& v : issue.report.violations)
          violations.push_back({{"law", v.law}, {"detail", v.detail}});
        j["structures"].push_back(
            {{"name", issue.name}, {"ok", false}, {"violations", violations}});
      } else {
        ctx.out << "structure " << issue.name << " INVALID\n"
                << issue.report.summary();
      }
    }
  }
  j["ok"] = allOk;
  if (ctx.json()) ctx.emit(j);
  return allOk ? kExitOk : kExitInvalid;
}

// ----------------------------------------------------------------- eval ---

int cmdEval(const Ctx& ctx, const Workspace& ws, const std::string& sname,
            const std::string& ftext, const std::string& at) {
  const Structure& m = ws.structure(sname);
  auto f = parseFormula(ftext, m.sig(), m.omega());
  auto tuple = parseAnchor(m, at);
  auto asg = positionalAssignment(tuple);
  Evaluator ev(m);
  Elem value = ev.eval(f, asg);
  Elem bound =
      m.omega().meet(assignmentExtent(m, asg), formulaExtent(m, f));
  bool forced = value == bound;
  if (ctx.json()) {
    ctx.emit({{"structure", sname},
              {"formula", printFormula(f)},
              {"at", anchorText(m, tuple)},
              {"value", m.omega().name(value)},
              {"bound", m.omega().name(bound)},
              {"forced", forced}});
  } else {
    ctx.out << "value = " << m.omega().name(value) << "\n"
            << "bound = " << m.omega().name(bound) << "\n"
            << "forced: " << (forced ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------- unnest ---

int cmdUnnest(const Ctx& ctx, const Workspace& ws, const std::string& sname,
              const std::string& ftext, const std::string& at) {
  const Structure& m = ws.structure(sname);
  auto f = parseFormula(ftext, m.sig(), m.omega());
  auto g = unnest(f);
  auto tuple = parseAnchor(m, at);
  auto asg = positionalAssignment(tuple);
  Evaluator ev(m);
  Elem before = ev.eval(f, asg);
  Elem after = ev.eval(g, asg);
  bool preserved = before == after;
  if (ctx.json()) {
    ctx.emit({{"input", printFormula(f)},
              {"output", printFormula(g)},
              {"mrankInput", mrank(f)},
              {"qdegreeInput", qdegree(f)},
              {"mrankOutput", mrank(g)},
              {"qdegreeOutput", qdegree(g)},
              {"valueInput", m.omega().name(before)},
              {"valueOutput", m.omega().name(after)},
              {"preserved", preserved}});
  } else {
    ctx.out << "unnested: " << printFormula(g) << "\n"
            << "mrank(input) = " << mrank(f)
            << "  qdegree(input) = " << qdegree(f) << "\n"
            << "mrank(output) = " << mrank(g)
            << "  qdegree(output) = " << qdegree(g) << "\n"
            << "value(input) = " << m.omega().name(before)
            << "  value(output) = " << m.omega().name(after)
            << "  preserved: " << (preserved ? "yes" : "no") << "\n";
  }
  return preserved ? kExitOk : kExitCounterexample;
}

// ----------------------------------------------------------------- rank ---

int cmdRank(const Ctx& ctx, const Workspace& ws, const std::string& signame,
            const std::string& algname, const std::string& ftext) {
  const Signature& sig = ws.signature(signame);
  const HeytingAlgebra& omega = ws.algebra(algname);
  auto f = parseFormula(ftext, sig, omega);
  auto cls = classify(f);
  if (ctx.json()) {
    ctx.emit({{"formula", printFormula(f)},
              {"mrank", mrank(f)},
              {"qdegree", qdegree(f)},
              {"unnested", cls.isUnnested},
              {"ceu", cls.isCeu},
              {"pp", cls.isPP}});
  } else {
    ctx.out << "mrank = " << mrank(f) << "\n"
            << "qdegree = " << qdegree(f) << "\n"
            << "unnested: " << (cls.isUnnested ? "yes" : "no")
            << "  ceu: " << (cls.isCeu ? "yes" : "no")
            << "  pp: " << (cls.isPP ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------- qtable ---

int cmdQTable(const Ctx& ctx, const Workspace& ws, const std::string& mname,
              const std::string& nname, int alpha, int moveCap, int tupleCap) {
  StructurePtr m = ws.structurePtr(mname);
  StructurePtr n = mname == nname ? m->clone(nname + "~")
                                  : ws.structurePtr(nname);
  BackForthConfig cfg;
  cfg.moveCap = moveCap;
  cfg.maxTupleLen = tupleCap < 0 ? 2 : tupleCap;
  cfg.maxAlpha = alpha;
  QTable qt(m, n, cfg);
  Json levels = Json::array();
  if (!ctx.json())
    ctx.out << "universe: " << qt.universeSize()
            << " partial isomorphisms\n";
  const auto& omega = m->omega();
  for (int a = 0; a <= alpha; ++a) {
    Json row;
    row["alpha"] = a;
    if (!ctx.json()) ctx.out << "level " << a << ":";
    for (Elem p = 0; p < omega.size(); ++p) {
      auto members = qt.levelMembers(a, p);
      row[omega.name(p)] = members.size();
      if (!ctx.json())
        ctx.out << " " << omega.name(p) << "=" << members.size();
    }
    if (!ctx.json()) ctx.out << "\n";
    levels.push_back(std::move(row));
  }
  int stab = qt.stabilization();
  if (ctx.json()) {
    ctx.emit({{"m", m->name()},
              {"n", n->name()},
              {"universe", qt.universeSize()},
              {"levels", levels},
              {"stabilizedAt", stab}});
  } else {
    ctx.out << "stabilized at level " << stab << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- equiv ---

int cmdEquiv(const Ctx& ctx, const Workspace& ws, const std::string& mname,
             const std::string& nname, const std::string& abarSpec,
             const std::string& bbarSpec, int alpha, int moveCap) {
  StructurePtr m = ws.structurePtr(mname);
  StructurePtr n = mname == nname ? m->clone(nname + "~")
                                  : ws.structurePtr(nname);
  auto abar = parseAnchor(*m, abarSpec);
  auto bbar = parseAnchor(*n, bbarSpec);
  if (abar.size() != bbar.size())
    throw ConfigError("anchor tuples have different lengths (" +
                      std::to_string(abar.size()) + " vs " +
                      std::to_string(bbar.size()) + ")");
  const auto& omega = m->omega();
  Elem ea = m->tupleExtent(abar);
  Elem eb = n->tupleExtent(bbar);
  if (ea != eb)
    throw ConfigError("anchor extents differ: E a-bar = " + omega.name(ea) +
                      ", E b-bar = " + omega.name(eb));
  int lh = static_cast<int>(abar.size());

  InvariantCaps caps;
  caps.moveCap = moveCap;
  InvariantEngine eng({m.get(), n.get()}, lh, alpha, caps);
  auto cmp = compareInvariants(eng.table(*m, abar), eng.table(*n, bbar));
  int divLevel = cmp.equal ? alpha + 1 : cmp.firstDivergence->level;

  BackForthConfig bf;
  bf.moveCap = moveCap;
  bf.maxTupleLen = lh;
  bf.maxAlpha = alpha;
  QTable qt(m, n, bf);

  auto smInN = eng.sentenceValuesAt(*m, abar, *n, bbar);
  auto snInM = eng.sentenceValuesAt(*n, bbar, *m, abar);

  bool allAgree = true;
  int separatedAt = -1;
  Json rows = Json::array();
  if (!ctx.json()) {
    ctx.out << m->name() << " vs " << n->name() << ": a-bar = "
            << anchorText(*m, abar) << ", b-bar = " << anchorText(*n, bbar)
            << ", extent " << omega.name(ea) << "\n";
    ctx.out << "alpha | invariants | witness | game | sentences | agree\n";
  }
  for (int a = 0; a <= alpha; ++a) {
    bool vInv = divLevel > a;
    bool vWit = simAlpha(qt, abar, bbar, a).has_value();
    GameConfig gc;
    gc.m = m;
    gc.n = n;
    gc.abar = abar;
    gc.bbar = bbar;
    gc.alpha = a;
    gc.moveCap = moveCap;
    GameSession game(gc);
    bool vGame = game.solve(SolveMode::Search) == Winner::II;
    bool vSent = smInN[static_cast<std::size_t>(a)] == eb &&
                 snInM[static_cast<std::size_t>(a)] == ea;
    bool agree = vInv == vWit && vInv == vGame && vInv == vSent;
    allAgree = allAgree && agree;
    if (!vInv && separatedAt < 0) separatedAt = a;
    if (ctx.json()) {
      rows.push_back({{"alpha", a},
                      {"invariants", vInv},
                      {"witness", vWit},
                      {"game", vGame ? "II" : "I"},
                      {"sentences", vSent},
                      {"agree", agree}});
    } else {
      ctx.out << std::left << std::setw(5) << a << " | " << std::setw(10)
              << (vInv ? "eq" : "ne") << " | " << std::setw(7)
              << (vWit ? "yes" : "no") << " | " << std::setw(4)
              << (vGame ? "II" : "I") << " | " << std::setw(9)
              << (vSent ? "forced" : "unforced") << " | "
              << (agree ? "yes" : "NO") << "\n";
    }
  }
  if (ctx.json()) {
    ctx.emit({{"m", m->name()},
              {"n", n->name()},
              {"abar", anchorText(*m, abar)},
              {"bbar", anchorText(*n, bbar)},
              {"extent", omega.name(ea)},
              {"rows", rows},
              {"separatedAt",
               separatedAt < 0 ? Json(nullptr) : Json(separatedAt)},
              {"agreeAll", allAgree}});
  } else if (separatedAt < 0) {
    ctx.out << "verdict: equivalent at every level through alpha = " << alpha
            << "\n";
  } else {
    ctx.out << "verdict: equivalent below alpha = " << separatedAt
            << ", separated at alpha = " << separatedAt << "\n";
  }
  if (!allAgree) {
    ctx.err << "error: the four decision methods disagree; this is a "
               "property counterexample\n";
    return kExitCounterexample;
  }
  return kExitOk;
}

// ----------------------------------------------------------------- game ---

int cmdGame(const Ctx& ctx, const Workspace& ws, const std::string& mname,
            const std::string& nname, const std::string& abarSpec,
            const std::string& bbarSpec, int alpha, int moveCap,
            const std::string& side, const std::vector<std::string>& moves,
            bool interactive) {
  StructurePtr m = ws.structurePtr(mname);
  StructurePtr n = mname == nname ? m->clone(nname + "~")
                                  : ws.structurePtr(nname);
  GameConfig gc;
  gc.m = m;
  gc.n = n;
  gc.abar = parseAnchor(*m, abarSpec);
  gc.bbar = parseAnchor(*n, bbarSpec);
  gc.alpha = alpha;
  gc.moveCap = moveCap;
  GameSession game(gc);
  Winner table = game.solve(SolveMode::Table);
  Winner search = game.solve(SolveMode::Search);
  int humanSide = side == "I" ? 0 : side == "II" ? 1 : -1;

  Json j;
  j["table"] = table == Winner::II ? "II" : "I";
  j["search"] = search == Winner::II ? "II" : "I";
  if (!ctx.json()) {
    ctx.out << "table solver: " << (table == Winner::II ? "II" : "I")
            << " wins\n";
    ctx.out << "search solver: " << (search == Winner::II ? "II" : "I")
            << " wins\n";
  }
  if (humanSide >= 0 || interactive || !moves.empty()) {
    std::unique_ptr<MoveSource> src;
    if (interactive)
      src = std::make_unique<StdinMoveSource>();
    else
      src = std::make_unique<ScriptedMoveSource>(moves);
    Transcript t = game.play(humanSide, *src);
    if (ctx.json()) {
      j["transcript"] = t.log;
      j["winner"] = t.winner == Winner::II ? "II" : "I";
    } else {
      for (const auto& line : t.log) ctx.out << line << "\n";
    }
  }
  if (ctx.json()) ctx.emit(j);
  return kExitOk;
}

// ----------------------------------------------------------- scott-rank ---

int cmdScottRank(const Ctx& ctx, const Workspace& ws, const std::string& mname,
                 int tupleCap, int alpha, int moveCap) {
  StructurePtr m = ws.structurePtr(mname);
  BackForthConfig cfg;
  cfg.moveCap = moveCap;
  cfg.maxAlpha = alpha;
  auto res = scottRank(m, tupleCap < 0 ? 1 : tupleCap, cfg);
  if (ctx.json()) {
    ctx.emit({{"structure", mname},
              {"rank", res.rank},
              {"gammaTrace", res.gammaTrace},
              {"tableStabilizedAt", res.tableStabilizedAt}});
  } else {
    ctx.out << "scott rank = " << res.rank << "\n";
    ctx.out << "gamma trace:";
    for (auto g : res.gammaTrace) ctx.out << " " << g;
    ctx.out << "\n";
    ctx.out << "table stabilized at level " << res.tableStabilizedAt << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------- invariants ---

Json tableToJson(const InvariantTable& t, const HeytingAlgebra& omega) {
  Json base = Json::object();
  for (const auto& [k, v] : t.base) base[k] = omega.name(v);
  Json slabs = Json::array();
  for (const auto& [k, v] : t.slabs)
    slabs.push_back({{"level", k.level + 1},
                     {"probe", t.probeNames[static_cast<std::size_t>(k.probe)]},
                     {"tuple", k.tuple},
                     {"value", omega.name(v)}});
  return {{"structure", t.structureName},
          {"anchor", t.anchorText},
          {"anchorExtent", omega.name(t.anchorExtent)},
          {"alpha", t.alpha},
          {"moveCap", t.moveCap},
          {"base", base},
          {"slabs", slabs}};
}

int cmdInvariants(const Ctx& ctx, const Workspace& ws,
                  const std::string& mname, const std::string& nname,
                  const std::string& abarSpec, const std::string& bbarSpec,
                  int alpha, int moveCap,
                  const std::vector<std::string>& probeNames) {
  const Structure& m = ws.structure(mname);
  const Structure& n = ws.structure(nname);
  auto abar = parseAnchor(m, abarSpec);
  auto bbar = parseAnchor(n, bbarSpec);
  std::vector<const Structure*> probes = {&m, &n};
  for (const auto& p : probeNames) probes.push_back(&ws.structure(p));
  InvariantCaps caps;
  caps.moveCap = moveCap;
  InvariantEngine eng(probes, static_cast<int>(abar.size()), alpha, caps);
  auto ta = eng.table(m, abar);
  auto tb = eng.table(n, bbar);
  auto cmp = compareInvariants(ta, tb);
  if (ctx.json()) {
    Json j;
    j["left"] = tableToJson(ta, m.omega());
    j["right"] = tableToJson(tb, n.omega());
    j["equal"] = cmp.equal;
    if (cmp.firstDivergence)
      j["firstDivergence"] = {
          {"level", cmp.firstDivergence->level},
          {"key", cmp.firstDivergence->key},
          {"left", m.omega().name(cmp.firstDivergence->left)},
          {"right", n.omega().name(cmp.firstDivergence->right)}};
    else
      j["firstDivergence"] = nullptr;
    ctx.emit(j);
  } else {
    ctx.out << renderInvariantTable(ta, m.omega());
    ctx.out << renderInvariantTable(tb, n.omega());
    if (cmp.equal) {
      ctx.out << "tables equal through alpha = " << alpha << "\n";
    } else {
      ctx.out << "tables diverge at level " << cmp.firstDivergence->level
              << ": " << cmp.firstDivergence->key << " = "
              << m.omega().name(cmp.firstDivergence->left) << " vs "
              << n.omega().name(cmp.firstDivergence->right) << "\n";
    }
  }
  return kExitOk;
}

// -------------------------------------------------------- scott-sentence ---

int cmdScottSentence(const Ctx& ctx, const Workspace& ws,
                     const std::string& mname, const std::string& abarSpec,
                     int alpha, int moveCap) {
  const Structure& m = ws.structure(mname);
  auto abar = parseAnchor(m, abarSpec);
  InvariantCaps caps;
  caps.moveCap = moveCap;
  InvariantEngine eng({&m}, static_cast<int>(abar.size()), alpha, caps);
  auto sentence = eng.sentence(m, abar);
  Elem self = eng.sentenceValuesAt(m, abar, m, abar).back();
  Elem ea = m.tupleExtent(abar);
  bool forced = self == ea;
  if (ctx.json()) {
    ctx.emit({{"structure", mname},
              {"anchor", anchorText(m, abar)},
              {"alpha", alpha},
              {"sentence", printFormula(sentence)},
              {"selfValue", m.omega().name(self)},
              {"anchorExtent", m.omega().name(ea)},
              {"forced", forced}});
  } else {
    ctx.out << "sentence (alpha = " << alpha << "): " << printFormula(sentence)
            << "\n";
    ctx.out << "self value = " << m.omega().name(self) << "  anchor extent = "
            << m.omega().name(ea) << "  forced: " << (forced ? "yes" : "no")
            << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- fuzz ---

struct SuiteResult {
  int pass = 0;
  int fail = 0;
  std::vector<std::string> firstCounterexample;

  void failure(std::vector<std::string> lines) {
    ++fail;
    if (firstCounterexample.empty()) firstCounterexample = std::move(lines);
  }
};

// Weakens a conjunction by removing its most constraining member (the one
// with the least value at the assignment), simulating a sentence builder
// that lost a conjunct.
FormulaPtr dropOneConjunct(const Structure& m, const FormulaPtr& f,
                           const Assignment& asg) {
  if (f->kind() != Formula::Kind::BigAnd || f->members().size() < 2) return f;
  Evaluator ev(m);
  std::size_t worst = 0;
  Elem worstVal = m.omega().top();
  for (std::size_t i = 0; i < f->members().size(); ++i) {
    Elem v = ev.eval(f->members()[i], asg);
    if (m.omega().leq(v, worstVal) && v != worstVal) {
      worst = i;
      worstVal = v;
    }
  }
  std::vector<FormulaPtr> rest;
  for (std::size_t i = 0; i < f->members().size(); ++i)
    if (i != worst) rest.push_back(f->members()[i]);
  return Formula::bigAnd(std::move(rest));
}

void fuzzPairs(SuiteResult& r, int count, std::uint64_t seed, InjectedBug bug) {
  for (int k = 0; k < count; ++k) {
    std::uint64_t instanceSeed = seed + static_cast<std::uint64_t>(k);
    Rng rng(instanceSeed);
    auto pair = randomEquivalencePair(rng);
    const auto& m = *pair.m;
    const auto& n = *pair.n;
    int lh = static_cast<int>(pair.abar.size());

    InvariantCaps caps;
    caps.moveCap = pair.moveCap;
    InvariantEngine eng({pair.m.get(), pair.n.get()}, lh, pair.alpha, caps);
    auto cmp = compareInvariants(eng.table(m, pair.abar),
                                 eng.table(n, pair.bbar));
    int divLevel = cmp.equal ? pair.alpha + 1 : cmp.firstDivergence->level;

    BackForthConfig bf;
    bf.moveCap = pair.moveCap;
    bf.maxTupleLen = lh;
    bf.maxAlpha = pair.alpha;
    QTable qt(pair.m, pair.n, bf);

    Elem ea = m.tupleExtent(pair.abar);
    Elem eb = n.tupleExtent(pair.bbar);
    std::vector<Elem> smInN, snInM;
    if (bug == InjectedBug::DropConjunct) {
      auto asgA = positionalAssignment(pair.abar);
      auto asgB = positionalAssignment(pair.bbar);
      Evaluator evalM(m), evalN(n);
      for (auto& s : eng.sentenceLevels(m, pair.abar))
        smInN.push_back(evalN.eval(dropOneConjunct(n, s, asgB), asgB));
      for (auto& s : eng.sentenceLevels(n, pair.bbar))
        snInM.push_back(evalM.eval(dropOneConjunct(m, s, asgA), asgA));
    } else {
      smInN = eng.sentenceValuesAt(m, pair.abar, n, pair.bbar);
      snInM = eng.sentenceValuesAt(n, pair.bbar, m, pair.abar);
    }

    bool instanceOk = true;
    std::vector<std::string> lines;
    for (int a = 0; a <= pair.alpha && instanceOk; ++a) {
      bool vInv = divLevel > a;
      if (bug == InjectedBug::FlipVerdict) vInv = !vInv;
      bool vWit = simAlpha(qt, pair.abar, pair.bbar, a).has_value();
      GameConfig gc;
      gc.m = pair.m;
      gc.n = pair.n;
      gc.abar = pair.abar;
      gc.bbar = pair.bbar;
      gc.alpha = a;
      gc.moveCap = pair.moveCap;
      GameSession game(gc);
      bool vGame = game.solve(SolveMode::Search) == Winner::II;
      bool vSent = smInN[static_cast<std::size_t>(a)] == eb &&
                   snInM[static_cast<std::size_t>(a)] == ea;
      if (vInv != vWit || vInv != vGame || vInv != vSent) {
        instanceOk = false;
        lines.push_back(
            "pairs instance " + std::to_string(k) + " (replay: --mode pairs"
            " --seed " + std::to_string(instanceSeed) + " --count 1):");
        lines.push_back("  alpha " + std::to_string(a) + " of " +
                        std::to_string(pair.alpha) + ": invariants=" +
                        (vInv ? "eq" : "ne") + " witness=" +
                        (vWit ? "yes" : "no") + " game=" + (vGame ? "II" : "I") +
                        " sentences=" + (vSent ? "forced" : "unforced"));
      }
    }
    if (instanceOk)
      ++r.pass;
    else
      r.failure(std::move(lines));
  }
}

void fuzzUnnest(SuiteResult& r, int count, std::uint64_t seed) {
  for (int k = 0; k < count; ++k) {
    std::uint64_t instanceSeed = seed + static_cast<std::uint64_t>(k);
    Rng rng(instanceSeed);
    auto omega = randomDownsetAlgebra(rng, 3, 5);
    auto sig = randomSignature(rng, "S");
    StructureOptions so;
    so.maxGens = 2;
    so.maxCarrier = 6;
    auto m = randomStructure(rng, omega, sig, "M", so);
    FormulaOptions fo;
    fo.varPool = 2;
    fo.omega = &omega;
    auto f = randomFormula(rng, sig, fo);
    auto g = unnest(f);

    std::vector<std::string> lines;
    if (qdegree(g) != mrank(f)) {
      lines.push_back("unnest instance " + std::to_string(k) +
                      " (replay: --mode unnest --seed " +
                      std::to_string(instanceSeed) + " --count 1):");
      lines.push_back("  qdegree(unnest) = " + std::to_string(qdegree(g)) +
                      " but mrank(input) = " + std::to_string(mrank(f)));
    } else if (!classify(g).isUnnested) {
      lines.push_back("unnest instance " + std::to_string(k) +
                      " (replay: --mode unnest --seed " +
                      std::to_string(instanceSeed) + " --count 1):");
      lines.push_back("  output is not unnested: " + printFormula(g));
    } else {
      Evaluator ev(m);
      auto topBox = Formula::box(omega.name(omega.top()), f);
      for (Sec a = 0; a < m.carrierSize() && lines.empty(); ++a) {
        for (Sec b = 0; b < m.carrierSize() && lines.empty(); ++b) {
          Assignment asg;
          asg[0] = a;
          asg[1] = b;
          Elem before = ev.eval(f, asg);
          Elem after = ev.eval(g, asg);
          if (before != after) {
            lines.push_back("unnest instance " + std::to_string(k) +
                            " (replay: --mode unnest --seed " +
                            std::to_string(instanceSeed) + " --count 1):");
            lines.push_back("  value changed at (" + m.secName(a) + ", " +
                            m.secName(b) + "): " + omega.name(before) +
                            " vs " + omega.name(after));
          } else if (ev.eval(topBox, asg) != before) {
            lines.push_back("unnest instance " + std::to_string(k) +
                            " (replay: --mode unnest --seed " +
                            std::to_string(instanceSeed) + " --count 1):");
            lines.push_back("  box-top identity fails at (" + m.secName(a) +
                            ", " + m.secName(b) + ")");
          }
        }
      }
    }
    if (lines.empty())
      ++r.pass;
    else
      r.failure(std::move(lines));
  }
}

void fuzzInvariance(SuiteResult& r, int count, std::uint64_t seed,
                    InjectedBug bug) {
  for (int k = 0; k < count; ++k) {
    std::uint64_t instanceSeed = seed + static_cast<std::uint64_t>(k);
    Rng rng(instanceSeed);
    PairOptions po;
    po.maxCarrier = 6;
    auto pair = randomEquivalencePair(rng, po);
    const auto& m = *pair.m;
    const auto& n = *pair.n;
    const auto& omega = *pair.omega;
    int alpha = pair.alpha;

    BackForthConfig bf;
    bf.moveCap = 1;
    bf.maxTupleLen = 2;
    bf.maxAlpha = alpha;
    QTable qt(pair.m, pair.n, bf);

    std::vector<std::pair<Elem, int>> candidates;
    for (Elem p = 0; p < omega.size(); ++p)
      for (int id : qt.levelMembers(alpha, p))
        if (!qt.isoPairs(id).empty()) candidates.emplace_back(p, id);
    if (candidates.empty()) {
      ++r.pass;  // nothing to test at this instance
      continue;
    }
    auto [p, isoId] = candidates[rng.below(candidates.size())];
    const auto& pairs = qt.isoPairs(isoId);
    int len = rng.range(1, 3);
    std::vector<Sec> abar, bbar;
    bool lookupOk = true;
    for (int i = 0; i < len; ++i) {
      const auto& pr = pairs[rng.below(pairs.size())];
      Sec ar = m.restrict(pr.first, p);
      abar.push_back(ar);
      Sec want = bug == InjectedBug::SkipInverse ? pr.first : ar;
      Sec image = 0;
      bool found = false;
      for (const auto& q : pairs)
        if (q.first == want) {
          image = q.second;
          found = true;
          break;
        }
      lookupOk = lookupOk && found;
      bbar.push_back(image);
    }
    if (!lookupOk) {
      r.failure({"invariance instance " + std::to_string(k) +
                 ": restriction closure lookup failed (internal)"});
      continue;
    }

    FormulaOptions fo;
    fo.maxDepth = 2;
    fo.varPool = len;
    fo.allowCheck = false;
    fo.unnestedOnly = true;
    fo.maxQDegree = alpha;
    fo.omega = &omega;
    auto f = randomFormula(rng, *pair.sig, fo);
    Elem vm = eval(m, f, positionalAssignment(abar));
    Elem vn = eval(n, f, positionalAssignment(bbar));
    if (vm == vn) {
      ++r.pass;
    } else {
      r.failure(
          {"invariance instance " + std::to_string(k) +
               " (replay: --mode invariance --seed " +
               std::to_string(instanceSeed) + " --count 1):",
           "  h in Q_" + std::to_string(alpha) + "(" + omega.name(p) +
               ") maps " + tupleToString(m, abar) + " to " +
               tupleToString(n, bbar) + " but " + printFormula(f) + " = " +
               omega.name(vm) + " vs " + omega.name(vn)});
    }
  }
}

int cmdFuzz(const Ctx& ctx, const std::string& mode, int count,
            std::uint64_t seed, const std::string& bugName) {
  InjectedBug bug = parseInjectedBug(bugName);
  std::vector<std::string> suites;
  if (mode == "all")
    suites = {"pairs", "unnest", "invariance"};
  else
    suites = {mode};

  std::map<std::string, SuiteResult> results;
  for (const auto& suite : suites) {
    SuiteResult r;
    if (suite == "pairs")
      fuzzPairs(r, count, seed, bug);
    else if (suite == "unnest")
      fuzzUnnest(r, count, seed);
    else if (suite == "invariance")
      fuzzInvariance(r, count, seed, bug);
    results.emplace(suite, std::move(r));
  }

  bool ok = true;
  const std::vector<std::string>* firstLines = nullptr;
  for (const auto& suite : suites) {
    const auto& r = results.at(suite);
    ok = ok && r.fail == 0;
    if (!firstLines && !r.firstCounterexample.empty())
      firstLines = &r.firstCounterexample;
  }

  if (ctx.json()) {
    Json j;
    j["mode"] = mode;
    j["count"] = count;
    j["seed"] = seed;
    Json s = Json::object();
    for (const auto& suite : suites)
      s[suite] = {{"pass", results.at(suite).pass},
                  {"fail", results.at(suite).fail}};
    j["suites"] = s;
    j["counterexample"] =
        firstLines ? Json(*firstLines) : Json(nullptr);
    j["ok"] = ok;
    ctx.emit(j);
  } else {
    for (const auto& suite : suites) {
      const auto& r = results.at(suite);
      ctx.out << suite << ": " << r.pass << " pass, " << r.fail << " fail\n";
    }
    if (ok) {
      ctx.out << "all properties hold\n";
    } else if (firstLines) {
      ctx.out << "first counterexample:\n";
      for (const auto& line : *firstLines) ctx.out << "  " << line << "\n";
    }
  }
  return ok ? kExitOk : kExitCounterexample;
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"workbench for presheaf models over finite Heyting algebras"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"text", "json"}));

  // Shared option storage; each subcommand registers only the flags it uses.
  std::vector<std::string> files;
  std::vector<std::string> builtins;
  bool lax = false;
  int alpha = 3;
  int mu = 0;
  int moveCap = 1;
  int tupleCap = -1;
  std::string mname, nname, formulaText, at, abarSpec, bbarSpec;
  std::string signame, algname;
  std::vector<std::string> probeNames;
  std::string side = "none", fuzzMode = "all", bugName = "none";
  std::vector<std::string> moves;
  bool interactive = false;
  int count = 25;
  std::uint64_t seed = 1;

  auto addFiles = [&](CLI::App* sub) {
    sub->add_option("--in", files, "workspace files")
        ->check(CLI::ExistingFile);
    sub->add_flag("--lax-constants", lax,
                  "accept constants with extent below top");
  };
  auto addDepth = [&](CLI::App* sub) {
    sub->add_option("--alpha", alpha, "refinement depth / sentence level");
    auto* muOpt =
        sub->add_option("--mu", mu, "move tuple bound plus one (mu >= 2)")
            ->check(CLI::Range(2, 1 << 20));
    sub->add_option("--move-cap", moveCap, "longest move tuple")
        ->excludes(muOpt);
  };

  auto* check = app.add_subcommand("check", "validate workspace files");
  check->add_option("files", files, "workspace files")
      ->check(CLI::ExistingFile);
  check->add_option("--builtin", builtins,
                    "validate a built-in algebra (omega2, chain3, diamond)");
  check->add_flag("--lax-constants", lax,
                  "accept constants with extent below top");

  auto* evalCmd = app.add_subcommand("eval", "evaluate a formula");
  addFiles(evalCmd);
  evalCmd->add_option("structure", mname, "structure name")->required();
  evalCmd->add_option("formula", formulaText, "formula text")->required();
  evalCmd->add_option("--at", at, "comma separated section tuple for v0..");

  auto* unnestCmd =
      app.add_subcommand("unnest", "rewrite away nested terms");
  addFiles(unnestCmd);
  unnestCmd->add_option("structure", mname, "structure name")->required();
  unnestCmd->add_option("formula", formulaText, "formula text")->required();
  unnestCmd->add_option("--at", at, "comma separated section tuple for v0..");

  auto* rankCmd = app.add_subcommand("rank", "rank and fragment measures");
  addFiles(rankCmd);
  rankCmd->add_option("formula", formulaText, "formula text")->required();
  rankCmd->add_option("--sig", signame, "signature name")->required();
  rankCmd->add_option("--algebra", algname, "algebra name")->required();

  auto* qtableCmd =
      app.add_subcommand("qtable", "back-and-forth refinement table");
  addFiles(qtableCmd);
  addDepth(qtableCmd);
  qtableCmd->add_option("m", mname, "first structure")->required();
  qtableCmd->add_option("n", nname, "second structure")->required();
  qtableCmd->add_option("--tuple-cap", tupleCap, "longest anchor tuple");

  auto* equivCmd =
      app.add_subcommand("equiv", "four-method equivalence comparison");
  addFiles(equivCmd);
  addDepth(equivCmd);
  equivCmd->add_option("m", mname, "first structure")->required();
  equivCmd->add_option("n", nname, "second structure")->required();
  equivCmd->add_option("--abar", abarSpec, "anchor tuple in m");
  equivCmd->add_option("--bbar", bbarSpec, "anchor tuple in n");

  auto* gameCmd = app.add_subcommand("game", "play or solve one game");
  addFiles(gameCmd);
  addDepth(gameCmd);
  gameCmd->add_option("m", mname, "first structure")->required();
  gameCmd->add_option("n", nname, "second structure")->required();
  gameCmd->add_option("--abar", abarSpec, "start tuple in m");
  gameCmd->add_option("--bbar", bbarSpec, "start tuple in n");
  gameCmd->add_option("--side", side, "human side")
      ->check(CLI::IsMember({"none", "I", "II"}));
  gameCmd->add_option("--moves", moves, "scripted move lines");
  gameCmd->add_flag("--interactive", interactive, "read moves from stdin");

  auto* scottCmd = app.add_subcommand("scott-rank", "Scott analysis");
  addFiles(scottCmd);
  addDepth(scottCmd);
  scottCmd->add_option("m", mname, "structure name")->required();
  scottCmd->add_option("--tuple-cap", tupleCap, "longest anchor tuple");

  auto* invCmd = app.add_subcommand("invariants", "render invariant tables");
  addFiles(invCmd);
  addDepth(invCmd);
  invCmd->add_option("m", mname, "first structure")->required();
  invCmd->add_option("n", nname, "second structure")->required();
  invCmd->add_option("--abar", abarSpec, "anchor tuple in m");
  invCmd->add_option("--bbar", bbarSpec, "anchor tuple in n");
  invCmd->add_option("--probes", probeNames, "additional probe structures");

  auto* sentCmd =
      app.add_subcommand("scott-sentence", "characteristic sentence");
  addFiles(sentCmd);
  addDepth(sentCmd);
  sentCmd->add_option("m", mname, "structure name")->required();
  sentCmd->add_option("--abar", abarSpec, "anchor tuple in m");

  auto* fuzzCmd = app.add_subcommand("fuzz", "randomized property checking");
  fuzzCmd->add_option("--mode", fuzzMode, "property suite")
      ->check(CLI::IsMember({"all", "pairs", "unnest", "invariance"}));
  fuzzCmd->add_option("--count", count, "instances per suite")
      ->check(CLI::PositiveNumber);
  fuzzCmd->add_option("--seed", seed, "base seed");
  fuzzCmd->add_option("--inject-bug", bugName,
                      "sabotage one step to prove the checks can fail")
      ->check(CLI::IsMember({"none", "flip-verdict", "drop-conjunct",
                             "skip-inverse"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (mu != 0) moveCap = mu - 1;
  Ctx ctx{out, err, format};

  try {
    if (app.got_subcommand(check))
      return cmdCheck(ctx, files, builtins, lax);
    if (app.got_subcommand(evalCmd))
      return cmdEval(ctx, loadFrom(files, lax), mname, formulaText, at);
    if (app.got_subcommand(unnestCmd))
      return cmdUnnest(ctx, loadFrom(files, lax), mname, formulaText, at);
    if (app.got_subcommand(rankCmd))
      return cmdRank(ctx, loadFrom(files, lax), signame, algname, formulaText);
    if (app.got_subcommand(qtableCmd))
      return cmdQTable(ctx, loadFrom(files, lax), mname, nname, alpha,
                       moveCap, tupleCap);
    if (app.got_subcommand(equivCmd))
      return cmdEquiv(ctx, loadFrom(files, lax), mname, nname, abarSpec,
                      bbarSpec, alpha, moveCap);
    if (app.got_subcommand(gameCmd))
      return cmdGame(ctx, loadFrom(files, lax), mname, nname, abarSpec,
                     bbarSpec, alpha, moveCap, side, moves, interactive);
    if (app.got_subcommand(scottCmd))
      return cmdScottRank(ctx, loadFrom(files, lax), mname, tupleCap, alpha,
                          moveCap);
    if (app.got_subcommand(invCmd))
      return cmdInvariants(ctx, loadFrom(files, lax), mname, nname, abarSpec,
                           bbarSpec, alpha, moveCap, probeNames);
    if (app.got_subcommand(sentCmd))
      return cmdScottSentence(ctx, loadFrom(files, lax), mname, abarSpec,
                              alpha, moveCap);
    if (app.got_subcommand(fuzzCmd))
      return cmdFuzz(ctx, fuzzMode, count, seed, bugName);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  err << "error: no subcommand selected\n";
  return kExitUsage;
}

}  // namespace wb
