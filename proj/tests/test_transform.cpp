#include <functional>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "workbench/error.hpp"
#include "workbench/parser.hpp"
#include "workbench/semantics.hpp"
#include "workbench/transform.hpp"
#include "workbench/workspace.hpp"

using namespace wb;

namespace {

struct Tx {
  Workspace ws = loadWorkspace(R"(
algebra C3 { elements: bot, m, top; order: bot <= m, m <= top; }
signature S {
  rel R/1;
  fun f/1;
  const c;
}
structure M over C3 sig S {
  section a extent top;
  section b extent top;
  rel R(a) = m;
  rel R(b) = top;
  fun f(a) = b;
  fun f(b) = a;
  const c = a;
}
)");
  const Structure& m = ws.structure("M");

  FormulaPtr f(const char* text) const {
    return parseFormula(text, m.sig(), m.omega());
  }

  // Exhaustive agreement on every assignment of the free variables.
  void checkSameValue(const FormulaPtr& lhs, const FormulaPtr& rhs) const {
    auto fv = freeVars(lhs);
    REQUIRE(freeVars(rhs) == fv);
    std::vector<Sec> tuple(fv.size(), 0);
    std::function<void(std::size_t)> walk = [&](std::size_t pos) {
      if (pos == tuple.size()) {
        Assignment asg;
        for (std::size_t i = 0; i < fv.size(); ++i) asg[fv[i]] = tuple[i];
        CHECK(eval(m, lhs, asg) == eval(m, rhs, asg));
        return;
      }
      for (Sec s = 0; s < m.carrierSize(); ++s) {
        tuple[pos] = s;
        walk(pos + 1);
      }
    };
    walk(0);
  }
};

bool mentionsKind(const FormulaPtr& f, Formula::Kind k) {
  if (f->kind() == k) return true;
  switch (f->kind()) {
    case Formula::Kind::Not:
    case Formula::Kind::Box:
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mentionsKind(f->body(), k);
    case Formula::Kind::Implies:
      return mentionsKind(f->left(), k) || mentionsKind(f->right(), k);
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr:
      for (const auto& g : f->members())
        if (mentionsKind(g, k)) return true;
      return false;
    default:
      return false;
  }
}

}  // namespace

TEST_CASE("unnesting an atom introduces fresh singleton existentials") {
  Tx tx;
  auto atom = tx.f("R(f(v0))");
  auto out = unnestAtomic(atom);
  CHECK(classify(out).isUnnested);
  CHECK(qdegree(out) == mrank(atom));
  CHECK(freeVars(out) == std::vector<int>{0});
  // Fresh variables start at the reserved base index.
  CHECK(maxVarIndex(out) >= kFreshVarBase);
  tx.checkSameValue(atom, out);
}

TEST_CASE("unnest preserves values and trades rank for quantifier depth") {
  Tx tx;
  for (const char* text :
       {"R(v0)", "R(f(v0))", "f(f(v0)) = v1", "c = c", "R(f(c))",
        "~R(f(v0))", "R(f(v0)) -> f(v0) = v1",
        "forall {v0} R(f(v0))", "exists {v0} /\\{R(f(v0)); f(v0) = v0}",
        "[m] R(f(v0))", "\\/{R(f(v0)); <m>}"}) {
    auto f = tx.f(text);
    auto g = unnest(f);
    INFO("input: ", text);
    CHECK(classify(g).isUnnested);
    CHECK(qdegree(g) == mrank(f));
    tx.checkSameValue(f, g);
  }
}

TEST_CASE("unnest leaves unnested inputs at quantifier degree zero") {
  Tx tx;
  for (const char* text : {"R(v0)", "v0 = v1", "v0 = c", "f(v0) = v1"}) {
    auto g = unnest(tx.f(text));
    CHECK(qdegree(g) == 0);
    CHECK(classify(g).isUnnested);
  }
}

TEST_CASE("unnest avoids variables the input already mentions") {
  Tx tx;
  // Build v100 directly; the parser's variable cap is not in play here.
  auto atom = Formula::rel("R", {Term::app("f", {Term::var(100)})});
  auto out = unnestAtomic(atom);
  CHECK(freeVars(out) == std::vector<int>{100});
  CHECK(maxVarIndex(out) > 100);
  CHECK(classify(out).isUnnested);
}

TEST_CASE("pp normal form is one existential chain over a flat conjunction") {
  Tx tx;
  auto f = tx.f("exists {v0} /\\{R(f(v0)); exists {v1} /\\{f(v0) = v1; R(v1)}}");
  auto g = ppNormalForm(f);
  CHECK(classify(g).isPP);
  tx.checkSameValue(f, g);
  // Shape: peel existentials, then find one conjunction of unnested atoms.
  FormulaPtr cur = g;
  while (cur->kind() == Formula::Kind::Exists) cur = cur->body();
  REQUIRE(cur->kind() == Formula::Kind::BigAnd);
  for (const auto& atom : cur->members()) CHECK(isUnnestedAtomic(atom));

  // Quantifier-free inputs flatten to the conjunction alone.
  auto flat = ppNormalForm(tx.f("/\\{R(v0); v0 = v1}"));
  CHECK(flat->kind() == Formula::Kind::BigAnd);
}

TEST_CASE("pp normal form rejects anything outside the fragment") {
  Tx tx;
  for (const char* text :
       {"~R(v0)", "R(v0) -> R(v0)", "forall {v0} R(v0)", "\\/{R(v0)}",
        "[m] R(v0)", "<m>"}) {
    try {
      ppNormalForm(tx.f(text));
      FAIL("expected ConfigError for: ", text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).rfind("not positive primitive", 0) == 0);
    }
  }
}

TEST_CASE("box and check translate into each other without changing values") {
  Tx tx;
  for (const char* text :
       {"[m] R(v0)", "[top] (R(v0) -> [bot] R(v0))",
        "exists {v0} [m] /\\{R(v0); <m>}"}) {
    auto f = tx.f(text);
    auto noBox = boxToCheck(f);
    CHECK_FALSE(mentionsKind(noBox, Formula::Kind::Box));
    tx.checkSameValue(f, noBox);
  }
  for (const char* text : {"<m>", "/\\{R(v0); <bot>}", "exists {v0} <m>"}) {
    auto f = tx.f(text);
    auto noCheck = checkToBox(f);
    CHECK_FALSE(mentionsKind(noCheck, Formula::Kind::Check));
    tx.checkSameValue(f, noCheck);
  }
}
