#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "workbench/error.hpp"
#include "workbench/parser.hpp"
#include "workbench/semantics.hpp"
#include "workbench/workspace.hpp"

using namespace wb;

namespace {

// Values below are derived by hand from the clause definitions over the
// three-chain bot < m < top.  M has R(a) = m with E a = top, R(b) = m with
// E b = m; N differs only by R(a) = top.
struct Sx {
  Workspace ws = loadWorkspace(wbtest::kChainWorkspace);
  const Structure& m = ws.structure("M");
  const Structure& n = ws.structure("N");
  Elem bot = m.omega().elemOrThrow("bot");
  Elem mid = m.omega().elemOrThrow("m");
  Elem top = m.omega().elemOrThrow("top");

  FormulaPtr f(const char* text) const {
    return parseFormula(text, m.sig(), m.omega());
  }
  Elem evalM(const char* text, const std::vector<Sec>& tuple) const {
    return eval(m, f(text), positionalAssignment(tuple));
  }
  Sec a() const { return m.sectionExpr("a"); }
  Sec b() const { return m.sectionExpr("b"); }
};

}  // namespace

TEST_CASE("atomic clauses meet the assignment extent") {
  Sx x;
  CHECK(x.evalM("R(v0)", {x.a()}) == x.mid);
  CHECK(x.evalM("R(v0)", {x.b()}) == x.mid);
  CHECK(x.evalM("R(v0)", {x.m.sectionExpr("a|m")}) == x.mid);
  CHECK(x.evalM("v0 = v0", {x.a()}) == x.top);
  CHECK(x.evalM("v0 = v1", {x.a(), x.m.sectionExpr("a|m")}) == x.mid);
  CHECK(x.evalM("v0 = v1", {x.a(), x.b()}) == x.bot);
}

TEST_CASE("negation and implication use the relative pseudocomplement") {
  Sx x;
  CHECK(x.evalM("~R(v0)", {x.a()}) == x.bot);
  // Double negation strictly grows: ~~R(a) = top while R(a) = m.
  CHECK(x.evalM("~(~R(v0))", {x.a()}) == x.top);
  CHECK(x.evalM("R(v0) -> v0 = v0", {x.a()}) == x.top);
  CHECK(x.evalM("v0 = v0 -> R(v0)", {x.a()}) == x.mid);
  // At a section of extent m the bound caps everything at m.
  CHECK(x.evalM("v0 = v0 -> R(v0)", {x.b()}) == x.mid);
}

TEST_CASE("quantifiers fold over the whole carrier") {
  Sx x;
  // Forall: meet over E(t) -> [R](t); the generator a contributes top -> m.
  CHECK(x.evalM("forall {v0} R(v0)", {}) == x.mid);
  CHECK(x.evalM("exists {v0} R(v0)", {}) == x.mid);
  // In N the same sentences reach top because R(a) = top there.
  CHECK(eval(x.n, x.f("forall {v0} R(v0)"), {}) == x.top);
  CHECK(eval(x.n, x.f("exists {v0} R(v0)"), {}) == x.top);
  // Two-variable block.
  CHECK(x.evalM("exists {v0, v1} /\\{R(v0); v0 = v1}", {}) == x.mid);
}

TEST_CASE("empty conjunction and disjunction are the units") {
  Sx x;
  CHECK(x.evalM("/\\{}", {}) == x.top);
  CHECK(x.evalM("\\/{}", {}) == x.bot);
  CHECK(x.evalM("/\\{}", {x.b()}) == x.mid);  // cut to the assignment extent
}

TEST_CASE("box pins a value and check injects an element") {
  Sx x;
  // [p] phi holds exactly where [phi] agrees with p.
  CHECK(x.evalM("[m] R(v0)", {x.a()}) == x.top);
  CHECK(x.evalM("[top] R(v0)", {x.a()}) == x.mid);
  CHECK(x.evalM("[bot] R(v0)", {x.a()}) == x.bot);
  CHECK(x.evalM("<m>", {}) == x.mid);
  CHECK(x.evalM("<bot>", {}) == x.bot);
  CHECK(x.evalM("<m>", {x.a()}) == x.mid);
}

TEST_CASE("forcing compares against the joint extent bound") {
  Sx x;
  auto r = x.f("R(v0)");
  CHECK_FALSE(forces(x.m, r, positionalAssignment({x.a()})));
  CHECK(forces(x.m, r, positionalAssignment({x.b()})));
  Evaluator ev(x.m);
  CHECK(ev.forces(r, positionalAssignment({x.b()})));
  // The bound itself: assignment extent meets formula extent.
  Assignment asg = positionalAssignment({x.b()});
  CHECK(assignmentExtent(x.m, asg) == x.mid);
  CHECK(formulaExtent(x.m, r) == x.top);
}

TEST_CASE("assignment extent is the meet over all assigned sections") {
  Sx x;
  Assignment asg;
  asg[0] = x.a();
  asg[4] = x.b();
  CHECK(assignmentExtent(x.m, asg) == x.mid);
  CHECK(assignmentExtent(x.m, {}) == x.top);
}

TEST_CASE("values only depend on the free variables") {
  Sx x;
  auto r = x.f("R(v0)");
  Assignment plain = positionalAssignment({x.a()});
  Assignment junk = plain;
  junk[7] = x.b();  // not free in R(v0); must not cut the value
  Evaluator ev(x.m);
  CHECK(ev.eval(r, plain) == ev.eval(r, junk));
  // A bound variable's outer assignment is ignored as well.
  auto q = x.f("exists {v1} R(v1)");
  Assignment outer;
  outer[1] = x.b();
  CHECK(eval(x.m, q, {}) == x.mid);
  CHECK_THROWS_AS(eval(x.m, q, outer), ConfigError);  // rebinding is rejected
}

TEST_CASE("evaluation errors name the offending piece") {
  Sx x;
  CHECK_THROWS_AS(x.evalM("R(v0)", {}), ConfigError);  // unassigned variable
  auto shadow = Formula::exists({0}, Formula::exists({0}, x.f("R(v0)")));
  CHECK_THROWS_AS(eval(x.m, shadow, {}), ConfigError);
}

TEST_CASE("lax constants shrink the formula extent") {
  LoadOptions lax;
  lax.laxConstants = true;
  auto ws = loadWorkspace(R"(
algebra C3 { elements: bot, m, top; order: bot <= m, m <= top; }
signature L { const k extent m; }
structure P over C3 sig L {
  section s extent m;
  const k = s;
}
)",
                          lax);
  const auto& p = ws.structure("P");
  Elem mid = p.omega().elemOrThrow("m");
  auto f = parseFormula("v0 = k", p.sig(), p.omega());
  CHECK(formulaExtent(p, f) == mid);
  Sec s = p.sectionExpr("s");
  CHECK(eval(p, f, positionalAssignment({s})) == mid);
  CHECK(forces(p, f, positionalAssignment({s})));
}

TEST_CASE("one evaluator survives transient formula objects") {
  Sx x;
  Evaluator ev(x.m);
  std::vector<Elem> first, second;
  // Build, evaluate and discard ASTs; later allocations may reuse node
  // addresses, which the memo must tolerate.
  for (int round = 0; round < 2; ++round) {
    auto& out = round == 0 ? first : second;
    for (const char* text :
         {"forall {v0} (R(v0) -> exists {v1} (v0 = v1))",
          "exists {v0} /\\{R(v0); ~(v0 = v0)}", "[m] exists {v0} R(v0)"}) {
      auto f = x.f(text);
      out.push_back(ev.eval(f, {}));
    }
  }
  CHECK(first == second);
  // Fresh evaluators agree with the warm one.
  for (std::size_t i = 0; i < 3; ++i) {
    static const char* texts[] = {
        "forall {v0} (R(v0) -> exists {v1} (v0 = v1))",
        "exists {v0} /\\{R(v0); ~(v0 = v0)}", "[m] exists {v0} R(v0)"};
    CHECK(eval(x.m, x.f(texts[i]), {}) == first[i]);
  }
}

TEST_CASE("evaluation is monotone under restriction of the assignment") {
  Sx x;
  // eval at a restricted tuple equals the restriction of the value: for
  // every formula here, eval(f, t|p) = eval(f, t) /\ p.
  for (const char* text : {"R(v0)", "~R(v0)", "R(v0) -> v0 = v0", "[m] R(v0)"}) {
    auto f = x.f(text);
    for (Sec t = 0; t < x.m.carrierSize(); ++t) {
      Elem full = eval(x.m, f, positionalAssignment({t}));
      for (Elem p : x.m.omega().elements()) {
        Sec tp = x.m.restrict(t, p);
        CHECK(eval(x.m, f, positionalAssignment({tp})) ==
              x.m.omega().meet(full, p));
      }
    }
  }
}
