#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "workbench/syntax.hpp"
#include "workbench/presheaf.hpp"

using namespace wb;

namespace {

TermPtr v(int i) { return Term::var(i); }

FormulaPtr rv0() { return Formula::rel("R", {v(0)}); }

Signature smallSig() {
  Signature sig;
  sig.name = "S";
  sig.rels.push_back({"R", 1});
  sig.funs.push_back({"f", 1});
  sig.consts.push_back({"c", ""});
  return sig;
}

}  // namespace

TEST_CASE("printers emit the canonical grammar") {
  CHECK(printTerm(v(3)) == "v3");
  CHECK(printTerm(Term::cnst("c")) == "c");
  CHECK(printTerm(Term::app("f", {v(0), Term::cnst("c")})) == "f(v0,c)");
  CHECK(printFormula(Formula::eq(v(0), v(1))) == "v0 = v1");
  CHECK(printFormula(Formula::rel("R", {v(0), v(2)})) == "R(v0,v2)");
  CHECK(printFormula(Formula::not_(rv0())) == "~(R(v0))");
  CHECK(printFormula(Formula::implies(rv0(), Formula::eq(v(0), v(0)))) ==
        "(R(v0) -> v0 = v0)");
  CHECK(printFormula(Formula::bigAnd({rv0(), rv0()})) == "/\\{R(v0); R(v0)}");
  CHECK(printFormula(Formula::bigOr({rv0()})) == "\\/{R(v0)}");
  CHECK(printFormula(Formula::forall({0, 2}, rv0())) ==
        "forall {v0 v2} (R(v0))");
  CHECK(printFormula(Formula::exists({1}, rv0())) == "exists {v1} (R(v0))");
  CHECK(printFormula(Formula::box("m", rv0())) == "[m] (R(v0))");
  CHECK(printFormula(Formula::check("m")) == "<m>");
}

TEST_CASE("variable collection is sorted, unique and binder-aware") {
  auto t = Term::app("f", {v(2), Term::app("f", {v(0), v(2)})});
  CHECK(termVars(t) == std::vector<int>{0, 2});
  auto f = Formula::implies(Formula::eq(v(3), v(1)),
                            Formula::exists({1}, Formula::rel("R", {v(1), v(5)})));
  CHECK(freeVars(f) == std::vector<int>{1, 3, 5});
  CHECK(maxVarIndex(f) == 5);
  CHECK(maxVarIndex(Formula::check("m")) == -1);
  CHECK(freeVars(Formula::check("m")).empty());
}

TEST_CASE("renameFree renames binders apart instead of capturing") {
  // v0 free under a v1 binder; mapping v0 -> v1 must not collide.
  auto f = Formula::exists({1}, Formula::eq(v(0), v(1)));
  auto g = renameFree(f, {{0, 1}});
  CHECK(freeVars(g) == std::vector<int>{1});
  CHECK_FALSE(sameFormula(g, Formula::exists({1}, Formula::eq(v(1), v(1)))));
  // Plain renaming when nothing collides.
  auto h = renameFree(rv0(), {{0, 7}});
  CHECK(printFormula(h) == "R(v7)");
}

TEST_CASE("mrank counts term nesting beyond the unnested shapes") {
  CHECK(mrank(v(0)) == 0);
  CHECK(mrank(Term::cnst("c")) == 1);
  CHECK(mrank(Term::app("f", {v(0)})) == 1);
  CHECK(mrank(Term::app("f", {Term::app("f", {v(0)})})) == 2);

  // All four unnested atomic shapes sit at rank zero.
  CHECK(mrank(Formula::eq(v(0), v(1))) == 0);
  CHECK(mrank(Formula::eq(v(0), Term::cnst("c"))) == 0);
  CHECK(mrank(rv0()) == 0);
  CHECK(mrank(Formula::eq(Term::app("f", {v(0)}), v(1))) == 0);
  CHECK(mrank(Formula::eq(v(1), Term::app("f", {v(0)}))) == 0);

  CHECK(mrank(Formula::eq(Term::cnst("c"), Term::cnst("c"))) == 1);
  CHECK(mrank(Formula::rel("R", {Term::app("f", {v(0)})})) == 1);
  CHECK(mrank(Formula::exists(
            {0}, Formula::rel("R", {Term::app("f", {v(0)})}))) == 2);
  CHECK(mrank(Formula::box("m", rv0())) == 0);
}

TEST_CASE("qdegree counts quantifier blocks") {
  CHECK(qdegree(rv0()) == 0);
  CHECK(qdegree(Formula::exists({0, 1}, rv0())) == 1);
  CHECK(qdegree(Formula::exists({0}, Formula::forall({1}, rv0()))) == 2);
  CHECK(qdegree(Formula::implies(Formula::exists({0}, rv0()), rv0())) == 1);
  CHECK(qdegree(Formula::box("m", Formula::exists({0}, rv0()))) == 1);
}

TEST_CASE("unnested atomic recognition") {
  CHECK(isUnnestedAtomic(Formula::eq(v(0), v(0))));
  CHECK(isUnnestedAtomic(Formula::eq(v(0), Term::cnst("c"))));
  CHECK(isUnnestedAtomic(Formula::eq(Term::cnst("c"), v(0))));
  CHECK(isUnnestedAtomic(rv0()));
  CHECK(isUnnestedAtomic(Formula::eq(Term::app("f", {v(0)}), v(1))));
  CHECK(isUnnestedAtomic(Formula::eq(v(1), Term::app("f", {v(0)}))));
  CHECK_FALSE(isUnnestedAtomic(Formula::eq(Term::cnst("c"), Term::cnst("c"))));
  CHECK_FALSE(isUnnestedAtomic(Formula::rel("R", {Term::app("f", {v(0)})})));
  CHECK_FALSE(
      isUnnestedAtomic(Formula::eq(Term::app("f", {Term::cnst("c")}), v(0))));
  CHECK_FALSE(isUnnestedAtomic(Formula::not_(rv0())));
}

TEST_CASE("fragment classification") {
  auto atom = rv0();
  auto pp = Formula::exists({1}, Formula::bigAnd({atom, Formula::eq(v(0), v(1))}));
  auto c = classify(pp);
  CHECK(c.isUnnested);
  CHECK(c.isCeu);
  CHECK(c.isPP);

  auto ceu = Formula::box("m", pp);
  c = classify(ceu);
  CHECK(c.isUnnested);
  CHECK(c.isCeu);
  CHECK_FALSE(c.isPP);

  auto neg = Formula::not_(atom);
  c = classify(neg);
  CHECK(c.isUnnested);
  CHECK_FALSE(c.isCeu);
  CHECK_FALSE(c.isPP);

  auto nested = Formula::rel("R", {Term::app("f", {v(0)})});
  c = classify(nested);
  CHECK_FALSE(c.isUnnested);
  CHECK_FALSE(c.isCeu);
  CHECK_FALSE(c.isPP);
}

TEST_CASE("canonical atom enumeration covers every shape-map pair") {
  auto sig = smallSig();
  // Shapes: v0=v1 (n=2), v0=c (n=1), R(v0) (n=1), f(v0)=v1 (n=2).
  // Over tuple length L each contributes L^n entries.
  CHECK(enumerateUnnestedAtomics(sig, 0).empty());
  CHECK(enumerateUnnestedAtomics(sig, 1).size() == 4);
  auto atoms = enumerateUnnestedAtomics(sig, 2);
  CHECK(atoms.size() == 4 + 2 + 2 + 4);

  std::set<std::string> keys;
  for (const auto& a : atoms) {
    CHECK(isUnnestedAtomic(a.instantiated));
    for (int i : a.indexMap) {
      CHECK(i >= 0);
      CHECK(i < 2);
    }
    keys.insert(a.key());
  }
  CHECK(keys.size() == atoms.size());  // keys are unique
  CHECK(keys.count("v0 = v1") == 1);
  CHECK(keys.count("v1 = v1") == 1);
  CHECK(keys.count("v0 = c") == 1);
  CHECK(keys.count("R(v1)") == 1);
  CHECK(keys.count("f(v0) = v1") == 1);
  CHECK(keys.count("f(v1) = v0") == 1);
}

TEST_CASE("sameFormula is structural identity") {
  auto a = Formula::bigAnd({rv0(), Formula::eq(v(0), v(1))});
  auto b = Formula::bigAnd({rv0(), Formula::eq(v(0), v(1))});
  auto c = Formula::bigAnd({Formula::eq(v(0), v(1)), rv0()});
  CHECK(sameFormula(a, b));
  CHECK_FALSE(sameFormula(a, c));
}
