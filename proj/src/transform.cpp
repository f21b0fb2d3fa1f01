#include "workbench/transform.hpp"

#include <algorithm>

namespace wb {

namespace {

// Shared flattening machinery: accumulates unnested defining atoms and hands
// out fresh variables in creation order.
struct Flattener {
  int next;
  std::vector<int> fresh;
  std::vector<FormulaPtr> defs;

  int freshVar() {
    fresh.push_back(next);
    return next++;
  }

  // Reduce a term to a variable, emitting defining atoms innermost-first.
  int flattenFull(const TermPtr& t) {
    switch (t->kind()) {
      case Term::Kind::Var:
        return t->varIndex();
      case Term::Kind::Const: {
        int w = freshVar();
        defs.push_back(Formula::eq(Term::var(w), Term::cnst(t->symbol())));
        return w;
      }
      case Term::Kind::App: {
        std::vector<TermPtr> xs;
        for (const auto& a : t->args()) xs.push_back(Term::var(flattenFull(a)));
        int w = freshVar();
        defs.push_back(Formula::eq(Term::app(t->symbol(), std::move(xs)), Term::var(w)));
        return w;
      }
    }
    return -1;
  }

  // Arguments of a kept root symbol: variables stay, everything else is
  // flattened to a fresh variable.
  std::vector<TermPtr> flattenArgs(const std::vector<TermPtr>& args) {
    std::vector<TermPtr> xs;
    for (const auto& a : args)
      xs.push_back(a->kind() == Term::Kind::Var ? a : Term::var(flattenFull(a)));
    return xs;
  }

  FormulaPtr wrap(FormulaPtr root) {
    if (fresh.empty()) return root;
    auto members = std::move(defs);
    members.push_back(std::move(root));
    FormulaPtr body = Formula::bigAnd(std::move(members));
    for (auto it = fresh.rbegin(); it != fresh.rend(); ++it)
      body = Formula::exists({*it}, std::move(body));
    return body;
  }
};

FormulaPtr unnestAtomicFrom(const FormulaPtr& atom, int freshBase) {
  if (isUnnestedAtomic(atom)) return atom;
  Flattener fl{freshBase, {}, {}};

  if (atom->kind() == Formula::Kind::Rel) {
    auto xs = fl.flattenArgs(atom->terms());
    return fl.wrap(Formula::rel(atom->relName(), std::move(xs)));
  }

  const auto& t0 = atom->lhs();
  const auto& t1 = atom->rhs();
  auto isVar = [](const TermPtr& t) { return t->kind() == Term::Kind::Var; };

  // One side already a variable: keep the other side's head symbol as the
  // root atom and flatten its arguments.
  if (isVar(t0) || isVar(t1)) {
    const TermPtr& v = isVar(t0) ? t0 : t1;
    const TermPtr& s = isVar(t0) ? t1 : t0;
    // s must be an App here (Var=Var and Var=Const are unnested).
    auto xs = fl.flattenArgs(s->args());
    return fl.wrap(Formula::eq(Term::app(s->symbol(), std::move(xs)), v));
  }

  // Neither side is a variable: flatten the left side to a variable w, then
  // build the root atom from the right side against w.
  int w = fl.flattenFull(t0);
  if (t1->kind() == Term::Kind::Const) {
    return fl.wrap(Formula::eq(Term::var(w), Term::cnst(t1->symbol())));
  }
  auto xs = fl.flattenArgs(t1->args());
  return fl.wrap(Formula::eq(Term::app(t1->symbol(), std::move(xs)), Term::var(w)));
}

FormulaPtr unnestFrom(const FormulaPtr& f, int freshBase) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return unnestAtomicFrom(f, freshBase);
    case Formula::Kind::Not:
      return Formula::not_(unnestFrom(f->body(), freshBase));
    case Formula::Kind::Box:
      return Formula::box(f->elemName(), unnestFrom(f->body(), freshBase));
    case Formula::Kind::Implies:
      return Formula::implies(unnestFrom(f->left(), freshBase),
                              unnestFrom(f->right(), freshBase));
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr: {
      std::vector<FormulaPtr> ms;
      for (const auto& g : f->members()) ms.push_back(unnestFrom(g, freshBase));
      return f->kind() == Formula::Kind::BigAnd ? Formula::bigAnd(std::move(ms))
                                                : Formula::bigOr(std::move(ms));
    }
    case Formula::Kind::Forall:
      return Formula::forall(f->boundVars(), unnestFrom(f->body(), freshBase));
    case Formula::Kind::Exists:
      return Formula::exists(f->boundVars(), unnestFrom(f->body(), freshBase));
    case Formula::Kind::Check:
      return f;
  }
  return f;
}

int freshBaseFor(const FormulaPtr& f) {
  return std::max(kFreshVarBase, maxVarIndex(f) + 1);
}

}  // namespace

FormulaPtr unnestAtomic(const FormulaPtr& atom) {
  if (atom->kind() != Formula::Kind::Eq && atom->kind() != Formula::Kind::Rel)
    throw ConfigError("unnestAtomic expects an atomic formula");
  return unnestAtomicFrom(atom, freshBaseFor(atom));
}

FormulaPtr unnest(const FormulaPtr& f) { return unnestFrom(f, freshBaseFor(f)); }

namespace {

void requirePP(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return;
    case Formula::Kind::BigAnd:
      for (const auto& g : f->members()) requirePP(g);
      return;
    case Formula::Kind::Exists:
      requirePP(f->body());
      return;
    default:
      throw ConfigError("not positive primitive: contains " + printFormula(f));
  }
}

// Collect binders and atoms of a pp formula whose binders are globally
// distinct (guaranteed by a prior renaming pass).
void collectPP(const FormulaPtr& f, std::vector<int>& binders,
               std::vector<FormulaPtr>& atoms) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      atoms.push_back(f);
      return;
    case Formula::Kind::BigAnd:
      for (const auto& g : f->members()) collectPP(g, binders, atoms);
      return;
    case Formula::Kind::Exists:
      binders.insert(binders.end(), f->boundVars().begin(), f->boundVars().end());
      collectPP(f->body(), binders, atoms);
      return;
    default:
      return;
  }
}

// Rename every binder to a globally unique index (left-to-right), leaving
// free variables alone, so hoisting cannot capture.
FormulaPtr separateBinders(const FormulaPtr& f, int& next,
                           std::vector<std::pair<int, int>> env) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return renameFree(f, env);
    case Formula::Kind::BigAnd: {
      std::vector<FormulaPtr> ms;
      for (const auto& g : f->members()) ms.push_back(separateBinders(g, next, env));
      return Formula::bigAnd(std::move(ms));
    }
    case Formula::Kind::Exists: {
      std::vector<int> vars;
      for (int v : f->boundVars()) {
        int target = next++;
        env.insert(env.begin(), {v, target});
        vars.push_back(target);
      }
      return Formula::exists(std::move(vars), separateBinders(f->body(), next, env));
    }
    default:
      return f;
  }
}

}  // namespace

FormulaPtr ppNormalForm(const FormulaPtr& f) {
  requirePP(f);
  auto un = unnest(f);  // atoms now unnested, still pp
  int next = freshBaseFor(un);
  auto sep = separateBinders(un, next, {});
  std::vector<int> binders;
  std::vector<FormulaPtr> atoms;
  collectPP(sep, binders, atoms);
  FormulaPtr body = atoms.size() == 1 ? atoms[0] : Formula::bigAnd(std::move(atoms));
  for (auto it = binders.rbegin(); it != binders.rend(); ++it)
    body = Formula::exists({*it}, std::move(body));
  return body;
}

FormulaPtr boxToCheck(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
    case Formula::Kind::Check:
      return f;
    case Formula::Kind::Box: {
      auto sub = boxToCheck(f->body());
      auto p = Formula::check(f->elemName());
      return Formula::bigAnd({Formula::implies(sub, p), Formula::implies(p, sub)});
    }
    case Formula::Kind::Not:
      return Formula::not_(boxToCheck(f->body()));
    case Formula::Kind::Implies:
      return Formula::implies(boxToCheck(f->left()), boxToCheck(f->right()));
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr: {
      std::vector<FormulaPtr> ms;
      for (const auto& g : f->members()) ms.push_back(boxToCheck(g));
      return f->kind() == Formula::Kind::BigAnd ? Formula::bigAnd(std::move(ms))
                                                : Formula::bigOr(std::move(ms));
    }
    case Formula::Kind::Forall:
      return Formula::forall(f->boundVars(), boxToCheck(f->body()));
    case Formula::Kind::Exists:
      return Formula::exists(f->boundVars(), boxToCheck(f->body()));
  }
  return f;
}

namespace {

FormulaPtr replaceChecks(const FormulaPtr& f, const FormulaPtr& tau) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return f;
    case Formula::Kind::Check:
      return Formula::box(f->elemName(), tau);
    case Formula::Kind::Not:
      return Formula::not_(replaceChecks(f->body(), tau));
    case Formula::Kind::Box:
      return Formula::box(f->elemName(), replaceChecks(f->body(), tau));
    case Formula::Kind::Implies:
      return Formula::implies(replaceChecks(f->left(), tau),
                              replaceChecks(f->right(), tau));
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr: {
      std::vector<FormulaPtr> ms;
      for (const auto& g : f->members()) ms.push_back(replaceChecks(g, tau));
      return f->kind() == Formula::Kind::BigAnd ? Formula::bigAnd(std::move(ms))
                                                : Formula::bigOr(std::move(ms));
    }
    case Formula::Kind::Forall:
      return Formula::forall(f->boundVars(), replaceChecks(f->body(), tau));
    case Formula::Kind::Exists:
      return Formula::exists(f->boundVars(), replaceChecks(f->body(), tau));
  }
  return f;
}

}  // namespace

FormulaPtr checkToBox(const FormulaPtr& f) {
  // The tautology under the box: exists v (v=v) -> exists v (v=v), whose
  // value at any assignment is the assignment's extent, giving the box the
  // value Ea /\ p.  The bound variable is chosen clear of everything in f.
  int v = freshBaseFor(f);
  auto valid = Formula::exists({v}, Formula::eq(Term::var(v), Term::var(v)));
  auto tau = Formula::implies(valid, valid);
  return replaceChecks(f, tau);
}

}  // namespace wb
