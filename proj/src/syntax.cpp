#include "workbench/syntax.hpp"

#include <algorithm>
#include <set>

#include "workbench/presheaf.hpp"

namespace wb {

namespace {

std::vector<int> sortedUnique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

TermPtr Term::var(int index) {
  if (index < 0) throw ConfigError("variable indices are nonnegative");
  auto t = std::make_shared<Term>();
  t->kind_ = Kind::Var;
  t->varIndex_ = index;
  return t;
}

TermPtr Term::cnst(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind_ = Kind::Const;
  t->symbol_ = std::move(name);
  return t;
}

TermPtr Term::app(std::string fun, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->kind_ = Kind::App;
  t->symbol_ = std::move(fun);
  t->args_ = std::move(args);
  return t;
}

FormulaPtr Formula::eq(TermPtr lhs, TermPtr rhs) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Eq;
  f->terms_ = {std::move(lhs), std::move(rhs)};
  return f;
}

FormulaPtr Formula::rel(std::string name, std::vector<TermPtr> args) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Rel;
  f->symbol_ = std::move(name);
  f->terms_ = std::move(args);
  return f;
}

FormulaPtr Formula::not_(FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Not;
  f->subs_ = {std::move(body)};
  return f;
}

FormulaPtr Formula::implies(FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Implies;
  f->subs_ = {std::move(lhs), std::move(rhs)};
  return f;
}

FormulaPtr Formula::bigAnd(std::vector<FormulaPtr> members) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::BigAnd;
  f->subs_ = std::move(members);
  return f;
}

FormulaPtr Formula::bigOr(std::vector<FormulaPtr> members) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::BigOr;
  f->subs_ = std::move(members);
  return f;
}

FormulaPtr Formula::forall(std::vector<int> vars, FormulaPtr body) {
  if (vars.empty()) throw ConfigError("quantifier variable sets are nonempty");
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Forall;
  f->vars_ = sortedUnique(std::move(vars));
  f->subs_ = {std::move(body)};
  return f;
}

FormulaPtr Formula::exists(std::vector<int> vars, FormulaPtr body) {
  if (vars.empty()) throw ConfigError("quantifier variable sets are nonempty");
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Exists;
  f->vars_ = sortedUnique(std::move(vars));
  f->subs_ = {std::move(body)};
  return f;
}

FormulaPtr Formula::box(std::string elemName, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Box;
  f->symbol_ = std::move(elemName);
  f->subs_ = {std::move(body)};
  return f;
}

FormulaPtr Formula::check(std::string elemName) {
  auto f = std::make_shared<Formula>();
  f->kind_ = Kind::Check;
  f->symbol_ = std::move(elemName);
  return f;
}

std::string printTerm(const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Var: return "v" + std::to_string(t->varIndex());
    case Term::Kind::Const: return t->symbol();
    case Term::Kind::App: {
      std::string out = t->symbol() + "(";
      for (std::size_t i = 0; i < t->args().size(); ++i) {
        if (i) out += ",";
        out += printTerm(t->args()[i]);
      }
      return out + ")";
    }
  }
  return {};
}

std::string printFormula(const FormulaPtr& f) {
  auto braceList = [](const std::vector<FormulaPtr>& fs) {
    std::string out = "{";
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (i) out += "; ";
      out += printFormula(fs[i]);
    }
    return out + "}";
  };
  auto varSet = [](const std::vector<int>& vs) {
    std::string out = "{";
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i) out += " ";
      out += "v" + std::to_string(vs[i]);
    }
    return out + "}";
  };
  switch (f->kind()) {
    case Formula::Kind::Eq:
      return printTerm(f->lhs()) + " = " + printTerm(f->rhs());
    case Formula::Kind::Rel: {
      std::string out = f->relName() + "(";
      for (std::size_t i = 0; i < f->terms().size(); ++i) {
        if (i) out += ",";
        out += printTerm(f->terms()[i]);
      }
      return out + ")";
    }
    case Formula::Kind::Not:
      return "~(" + printFormula(f->body()) + ")";
    case Formula::Kind::Implies:
      return "(" + printFormula(f->left()) + " -> " + printFormula(f->right()) + ")";
    case Formula::Kind::BigAnd:
      return "/\\" + braceList(f->members());
    case Formula::Kind::BigOr:
      return "\\/" + braceList(f->members());
    case Formula::Kind::Forall:
      return "forall " + varSet(f->boundVars()) + " (" + printFormula(f->body()) + ")";
    case Formula::Kind::Exists:
      return "exists " + varSet(f->boundVars()) + " (" + printFormula(f->body()) + ")";
    case Formula::Kind::Box:
      return "[" + f->elemName() + "] (" + printFormula(f->body()) + ")";
    case Formula::Kind::Check:
      return "<" + f->elemName() + ">";
  }
  return {};
}

namespace {

void collectTermVars(const TermPtr& t, std::set<int>& out) {
  switch (t->kind()) {
    case Term::Kind::Var: out.insert(t->varIndex()); break;
    case Term::Kind::Const: break;
    case Term::Kind::App:
      for (const auto& a : t->args()) collectTermVars(a, out);
      break;
  }
}

void collectFreeVars(const FormulaPtr& f, std::set<int>& bound, std::set<int>& out) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel: {
      std::set<int> vars;
      for (const auto& t : f->terms()) collectTermVars(t, vars);
      for (int v : vars)
        if (!bound.count(v)) out.insert(v);
      break;
    }
    case Formula::Kind::Not:
    case Formula::Kind::Box:
      collectFreeVars(f->body(), bound, out);
      break;
    case Formula::Kind::Implies:
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr:
      for (const auto& g : f->members()) collectFreeVars(g, bound, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      std::set<int> inner = bound;
      inner.insert(f->boundVars().begin(), f->boundVars().end());
      collectFreeVars(f->body(), inner, out);
      break;
    }
    case Formula::Kind::Check:
      break;
  }
}

}  // namespace

std::vector<int> termVars(const TermPtr& t) {
  std::set<int> s;
  collectTermVars(t, s);
  return {s.begin(), s.end()};
}

std::vector<int> freeVars(const FormulaPtr& f) {
  std::set<int> bound, out;
  collectFreeVars(f, bound, out);
  return {out.begin(), out.end()};
}

namespace {

int maxTermVar(const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Var: return t->varIndex();
    case Term::Kind::Const: return -1;
    case Term::Kind::App: {
      int m = -1;
      for (const auto& a : t->args()) m = std::max(m, maxTermVar(a));
      return m;
    }
  }
  return -1;
}

}  // namespace

int maxVarIndex(const FormulaPtr& f) {
  int m = -1;
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      for (const auto& t : f->terms()) m = std::max(m, maxTermVar(t));
      break;
    case Formula::Kind::Not:
    case Formula::Kind::Box:
      m = maxVarIndex(f->body());
      break;
    case Formula::Kind::Implies:
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr:
      for (const auto& g : f->members()) m = std::max(m, maxVarIndex(g));
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      m = maxVarIndex(f->body());
      for (int v : f->boundVars()) m = std::max(m, v);
      break;
    case Formula::Kind::Check:
      break;
  }
  return m;
}

namespace {

struct Renamer {
  // Active rename, as a small association list (domains are tiny here).
  std::vector<std::pair<int, int>> map;
  int fresh;

  int apply(int v) const {
    for (const auto& [from, to] : map)
      if (from == v) return to;
    return v;
  }

  TermPtr term(const TermPtr& t) const {
    switch (t->kind()) {
      case Term::Kind::Var: return Term::var(apply(t->varIndex()));
      case Term::Kind::Const: return t;
      case Term::Kind::App: {
        std::vector<TermPtr> args;
        for (const auto& a : t->args()) args.push_back(term(a));
        return Term::app(t->symbol(), std::move(args));
      }
    }
    return t;
  }

  FormulaPtr formula(const FormulaPtr& f) {
    switch (f->kind()) {
      case Formula::Kind::Eq:
        return Formula::eq(term(f->lhs()), term(f->rhs()));
      case Formula::Kind::Rel: {
        std::vector<TermPtr> args;
        for (const auto& t : f->terms()) args.push_back(term(t));
        return Formula::rel(f->relName(), std::move(args));
      }
      case Formula::Kind::Not: return Formula::not_(formula(f->body()));
      case Formula::Kind::Box: return Formula::box(f->elemName(), formula(f->body()));
      case Formula::Kind::Implies:
        return Formula::implies(formula(f->left()), formula(f->right()));
      case Formula::Kind::BigAnd:
      case Formula::Kind::BigOr: {
        std::vector<FormulaPtr> ms;
        for (const auto& g : f->members()) ms.push_back(formula(g));
        return f->kind() == Formula::Kind::BigAnd ? Formula::bigAnd(std::move(ms))
                                                  : Formula::bigOr(std::move(ms));
      }
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        // Binders shadow the active map; binders colliding with an image of
        // the active map are renamed apart to avoid capture.
        Renamer inner = *this;
        std::vector<int> vars;
        for (int v : f->boundVars()) {
          bool captured = false;
          for (const auto& [from, to] : inner.map)
            if (to == v) captured = true;
          int target = v;
          if (captured) target = inner.fresh++;
          // Shadow or rename: record v -> target at the front.
          inner.map.insert(inner.map.begin(), {v, target});
          vars.push_back(target);
        }
        auto body = inner.formula(f->body());
        fresh = inner.fresh;
        return f->kind() == Formula::Kind::Forall
                   ? Formula::forall(std::move(vars), std::move(body))
                   : Formula::exists(std::move(vars), std::move(body));
      }
      case Formula::Kind::Check:
        return f;
    }
    return f;
  }
};

}  // namespace

FormulaPtr renameFree(const FormulaPtr& f, const std::vector<std::pair<int, int>>& map) {
  Renamer r;
  r.map = map;
  r.fresh = maxVarIndex(f) + 1;
  for (const auto& [from, to] : map) r.fresh = std::max(r.fresh, std::max(from, to) + 1);
  return r.formula(f);
}

int mrank(const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Var: return 0;
    case Term::Kind::Const: return 1;
    case Term::Kind::App: {
      int acc = 1;
      for (const auto& a : t->args()) acc += mrank(a);
      return acc;
    }
  }
  return 0;
}

int mrank(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
      return std::max(0, mrank(f->lhs()) + mrank(f->rhs()) - 1);
    case Formula::Kind::Rel: {
      int acc = 0;
      for (const auto& t : f->terms()) acc += mrank(t);
      return acc;
    }
    case Formula::Kind::Not:
    case Formula::Kind::Box:
      return mrank(f->body());
    case Formula::Kind::Implies:
      return std::max(mrank(f->left()), mrank(f->right()));
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr: {
      int acc = 0;
      for (const auto& g : f->members()) acc = std::max(acc, mrank(g));
      return acc;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mrank(f->body()) + 1;
    case Formula::Kind::Check:
      return 0;
  }
  return 0;
}

int qdegree(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
    case Formula::Kind::Check:
      return 0;
    case Formula::Kind::Not:
    case Formula::Kind::Box:
      return qdegree(f->body());
    case Formula::Kind::Implies:
      return std::max(qdegree(f->left()), qdegree(f->right()));
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr: {
      int acc = 0;
      for (const auto& g : f->members()) acc = std::max(acc, qdegree(g));
      return acc;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return qdegree(f->body()) + 1;
  }
  return 0;
}

bool isUnnestedAtomic(const FormulaPtr& f) {
  auto isVar = [](const TermPtr& t) { return t->kind() == Term::Kind::Var; };
  auto allVars = [&](const std::vector<TermPtr>& ts) {
    for (const auto& t : ts)
      if (!isVar(t)) return false;
    return true;
  };
  switch (f->kind()) {
    case Formula::Kind::Rel:
      return allVars(f->terms());
    case Formula::Kind::Eq: {
      const auto &a = f->lhs(), &b = f->rhs();
      if (isVar(a) && isVar(b)) return true;
      if (isVar(a) && b->kind() == Term::Kind::Const) return true;
      if (isVar(b) && a->kind() == Term::Kind::Const) return true;
      if (isVar(a) && b->kind() == Term::Kind::App && allVars(b->args())) return true;
      if (isVar(b) && a->kind() == Term::Kind::App && allVars(a->args())) return true;
      return false;
    }
    default:
      return false;
  }
}

Classification classify(const FormulaPtr& f) {
  Classification c{true, true, true};
  auto walk = [&](auto&& self, const FormulaPtr& g) -> void {
    switch (g->kind()) {
      case Formula::Kind::Eq:
      case Formula::Kind::Rel:
        if (!isUnnestedAtomic(g)) c = {false, false, false};
        return;
      case Formula::Kind::BigAnd:
        for (const auto& m : g->members()) self(self, m);
        return;
      case Formula::Kind::Exists:
        self(self, g->body());
        return;
      case Formula::Kind::Box:
        c.isPP = false;
        self(self, g->body());
        return;
      case Formula::Kind::Check:
        c.isPP = false;
        c.isCeu = false;
        return;
      default:
        // Not, Implies, BigOr, Forall: outside both the ceu and pp fragments.
        c.isPP = false;
        c.isCeu = false;
        for (const auto& m : g->members()) self(self, m);
        return;
    }
  };
  walk(walk, f);
  return c;
}

std::vector<UnnestedAtomic> enumerateUnnestedAtomics(const Signature& sig, int tupleLen) {
  // Canonical shapes over v0..v_{n-1}: v0=v1, v0=c, R(v0..v_{k-1}),
  // f(v0..v_{k-1})=v_k.  Each shape is paired with every map n -> tupleLen.
  struct Shape { FormulaPtr canonical; int n; };
  std::vector<Shape> shapes;
  shapes.push_back({Formula::eq(Term::var(0), Term::var(1)), 2});
  for (const auto& c : sig.consts)
    shapes.push_back({Formula::eq(Term::var(0), Term::cnst(c.name)), 1});
  for (const auto& r : sig.rels) {
    std::vector<TermPtr> args;
    for (int i = 0; i < r.arity; ++i) args.push_back(Term::var(i));
    shapes.push_back({Formula::rel(r.name, std::move(args)), r.arity});
  }
  for (const auto& fn : sig.funs) {
    std::vector<TermPtr> args;
    for (int i = 0; i < fn.arity; ++i) args.push_back(Term::var(i));
    shapes.push_back({Formula::eq(Term::app(fn.name, std::move(args)),
                                  Term::var(fn.arity)),
                      fn.arity + 1});
  }

  std::vector<UnnestedAtomic> out;
  for (const auto& shape : shapes) {
    if (shape.n > 0 && tupleLen == 0) continue;
    std::vector<int> map(static_cast<std::size_t>(shape.n), 0);
    for (bool more = true; more;) {
      std::vector<std::pair<int, int>> rename;
      for (int i = 0; i < shape.n; ++i) rename.push_back({i, map[static_cast<std::size_t>(i)]});
      out.push_back({shape.canonical, map, renameFree(shape.canonical, rename)});
      // next map, lexicographic with the leftmost position fastest
      more = false;
      for (std::size_t i = 0; i < map.size(); ++i) {
        if (++map[i] < tupleLen) { more = true; break; }
        map[i] = 0;
      }
    }
  }
  return out;
}

bool sameFormula(const FormulaPtr& a, const FormulaPtr& b) {
  return printFormula(a) == printFormula(b);
}

}  // namespace wb
