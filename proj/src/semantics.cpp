#include "workbench/semantics.hpp"
#include <cstdint>

#include <algorithm>
#include <set>

#include "workbench/heyting.hpp"

namespace wb {

Elem assignmentExtent(const Structure& m, const Assignment& asg) {
  Elem acc = m.omega().top();
  for (const auto& [v, s] : asg) acc = m.omega().meet(acc, m.extent(s));
  return acc;
}

Elem termExtent(const Structure& m, const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Var:
      return m.omega().top();
    case Term::Kind::Const: {
      const auto* c = m.sig().cnst(t->symbol());
      if (!c) throw ConfigError("unknown constant '" + t->symbol() + "'");
      int idx = static_cast<int>(c - m.sig().consts.data());
      return m.extent(m.constValue(idx));
    }
    case Term::Kind::App: {
      Elem acc = m.omega().top();
      for (const auto& a : t->args()) acc = m.omega().meet(acc, termExtent(m, a));
      return acc;
    }
  }
  return m.omega().top();
}

Elem formulaExtent(const Structure& m, const FormulaPtr& f) {
  Elem acc = m.omega().top();
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      for (const auto& t : f->terms()) acc = m.omega().meet(acc, termExtent(m, t));
      return acc;
    case Formula::Kind::Check:
      return m.omega().top();
    default:
      for (const auto& g : f->members()) acc = m.omega().meet(acc, formulaExtent(m, g));
      return acc;
  }
}

Sec evalTerm(const Structure& m, const TermPtr& t, const Assignment& asg) {
  switch (t->kind()) {
    case Term::Kind::Var: {
      auto it = asg.find(t->varIndex());
      if (it == asg.end())
        throw ConfigError("unassigned variable v" + std::to_string(t->varIndex()));
      return it->second;
    }
    case Term::Kind::Const: {
      const auto* c = m.sig().cnst(t->symbol());
      if (!c) throw ConfigError("unknown constant '" + t->symbol() + "'");
      int idx = static_cast<int>(c - m.sig().consts.data());
      // Constants are cut down to the assignment's extent, so every term
      // evaluated under asg lives over the same stage.
      return m.restrict(m.constValue(idx), assignmentExtent(m, asg));
    }
    case Term::Kind::App: {
      const auto* fn = m.sig().fun(t->symbol());
      if (!fn) throw ConfigError("unknown function '" + t->symbol() + "'");
      int idx = static_cast<int>(fn - m.sig().funs.data());
      std::vector<Sec> args;
      for (const auto& a : t->args()) args.push_back(evalTerm(m, a, asg));
      return m.funValue(idx, args);
    }
  }
  throw ConfigError("malformed term");
}

// Computed per node from the children's cached sets, so shared subtrees are
// visited once; freeVars would re-expand them on every call.
const std::vector<int>& Evaluator::freeOf(const FormulaPtr& f) {
  auto it = fv_.find(f);
  if (it != fv_.end()) return it->second;
  std::vector<int> out;
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      out = freeVars(f);  // atoms are small trees; the direct walk is fine
      break;
    case Formula::Kind::Check:
      break;
    default: {
      std::set<int> acc;
      for (const auto& g : f->members()) {
        const auto& sub = freeOf(g);
        acc.insert(sub.begin(), sub.end());
      }
      if (f->kind() == Formula::Kind::Exists ||
          f->kind() == Formula::Kind::Forall)
        for (int v : f->boundVars()) acc.erase(v);
      out.assign(acc.begin(), acc.end());
      break;
    }
  }
  return fv_.emplace(f, std::move(out)).first->second;
}

Elem Evaluator::extentOf(const FormulaPtr& f) {
  auto it = fe_.find(f);
  if (it != fe_.end()) return it->second;
  const auto& o = m_.omega();
  Elem acc = o.top();
  switch (f->kind()) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      for (const auto& t : f->terms()) acc = o.meet(acc, termExtent(m_, t));
      break;
    case Formula::Kind::Check:
      break;
    default:
      for (const auto& g : f->members()) acc = o.meet(acc, extentOf(g));
      break;
  }
  fe_.emplace(f, acc);
  return acc;
}

Elem Evaluator::eval(const FormulaPtr& f, const Assignment& asg) {
  // The key packs one byte per datum while everything fits; carriers and
  // variable indices are tiny in practice, so the key usually stays within
  // the small-string buffer and costs no allocation.  The rare oversized
  // value falls back to an unambiguous decimal spelling.
  std::string key;
  auto pack = [&key](std::uint32_t x) {
    if (x < 0xfe) {
      key.push_back(static_cast<char>(x));
    } else {
      key.push_back(static_cast<char>(0xfe));
      key += std::to_string(x);
      key.push_back(static_cast<char>(0xff));
    }
  };
  for (int v : freeOf(f)) {
    auto it = asg.find(v);
    if (it == asg.end())
      throw ConfigError("unassigned variable v" + std::to_string(v));
    pack(static_cast<std::uint32_t>(v));
    pack(it->second);
  }
  // The clauses close over the whole assignment's extent, so sections bound
  // to variables not occurring in f still matter; fold them into the key.
  pack(assignmentExtent(m_, asg));
  auto mk = std::make_pair(f, std::move(key));
  auto hit = memo_.find(mk);
  if (hit != memo_.end()) return hit->second;
  Elem value = evalRaw(f, asg);
  memo_.emplace(std::move(mk), value);
  return value;
}

Elem Evaluator::evalRaw(const FormulaPtr& f, const Assignment& asg) {
  const auto& o = m_.omega();
  const Elem ea = assignmentExtent(m_, asg);

  switch (f->kind()) {
    case Formula::Kind::Eq: {
      Elem guard = o.meet(ea, extentOf(f));
      Sec lhs = evalTerm(m_, f->lhs(), asg);
      Sec rhs = evalTerm(m_, f->rhs(), asg);
      return o.meet(m_.eqValue(lhs, rhs), guard);
    }
    case Formula::Kind::Rel: {
      const auto* r = m_.sig().rel(f->relName());
      if (!r) throw ConfigError("unknown relation '" + f->relName() + "'");
      int idx = static_cast<int>(r - m_.sig().rels.data());
      std::vector<Sec> args;
      for (const auto& t : f->terms()) args.push_back(evalTerm(m_, t, asg));
      return o.meet(m_.relValue(idx, args), o.meet(ea, extentOf(f)));
    }
    case Formula::Kind::Not: {
      Elem sub = eval(f->body(), asg);
      return o.meet(o.meet(ea, extentOf(f)), o.neg(sub));
    }
    case Formula::Kind::Implies: {
      Elem l = eval(f->left(), asg);
      Elem r = eval(f->right(), asg);
      return o.meet(o.meet(ea, extentOf(f)), o.implies(l, r));
    }
    case Formula::Kind::BigAnd:
    case Formula::Kind::BigOr: {
      Elem q = extentOf(f);
      Assignment cut;
      for (const auto& [v, s] : asg) cut[v] = m_.restrict(s, q);
      Elem acc = f->kind() == Formula::Kind::BigAnd ? o.top() : o.bot();
      for (const auto& g : f->members()) {
        Elem val = eval(g, cut);
        acc = f->kind() == Formula::Kind::BigAnd ? o.meet(acc, val) : o.join(acc, val);
      }
      return o.meet(o.meet(ea, q), acc);
    }
    case Formula::Kind::Exists: {
      for (int v : f->boundVars())
        if (asg.count(v))
          throw ConfigError("variable v" + std::to_string(v) +
                            " is already bound and cannot be requantified");
      Elem acc = o.bot();
      std::vector<Sec> tuple(f->boundVars().size(), 0);
      auto walk = [&](auto&& self, std::size_t pos) -> void {
        if (pos == tuple.size()) {
          Assignment inner = asg;
          for (std::size_t i = 0; i < tuple.size(); ++i)
            inner[f->boundVars()[i]] = tuple[i];
          acc = o.join(acc, eval(f->body(), inner));
          return;
        }
        for (Sec s = 0; s < m_.carrierSize(); ++s) {
          tuple[pos] = s;
          self(self, pos + 1);
        }
      };
      walk(walk, 0);
      return acc;
    }
    case Formula::Kind::Forall: {
      for (int v : f->boundVars())
        if (asg.count(v))
          throw ConfigError("variable v" + std::to_string(v) +
                            " is already bound and cannot be requantified");
      Elem acc = o.meet(ea, extentOf(f));
      std::vector<Sec> tuple(f->boundVars().size(), 0);
      auto walk = [&](auto&& self, std::size_t pos) -> void {
        if (pos == tuple.size()) {
          Assignment inner = asg;
          Elem et = o.top();
          for (std::size_t i = 0; i < tuple.size(); ++i) {
            inner[f->boundVars()[i]] = tuple[i];
            et = o.meet(et, m_.extent(tuple[i]));
          }
          acc = o.meet(acc, o.implies(et, eval(f->body(), inner)));
          return;
        }
        for (Sec s = 0; s < m_.carrierSize(); ++s) {
          tuple[pos] = s;
          self(self, pos + 1);
        }
      };
      walk(walk, 0);
      return acc;
    }
    case Formula::Kind::Box: {
      Elem p = o.elemOrThrow(f->elemName());
      Elem sub = eval(f->body(), asg);
      Elem iff = o.meet(o.implies(p, sub), o.implies(sub, p));
      return o.meet(o.meet(ea, extentOf(f)), iff);
    }
    case Formula::Kind::Check:
      return o.meet(ea, o.elemOrThrow(f->elemName()));
  }
  throw ConfigError("malformed formula");
}

bool Evaluator::forces(const FormulaPtr& f, const Assignment& asg) {
  return eval(f, asg) ==
         m_.omega().meet(assignmentExtent(m_, asg), extentOf(f));
}

Elem eval(const Structure& m, const FormulaPtr& f, const Assignment& asg) {
  return Evaluator(m).eval(f, asg);
}

bool forces(const Structure& m, const FormulaPtr& f, const Assignment& asg) {
  return Evaluator(m).forces(f, asg);
}

Assignment positionalAssignment(const std::vector<Sec>& tuple) {
  std::vector<Sec> t = tuple;
  Assignment asg;
  for (std::size_t i = 0; i < t.size(); ++i) asg[static_cast<int>(i)] = t[i];
  return asg;
}

}  // namespace wb
