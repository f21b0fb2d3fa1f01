#include "support/boolean_oracle.hpp"

#include <stdexcept>

namespace wbtest {
namespace {

using wb::Assignment;
using wb::Formula;
using wb::Sec;
using wb::Structure;
using wb::Term;
using wb::TermPtr;

Sec evalTerm(const Structure& m, const TermPtr& t, const Assignment& asg) {
  switch (t->kind()) {
    case Term::Kind::Var: {
      auto it = asg.find(t->varIndex());
      if (it == asg.end()) throw std::logic_error("oracle: unassigned variable");
      return it->second;
    }
    case Term::Kind::Const: {
      const auto* c = m.sig().cnst(t->symbol());
      if (!c) throw std::logic_error("oracle: unknown constant");
      return m.constValue(static_cast<int>(c - m.sig().consts.data()));
    }
    case Term::Kind::App: {
      const auto* f = m.sig().fun(t->symbol());
      if (!f) throw std::logic_error("oracle: unknown function");
      std::vector<Sec> args;
      for (const auto& a : t->args()) args.push_back(evalTerm(m, a, asg));
      return m.funValue(static_cast<int>(f - m.sig().funs.data()), args);
    }
  }
  throw std::logic_error("oracle: bad term kind");
}

bool holds(const Structure& m, const wb::FormulaPtr& f, Assignment asg);

// Quantifiers range over the actual classical domain: the sections with
// extent top.  (The carrier also holds the inert bottom restriction, which
// is not an element of the classical structure.)
bool quantify(const Structure& m, const wb::FormulaPtr& f, Assignment asg,
              std::size_t i, bool conjunctive) {
  if (i == f->boundVars().size()) return holds(m, f->body(), asg);
  for (Sec a = 0; a < m.carrierSize(); ++a) {
    if (m.extent(a) != m.omega().top()) continue;
    asg[f->boundVars()[i]] = a;
    bool sub = quantify(m, f, asg, i + 1, conjunctive);
    if (sub != conjunctive) return sub;  // short-circuit
  }
  return conjunctive;
}

bool holds(const Structure& m, const wb::FormulaPtr& f, Assignment asg) {
  const auto& omega = m.omega();
  switch (f->kind()) {
    case Formula::Kind::Eq:
      return m.eqValue(evalTerm(m, f->lhs(), asg), evalTerm(m, f->rhs(), asg)) ==
             omega.top();
    case Formula::Kind::Rel: {
      const auto* r = m.sig().rel(f->relName());
      if (!r) throw std::logic_error("oracle: unknown relation");
      std::vector<Sec> args;
      for (const auto& t : f->terms()) args.push_back(evalTerm(m, t, asg));
      return m.relValue(static_cast<int>(r - m.sig().rels.data()), args) ==
             omega.top();
    }
    case Formula::Kind::Not:
      return !holds(m, f->body(), asg);
    case Formula::Kind::Implies:
      return !holds(m, f->left(), asg) || holds(m, f->right(), asg);
    case Formula::Kind::BigAnd: {
      for (const auto& g : f->members())
        if (!holds(m, g, asg)) return false;
      return true;
    }
    case Formula::Kind::BigOr: {
      for (const auto& g : f->members())
        if (holds(m, g, asg)) return true;
      return false;
    }
    case Formula::Kind::Forall:
      return quantify(m, f, asg, 0, /*conjunctive=*/true);
    case Formula::Kind::Exists:
      return quantify(m, f, asg, 0, /*conjunctive=*/false);
    case Formula::Kind::Box:
    case Formula::Kind::Check:
      throw std::logic_error("oracle: box/check outside the classical fragment");
  }
  throw std::logic_error("oracle: bad formula kind");
}

}  // namespace

bool tarskiHolds(const Structure& m, const wb::FormulaPtr& f,
                 const Assignment& asg) {
  if (m.omega().size() != 2)
    throw std::logic_error("oracle: algebra is not two-valued");
  for (const auto& [v, a] : asg)
    if (m.extent(a) != m.omega().top())
      throw std::logic_error("oracle: assigned section is not a classical element");
  return holds(m, f, asg);
}

}  // namespace wbtest
