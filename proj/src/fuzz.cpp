#include <cmath>
#include "workbench/fuzz.hpp"

#include <algorithm>
#include <functional>

#include "workbench/error.hpp"

namespace wb {
namespace {

// Declaration script for one structure; kept separate from the builder so a
// pair generator can replay or lightly mutate it.
struct Script {
  struct Ident {
    std::string a, b;
    Elem p = 0;
  };
  struct RelD {
    std::string rel;
    std::vector<std::string> args;
    Elem v = 0;
  };
  struct FunD {
    std::string fun;
    std::vector<std::string> args;
    std::string val;
  };

  std::vector<std::pair<std::string, Elem>> gens;
  std::vector<Ident> idents;
  std::vector<RelD> rels;
  std::vector<FunD> funs;
  std::vector<std::pair<std::string, std::string>> consts;
};

Elem randomElem(Rng& rng, const HeytingAlgebra& om) {
  return static_cast<Elem>(rng.below(om.size()));
}

// Walks every |gens|^arity argument list of generator names.
void eachArgTuple(int arity, const std::vector<std::pair<std::string, Elem>>& gens,
                  const std::function<void(const std::vector<std::string>&,
                                           const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(arity), 0);
  std::vector<std::string> args(static_cast<std::size_t>(arity));
  for (;;) {
    for (int i = 0; i < arity; ++i)
      args[static_cast<std::size_t>(i)] = gens[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].first;
    fn(args, idx);
    int k = arity - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] + 1 == static_cast<int>(gens.size())) {
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
  }
}

Script drawScript(Rng& rng, const HeytingAlgebra& om, const Signature& sig,
                  int maxGens, bool topExtentsOnly, bool allowIdents) {
  Script s;
  int gens = rng.range(1, std::max(1, maxGens));
  for (int g = 0; g < gens; ++g) {
    Elem e = om.top();
    if (!topExtentsOnly && g > 0 && rng.chance(1, 2)) e = randomElem(rng, om);
    s.gens.push_back({"g" + std::to_string(g), e});
  }

  if (allowIdents && gens >= 2 && rng.chance(1, 4)) {
    int a = rng.range(0, gens - 1), b = rng.range(0, gens - 1);
    Elem p = randomElem(rng, om);
    // A top-stage identification merges the generators outright and later
    // declarations could no longer name the absorbed one.
    if (a != b && p != om.top())
      s.idents.push_back({s.gens[static_cast<std::size_t>(a)].first,
                          s.gens[static_cast<std::size_t>(b)].first, p});
  }

  for (const auto& r : sig.rels)
    eachArgTuple(r.arity, s.gens, [&](const std::vector<std::string>& args,
                                      const std::vector<int>& idx) {
      if (!rng.chance(1, 2)) return;
      Elem bound = om.top();
      for (int i : idx) bound = om.meet(bound, s.gens[static_cast<std::size_t>(i)].second);
      s.rels.push_back({r.name, args, om.meet(randomElem(rng, om), bound)});
    });

  for (const auto& f : sig.funs)
    eachArgTuple(f.arity, s.gens, [&](const std::vector<std::string>& args,
                                      const std::vector<int>& idx) {
      Elem bound = om.top();
      for (int i : idx) bound = om.meet(bound, s.gens[static_cast<std::size_t>(i)].second);
      // Any generator whose extent lies above the argument extent can carry
      // the image once restricted down to it; a component always qualifies.
      std::vector<int> candidates;
      for (std::size_t g = 0; g < s.gens.size(); ++g)
        if (om.leq(bound, s.gens[g].second)) candidates.push_back(static_cast<int>(g));
      if (candidates.empty()) candidates.push_back(idx.empty() ? 0 : idx[0]);
      int g = candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
      s.funs.push_back({f.name, args,
                        s.gens[static_cast<std::size_t>(g)].first + "|" + om.name(bound)});
    });

  for (const auto& c : sig.consts) {
    std::vector<int> tops;
    for (std::size_t g = 0; g < s.gens.size(); ++g)
      if (s.gens[g].second == om.top()) tops.push_back(static_cast<int>(g));
    int g = tops.empty() ? 0 : tops[static_cast<std::size_t>(rng.below(tops.size()))];
    s.consts.push_back({c.name, s.gens[static_cast<std::size_t>(g)].first});
  }
  return s;
}

std::pair<StructurePtr, ValidationReport> buildScript(const HeytingAlgebra& om,
                                                      const Signature& sig,
                                                      const std::string& name,
                                                      const Script& s) {
  StructureBuilder b(om, sig, name);
  for (const auto& [g, e] : s.gens) b.addSection(g, e);
  for (const auto& i : s.idents) b.identify(i.a, i.p, i.b, i.p);
  for (const auto& r : s.rels) b.setRel(r.rel, r.args, r.v);
  for (const auto& f : s.funs) b.setFun(f.fun, f.args, f.val);
  for (const auto& [c, v] : s.consts) b.setConst(c, v);
  return b.build();
}

bool fits(const StructurePtr& m, int maxCarrier) {
  return maxCarrier <= 0 || static_cast<int>(m->carrierSize()) <= maxCarrier;
}

// Draw-and-build with retries: identifications are the only declarations
// that can make a script inconsistent, so the last attempt drops them and
// always validates; carrier overflow sheds a generator per retry.
StructurePtr randomStructureImpl(Rng& rng, const HeytingAlgebra& om,
                                 const Signature& sig, const std::string& name,
                                 const StructureOptions& opt, Script* outScript) {
  int gens = std::max(1, opt.maxGens);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Script s = drawScript(rng, om, sig, gens, opt.topExtentsOnly, true);
    try {
      auto [m, rep] = buildScript(om, sig, name, s);
      if (rep.ok() && fits(m, opt.maxCarrier)) {
        if (outScript) *outScript = s;
        return m;
      }
      if (rep.ok() && gens > 1) --gens;  // carrier too big: shed a generator
    } catch (const Error&) {
      // e.g. an identification absorbed a section a declaration still names
    }
  }
  Script s = drawScript(rng, om, sig, 1, opt.topExtentsOnly, false);
  auto [m, rep] = buildScript(om, sig, name, s);
  if (!rep.ok())
    throw ConfigError("random structure generation failed: " + rep.summary());
  if (outScript) *outScript = s;
  return m;
}

Script mutateScript(Rng& rng, const HeytingAlgebra& om, Script s) {
  // One local edit; anything the builder rejects is retried by the caller.
  std::vector<int> moves;
  if (!s.rels.empty()) moves.push_back(0);
  if (!s.idents.empty()) moves.push_back(1);
  if (s.gens.size() > 1) moves.push_back(2);
  if (moves.empty()) moves.push_back(3);
  switch (moves[static_cast<std::size_t>(rng.below(moves.size()))]) {
    case 0: {
      auto& d = s.rels[static_cast<std::size_t>(rng.below(s.rels.size()))];
      d.v = om.meet(randomElem(rng, om), d.v == om.bot() ? om.top() : d.v);
      break;
    }
    case 1:
      s.idents.erase(s.idents.begin() +
                     static_cast<std::ptrdiff_t>(rng.below(s.idents.size())));
      break;
    case 2: {
      auto& g = s.gens[1 + rng.below(s.gens.size() - 1)];
      g.second = randomElem(rng, om);
      break;
    }
    default:
      break;  // nothing mutable: the pair degenerates to a replay
  }
  return s;
}

}  // namespace

PosetSample randomPoset(Rng& rng, int maxPoints) {
  PosetSample s;
  s.points = rng.range(1, std::max(1, maxPoints));
  for (int i = 0; i < s.points; ++i)
    for (int j = i + 1; j < s.points; ++j)
      if (rng.chance(1, 3)) s.less.push_back({i, j});
  return s;
}

HeytingAlgebra randomDownsetAlgebra(Rng& rng, int maxPoints, int maxElems) {
  int points = maxPoints;
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto p = randomPoset(rng, points);
    auto om = HeytingAlgebra::fromPosetDownsets(p.points, p.less);
    if (maxElems <= 0 || static_cast<int>(om.size()) <= maxElems) return om;
    if (attempt % 8 == 7 && points > 1) --points;  // dense posets stay small
  }
  return HeytingAlgebra::fromPosetDownsets(1, {});
}

Signature randomSignature(Rng& rng, std::string name, const SignatureOptions& opt) {
  Signature sig;
  sig.name = std::move(name);
  int rels = rng.range(0, std::max(0, opt.maxRels));
  for (int i = 0; i < rels; ++i)
    sig.rels.push_back({"R" + std::to_string(i), rng.range(1, std::max(1, opt.maxRelArity))});
  int funs = rng.range(0, std::max(0, opt.maxFuns));
  for (int i = 0; i < funs; ++i)
    sig.funs.push_back({"f" + std::to_string(i), rng.range(1, std::max(1, opt.maxFunArity))});
  int consts = rng.range(0, std::max(0, opt.maxConsts));
  for (int i = 0; i < consts; ++i) sig.consts.push_back({"c" + std::to_string(i), ""});
  return sig;
}

StructurePtr randomStructure(Rng& rng, const HeytingAlgebra& omega,
                             const Signature& sig, const std::string& name,
                             const StructureOptions& opt) {
  return randomStructureImpl(rng, omega, sig, name, opt, nullptr);
}

namespace {

TermPtr randomTerm(Rng& rng, const Signature& sig, const std::vector<int>& scope,
                   int budget) {
  bool canConst = budget >= 1 && !sig.consts.empty();
  bool canApp = budget >= 1 && !sig.funs.empty();
  int roll = rng.range(0, 3);
  if (canApp && roll == 3) {
    const auto& f = sig.funs[static_cast<std::size_t>(rng.below(sig.funs.size()))];
    std::vector<TermPtr> args;
    for (int i = 0; i < f.arity; ++i)
      args.push_back(randomTerm(rng, sig, scope, budget - 1));
    return Term::app(f.name, std::move(args));
  }
  if (canConst && roll == 2)
    return Term::cnst(sig.consts[static_cast<std::size_t>(rng.below(sig.consts.size()))].name);
  return Term::var(scope[static_cast<std::size_t>(rng.below(scope.size()))]);
}

FormulaPtr randomAtom(Rng& rng, const Signature& sig, const FormulaOptions& opt,
                      const std::vector<int>& scope) {
  auto var = [&] { return scope[static_cast<std::size_t>(rng.below(scope.size()))]; };
  if (opt.unnestedOnly) {
    std::vector<int> kinds{0};
    if (!sig.consts.empty()) kinds.push_back(1);
    if (!sig.rels.empty()) kinds.push_back(2);
    if (!sig.funs.empty()) kinds.push_back(3);
    switch (kinds[static_cast<std::size_t>(rng.below(kinds.size()))]) {
      case 0:
        return Formula::eq(Term::var(var()), Term::var(var()));
      case 1:
        return Formula::eq(
            Term::var(var()),
            Term::cnst(sig.consts[static_cast<std::size_t>(rng.below(sig.consts.size()))].name));
      case 2: {
        const auto& r = sig.rels[static_cast<std::size_t>(rng.below(sig.rels.size()))];
        std::vector<TermPtr> args;
        for (int i = 0; i < r.arity; ++i) args.push_back(Term::var(var()));
        return Formula::rel(r.name, std::move(args));
      }
      default: {
        const auto& f = sig.funs[static_cast<std::size_t>(rng.below(sig.funs.size()))];
        std::vector<TermPtr> args;
        for (int i = 0; i < f.arity; ++i) args.push_back(Term::var(var()));
        return Formula::eq(Term::app(f.name, std::move(args)), Term::var(var()));
      }
    }
  }
  if (!sig.rels.empty() && rng.chance(1, 2)) {
    const auto& r = sig.rels[static_cast<std::size_t>(rng.below(sig.rels.size()))];
    std::vector<TermPtr> args;
    for (int i = 0; i < r.arity; ++i)
      args.push_back(randomTerm(rng, sig, scope, opt.maxTermRank));
    return Formula::rel(r.name, std::move(args));
  }
  return Formula::eq(randomTerm(rng, sig, scope, opt.maxTermRank),
                     randomTerm(rng, sig, scope, opt.maxTermRank));
}

FormulaPtr randomFormulaRec(Rng& rng, const Signature& sig,
                            const FormulaOptions& opt, std::vector<int> scope,
                            int depth, int qleft, int& nextVar) {
  enum { Atom, NotC, Imp, AndC, OrC, ForallC, ExistsC, BoxC, CheckC };
  std::vector<int> menu{Atom, Atom};
  if (depth > 0) {
    menu.insert(menu.end(), {NotC, Imp, AndC, OrC});
    if (qleft != 0) menu.insert(menu.end(), {ForallC, ExistsC});
    if (opt.allowBox && opt.omega) menu.push_back(BoxC);
  }
  if (opt.allowCheck && opt.omega) menu.push_back(CheckC);

  auto sub = [&](std::vector<int> sc, int q) {
    return randomFormulaRec(rng, sig, opt, std::move(sc), depth - 1, q, nextVar);
  };
  switch (menu[static_cast<std::size_t>(rng.below(menu.size()))]) {
    case NotC:
      return Formula::not_(sub(scope, qleft));
    case Imp:
      return Formula::implies(sub(scope, qleft), sub(scope, qleft));
    case AndC:
    case OrC: {
      bool isAnd = rng.chance(1, 2);
      std::vector<FormulaPtr> ms;
      int k = rng.range(1, 3);
      for (int i = 0; i < k; ++i) ms.push_back(sub(scope, qleft));
      return isAnd ? Formula::bigAnd(std::move(ms)) : Formula::bigOr(std::move(ms));
    }
    case ForallC:
    case ExistsC: {
      bool isAll = rng.chance(1, 2);
      int k = rng.range(1, 2);
      std::vector<int> bound;
      auto inner = scope;
      for (int i = 0; i < k; ++i) {
        bound.push_back(nextVar);
        inner.push_back(nextVar++);
      }
      auto body = randomFormulaRec(rng, sig, opt, std::move(inner), depth - 1,
                                   qleft < 0 ? qleft : qleft - 1, nextVar);
      return isAll ? Formula::forall(std::move(bound), std::move(body))
                   : Formula::exists(std::move(bound), std::move(body));
    }
    case BoxC:
      return Formula::box(opt.omega->name(randomElem(rng, *opt.omega)),
                          sub(scope, qleft));
    case CheckC:
      return Formula::check(opt.omega->name(randomElem(rng, *opt.omega)));
    default:
      return randomAtom(rng, sig, opt, scope);
  }
}

}  // namespace

FormulaPtr randomFormula(Rng& rng, const Signature& sig, const FormulaOptions& opt) {
  std::vector<int> scope;
  int pool = std::max(1, opt.varPool);
  for (int v = 0; v < pool; ++v) scope.push_back(v);
  int nextVar = pool;
  return randomFormulaRec(rng, sig, opt, std::move(scope), std::max(0, opt.maxDepth),
                          opt.maxQDegree, nextVar);
}

EquivalencePair randomEquivalencePair(Rng& rng, const PairOptions& opt) {
  EquivalencePair pair;
  pair.omega = std::make_shared<HeytingAlgebra>(
      randomDownsetAlgebra(rng, opt.maxAlgebraPoints, opt.maxAlgebraElems));
  SignatureOptions sopt;
  sopt.maxRels = 1;
  sopt.maxRelArity = 2;
  sopt.maxFuns = 1;
  sopt.maxFunArity = 1;
  sopt.maxConsts = 1;
  pair.sig = std::make_shared<Signature>(randomSignature(rng, "fuzz", sopt));

  StructureOptions mopt;
  mopt.maxGens = opt.maxGens;
  mopt.maxCarrier = opt.maxCarrier;
  Script scriptM;
  pair.m = randomStructureImpl(rng, *pair.omega, *pair.sig, "M", mopt, &scriptM);

  // Second structure: replay, light mutation, or independent draw.
  int mode = rng.range(0, 3);  // 0: replay, 1-2: mutate, 3: fresh
  if (mode == 0) {
    pair.n = buildScript(*pair.omega, *pair.sig, "N", scriptM).first;
  } else if (mode != 3) {
    pair.n = nullptr;
    for (int attempt = 0; attempt < 8 && !pair.n; ++attempt) {
      auto s = mutateScript(rng, *pair.omega, scriptM);
      try {
        auto [n, rep] = buildScript(*pair.omega, *pair.sig, "N", s);
        if (rep.ok() && fits(n, opt.maxCarrier)) pair.n = n;
      } catch (const Error&) {
      }
    }
    if (!pair.n) pair.n = buildScript(*pair.omega, *pair.sig, "N", scriptM).first;
  } else {
    pair.n = randomStructureImpl(rng, *pair.omega, *pair.sig, "N", mopt, nullptr);
  }

  pair.alpha = rng.range(1, std::max(1, opt.maxAlpha));
  int c = static_cast<int>(std::max(pair.m->carrierSize(), pair.n->carrierSize()));
  // Characteristic-sentence evaluation visits about carrier^(2(lh+alpha))
  // node/binding pairs per algebra element, so nonempty anchors are only
  // drawn for shapes where that stays small.
  int lhMax = 0;
  for (int cand = 1; cand <= 2; ++cand)
    if (std::pow(c, 2.0 * (cand + pair.alpha)) * pair.omega->size() <= 4.0e5)
      lhMax = cand;
  int lh = rng.range(0, lhMax);
  // Anchor components all share one extent: with mixed extents a raw atomic
  // value can exceed the anchor extent, where sentence forcing (masked by
  // the full assignment) cannot see it, and the four verdicts would measure
  // different relations.
  for (int attempt = 0; lh > 0 && attempt < 10; ++attempt) {
    Elem e = rng.chance(1, 2) ? pair.omega->top()
                              : randomElem(rng, *pair.omega);
    std::vector<Sec> am, bn;
    for (Sec s = 0; s < pair.m->carrierSize(); ++s)
      if (pair.m->extent(s) == e) am.push_back(s);
    for (Sec s = 0; s < pair.n->carrierSize(); ++s)
      if (pair.n->extent(s) == e) bn.push_back(s);
    if (am.empty() || bn.empty()) continue;
    pair.abar.clear();
    pair.bbar.clear();
    for (int i = 0; i < lh; ++i) {
      pair.abar.push_back(am[static_cast<std::size_t>(rng.below(am.size()))]);
      pair.bbar.push_back(bn[static_cast<std::size_t>(rng.below(bn.size()))]);
    }
    break;
  }

  pair.moveCap = 1;
  return pair;
}

InjectedBug parseInjectedBug(const std::string& name) {
  if (name == "none") return InjectedBug::None;
  if (name == "flip-verdict") return InjectedBug::FlipVerdict;
  if (name == "drop-conjunct") return InjectedBug::DropConjunct;
  if (name == "skip-inverse") return InjectedBug::SkipInverse;
  throw ConfigError("unknown bug name '" + name +
                    "' (expected none, flip-verdict, drop-conjunct or skip-inverse)");
}

}  // namespace wb
