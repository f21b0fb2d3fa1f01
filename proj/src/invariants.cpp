#include "workbench/invariants.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "workbench/error.hpp"

namespace wb {
namespace {

// A compiled unnested atomic over tuple slots: evaluates by direct table
// lookup, which keeps the level-0 pass linear in the anchor pool.
struct BaseAtom {
  enum class K { EqVars, EqConst, Rel, FunEq };
  K k = K::EqVars;
  int a0 = 0, a1 = 0;      // tuple slots (EqVars both; EqConst a0; FunEq result a1)
  int sym = 0;             // rel/fun/const position in signature order
  std::vector<int> args;   // tuple slots for Rel / Fun arguments
  std::string key;         // printed instantiated atomic
  FormulaPtr inst;         // the instantiated formula itself
};

int relIndexOf(const Signature& sig, const std::string& n) {
  for (std::size_t i = 0; i < sig.rels.size(); ++i)
    if (sig.rels[i].name == n) return static_cast<int>(i);
  throw ConfigError("unknown relation '" + n + "'");
}

int funIndexOf(const Signature& sig, const std::string& n) {
  for (std::size_t i = 0; i < sig.funs.size(); ++i)
    if (sig.funs[i].name == n) return static_cast<int>(i);
  throw ConfigError("unknown function '" + n + "'");
}

int constIndexOf(const Signature& sig, const std::string& n) {
  for (std::size_t i = 0; i < sig.consts.size(); ++i)
    if (sig.consts[i].name == n) return static_cast<int>(i);
  throw ConfigError("unknown constant '" + n + "'");
}

std::vector<BaseAtom> compileAtoms(const Signature& sig, int len) {
  std::vector<BaseAtom> out;
  for (const auto& ua : enumerateUnnestedAtomics(sig, len)) {
    BaseAtom atom;
    atom.key = ua.key();
    atom.inst = ua.instantiated;
    const auto& c = ua.canonical;
    if (c->kind() == Formula::Kind::Rel) {
      atom.k = BaseAtom::K::Rel;
      atom.sym = relIndexOf(sig, c->relName());
      atom.args = ua.indexMap;
    } else {
      if (c->lhs()->kind() == Term::Kind::App) {
        atom.k = BaseAtom::K::FunEq;
        atom.sym = funIndexOf(sig, c->lhs()->symbol());
        atom.args.assign(ua.indexMap.begin(), ua.indexMap.end() - 1);
        atom.a1 = ua.indexMap.back();
      } else if (c->rhs()->kind() == Term::Kind::Const) {
        atom.k = BaseAtom::K::EqConst;
        atom.sym = constIndexOf(sig, c->rhs()->symbol());
        atom.a0 = ua.indexMap[0];
      } else {
        atom.k = BaseAtom::K::EqVars;
        atom.a0 = ua.indexMap[0];
        atom.a1 = ua.indexMap[1];
      }
    }
    out.push_back(std::move(atom));
  }
  return out;
}

Elem atomValue(const Structure& m, const BaseAtom& atom,
               const std::vector<Sec>& w) {
  auto gather = [&](const std::vector<int>& slots) {
    std::vector<Sec> t;
    t.reserve(slots.size());
    for (int s : slots) t.push_back(w[static_cast<std::size_t>(s)]);
    return t;
  };
  switch (atom.k) {
    case BaseAtom::K::EqVars:
      return m.eqValue(w[static_cast<std::size_t>(atom.a0)],
                       w[static_cast<std::size_t>(atom.a1)]);
    case BaseAtom::K::EqConst:
      return m.eqValue(w[static_cast<std::size_t>(atom.a0)],
                       m.constValue(atom.sym));
    case BaseAtom::K::Rel:
      return m.relValue(atom.sym, gather(atom.args));
    case BaseAtom::K::FunEq:
      return m.eqValue(m.funValue(atom.sym, gather(atom.args)),
                       w[static_cast<std::size_t>(atom.a1)]);
  }
  return 0;
}

}  // namespace

struct InvariantEngine::Impl {
  const HeytingAlgebra* omega = nullptr;
  const Signature* sig = nullptr;
  std::vector<const Structure*> pool;  // probes first, then extra anchors
  int probeCount = 0;
  std::vector<int> canon;  // probe pool-indices in id-sorted emission order
  int anchorLen = 0;
  int alpha = 0;
  InvariantCaps caps;

  std::map<int, std::vector<BaseAtom>> atomsByLen;
  // classes[{level, len}][poolIdx][tupleCode]
  std::map<std::pair<int, int>, std::vector<std::vector<int>>> classes;

  std::map<std::tuple<int, int, int, std::size_t>, FormulaPtr> sentMemo;
  std::vector<std::unique_ptr<Evaluator>> evals;
  long long sentenceConjuncts = 0;
  bool strictConstsChecked = false;

  // Structural interning for conjunct deduplication.  Two nodes get the same
  // id exactly when they print identically, but the id of a node costs only
  // its out-degree: children are referenced by their cached ids instead of
  // being re-printed.  Keys hold shared ownership so ids cannot go stale
  // when a rejected duplicate is destroyed and its address reused.
  std::unordered_map<FormulaPtr, int> shapeId;
  std::map<std::string, int> shapeIntern;

  int dedupId(const FormulaPtr& f) {
    auto hit = shapeId.find(f);
    if (hit != shapeId.end()) return hit->second;
    std::string key;
    switch (f->kind()) {
      case Formula::Kind::Eq:
      case Formula::Kind::Rel:
        key = printFormula(f);  // atoms are small; their print is the shape
        break;
      default: {
        key.push_back(static_cast<char>('A' + static_cast<int>(f->kind())));
        if (f->kind() == Formula::Kind::Box ||
            f->kind() == Formula::Kind::Check) {
          key += f->elemName();
          key.push_back('|');
        }
        if (f->kind() == Formula::Kind::Exists ||
            f->kind() == Formula::Kind::Forall)
          for (int v : f->boundVars()) {
            key += std::to_string(v);
            key.push_back(',');
          }
        for (const auto& g : f->members()) {
          key += std::to_string(dedupId(g));
          key.push_back(';');
        }
        break;
      }
    }
    auto it = shapeIntern.find(key);
    if (it == shapeIntern.end())
      it = shapeIntern.emplace(std::move(key),
                               static_cast<int>(shapeIntern.size())).first;
    shapeId.emplace(f, it->second);
    return it->second;
  }

  std::size_t carrier(int i) const { return pool[i]->carrierSize(); }

  std::size_t space(int i, int len) const {
    std::size_t s = 1;
    for (int k = 0; k < len; ++k) {
      std::size_t c = carrier(i);
      if (c == 0) return len == 0 ? 1 : 0;
      if (s > static_cast<std::size_t>(caps.searchBudget) / c + 1) return SIZE_MAX;
      s *= c;
    }
    return s;
  }

  std::vector<Sec> decode(int i, std::size_t code, int len) const {
    std::vector<Sec> t(static_cast<std::size_t>(len));
    std::size_t c = carrier(i);
    for (int k = 0; k < len; ++k) {
      t[static_cast<std::size_t>(k)] = static_cast<Sec>(code % c);
      code /= c;
    }
    return t;
  }

  std::size_t encode(int i, const std::vector<Sec>& t) const {
    std::size_t c = carrier(i), code = 0, mul = 1;
    for (Sec s : t) {
      code += static_cast<std::size_t>(s) * mul;
      mul *= c;
    }
    return code;
  }

  const std::vector<BaseAtom>& atoms(int len) {
    auto it = atomsByLen.find(len);
    if (it == atomsByLen.end())
      it = atomsByLen.emplace(len, compileAtoms(*sig, len)).first;
    return it->second;
  }

  void buildLevel0(int len) {
    auto& table = classes[{0, len}];
    table.assign(pool.size(), {});
    const auto& as = atoms(len);
    std::map<std::vector<Elem>, int> intern;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      std::size_t n = space(static_cast<int>(i), len);
      table[i].assign(n, -1);
      std::vector<Elem> sigv(as.size());
      for (std::size_t code = 0; code < n; ++code) {
        auto w = decode(static_cast<int>(i), code, len);
        for (std::size_t k = 0; k < as.size(); ++k)
          sigv[k] = atomValue(*pool[i], as[k], w);
        auto [it, fresh] = intern.emplace(sigv, static_cast<int>(intern.size()));
        (void)fresh;
        table[i][code] = it->second;
      }
    }
  }

  // Builds level beta+1 classes at anchor length len from the level-beta
  // classes at lengths len..len+moveCap.
  void buildTransition(int beta, int len) {
    const int nOmega = static_cast<int>(omega->size());
    const int cap = caps.moveCap;

    // Intern a restriction profile per key tuple: its extension length n,
    // E(t-bar), and the level-beta class of the key anchor restricted to
    // each algebra element.
    std::map<std::vector<int>, int> profIntern;
    std::vector<std::vector<int>> profiles;
    struct KeyRef {
      Elem es = 0, et = 0;
      int pid = 0;
    };
    // keyRefs[j][n][code]
    std::vector<std::vector<std::vector<KeyRef>>> keyRefs(
        static_cast<std::size_t>(probeCount));
    for (int j = 0; j < probeCount; ++j) {
      keyRefs[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(cap) + 1);
      for (int n = 0; n <= cap; ++n) {
        const auto& cls = classes.at({beta, len + n})[static_cast<std::size_t>(j)];
        std::size_t sp = space(j, len + n);
        auto& slot = keyRefs[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)];
        slot.resize(sp);
        for (std::size_t code = 0; code < sp; ++code) {
          auto x = decode(j, code, len + n);
          std::vector<Sec> sbar(x.begin(), x.begin() + len);
          std::vector<Sec> tbar(x.begin() + len, x.end());
          KeyRef ref;
          ref.es = pool[j]->tupleExtent(sbar);
          ref.et = pool[j]->tupleExtent(tbar);
          std::vector<int> prof;
          prof.reserve(static_cast<std::size_t>(nOmega) + 2);
          prof.push_back(n);
          prof.push_back(ref.et);
          for (Elem e = 0; e < static_cast<Elem>(nOmega); ++e)
            prof.push_back(cls[encode(j, pool[j]->restrictTuple(x, e))]);
          auto [it, fresh] =
              profIntern.emplace(std::move(prof), static_cast<int>(profiles.size()));
          if (fresh) profiles.push_back(it->first);
          ref.pid = it->second;
          slot[code] = ref;
        }
      }
    }

    // Keys available at a given anchor extent w: E(t-bar) <= w /\ E(s-bar).
    std::vector<std::vector<int>> pidList(static_cast<std::size_t>(nOmega));
    std::vector<bool> pidListDone(static_cast<std::size_t>(nOmega), false);
    auto pidsForExtent = [&](Elem w) -> const std::vector<int>& {
      auto& list = pidList[static_cast<std::size_t>(w)];
      if (!pidListDone[static_cast<std::size_t>(w)]) {
        std::set<int> seen;
        for (int j = 0; j < probeCount; ++j)
          for (int n = 0; n <= cap; ++n)
            for (const auto& ref :
                 keyRefs[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)])
              if (omega->leq(ref.et, omega->meet(w, ref.es))) seen.insert(ref.pid);
        list.assign(seen.begin(), seen.end());
        pidListDone[static_cast<std::size_t>(w)] = true;
      }
      return list;
    };

    auto& table = classes[{beta + 1, len}];
    table.assign(pool.size(), {});
    std::map<std::vector<int>, int> intern;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& prevCls = classes.at({beta, len})[i];
      std::size_t sp = space(static_cast<int>(i), len);
      table[i].assign(sp, -1);
      for (std::size_t code = 0; code < sp; ++code) {
        auto w = decode(static_cast<int>(i), code, len);
        Elem ew = pool[i]->tupleExtent(w);
        // Realized classes of the extended anchors, per extension length and
        // exact extension extent.
        std::vector<std::vector<std::set<int>>> realized(
            static_cast<std::size_t>(cap) + 1,
            std::vector<std::set<int>>(static_cast<std::size_t>(nOmega)));
        for (int n = 0; n <= cap; ++n) {
          const auto& extCls = classes.at({beta, len + n})[i];
          std::size_t spc = space(static_cast<int>(i), n);
          std::size_t mul = space(static_cast<int>(i), len);
          for (std::size_t cc = 0; cc < spc; ++cc) {
            auto cbar = decode(static_cast<int>(i), cc, n);
            Elem ec = pool[i]->tupleExtent(cbar);
            realized[static_cast<std::size_t>(n)][static_cast<std::size_t>(ec)]
                .insert(extCls[code + cc * mul]);
          }
        }
        std::vector<int> clsKey;
        clsKey.push_back(prevCls[code]);
        clsKey.push_back(ew);
        for (int pid : pidsForExtent(ew)) {
          const auto& prof = profiles[static_cast<std::size_t>(pid)];
          int n = prof[0];
          Elem et = prof[1];
          Elem v = omega->bot();
          for (Elem e = 0; e < static_cast<Elem>(nOmega); ++e)
            if (omega->leq(e, et) &&
                realized[static_cast<std::size_t>(n)][static_cast<std::size_t>(e)]
                    .count(prof[2 + static_cast<std::size_t>(e)]))
              v = omega->join(v, e);
          clsKey.push_back(v);
        }
        auto [it, fresh] = intern.emplace(std::move(clsKey), static_cast<int>(intern.size()));
        (void)fresh;
        table[i][code] = it->second;
      }
    }
  }

  int poolIndexOf(const Structure& m) const {
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i] == &m) return static_cast<int>(i);
    throw ConfigError("structure '" + m.name() +
                      "' is not in the invariant engine's pool");
  }

  Evaluator& evaluatorFor(int i) {
    if (evals.empty()) evals.resize(pool.size());
    if (!evals[static_cast<std::size_t>(i)])
      evals[static_cast<std::size_t>(i)] =
          std::make_unique<Evaluator>(*pool[static_cast<std::size_t>(i)]);
    return *evals[static_cast<std::size_t>(i)];
  }

  // The slab value at key (probe j, x = s-bar t-bar) for the anchor
  // (i, w-bar) using level-beta classes.
  Elem slabValue(int beta, int i, const std::vector<Sec>& wbar, int j,
                 const std::vector<Sec>& x, int n) {
    const int len = static_cast<int>(wbar.size());
    const auto& keyCls = classes.at({beta, len + n})[static_cast<std::size_t>(j)];
    const auto& extCls = classes.at({beta, len + n})[static_cast<std::size_t>(i)];
    Elem et = pool[static_cast<std::size_t>(j)]->tupleExtent(
        std::vector<Sec>(x.begin() + len, x.end()));
    Elem v = omega->bot();
    std::size_t spc = space(i, n);
    for (Elem e = 0; e < static_cast<Elem>(omega->size()); ++e) {
      if (!omega->leq(e, et)) continue;
      int want = keyCls[encode(j, pool[static_cast<std::size_t>(j)]->restrictTuple(x, e))];
      bool hit = false;
      for (std::size_t cc = 0; cc < spc && !hit; ++cc) {
        auto cbar = decode(i, cc, n);
        if (pool[static_cast<std::size_t>(i)]->tupleExtent(cbar) != e) continue;
        std::vector<Sec> ext = wbar;
        ext.insert(ext.end(), cbar.begin(), cbar.end());
        hit = extCls[encode(i, ext)] == want;
      }
      if (hit) v = omega->join(v, e);
    }
    return v;
  }

  FormulaPtr buildSentence(int level, int j, const std::vector<Sec>& x) {
    const int len = static_cast<int>(x.size());
    auto key = std::make_tuple(level, j, len, encode(j, x));
    auto hit = sentMemo.find(key);
    if (hit != sentMemo.end()) return hit->second;

    std::vector<FormulaPtr> members;
    std::set<int> seen;
    auto push = [&](FormulaPtr f) {
      if (seen.insert(dedupId(f)).second) members.push_back(std::move(f));
    };

    if (level == 0) {
      for (const auto& atom : atoms(len))
        push(Formula::box(omega->name(atomValue(*pool[static_cast<std::size_t>(j)], atom, x)),
                          atom.inst));
    } else {
      push(buildSentence(level - 1, j, x));
      Elem ex = pool[static_cast<std::size_t>(j)]->tupleExtent(x);
      for (int ck : canon) {
        const Structure& probe = *pool[static_cast<std::size_t>(ck)];
        for (int n = 0; n <= caps.moveCap; ++n) {
          std::size_t sp = space(ck, len + n);
          for (std::size_t code = 0; code < sp; ++code) {
            auto y = decode(ck, code, len + n);
            Elem es = probe.tupleExtent(std::vector<Sec>(y.begin(), y.begin() + len));
            Elem et = probe.tupleExtent(std::vector<Sec>(y.begin() + len, y.end()));
            if (!omega->leq(et, omega->meet(ex, es))) continue;
            FormulaPtr inner = buildSentence(level - 1, ck, y);
            if (n > 0) {
              std::vector<int> bound;
              for (int k = 0; k < n; ++k) bound.push_back(len + k);
              inner = Formula::exists(std::move(bound), std::move(inner));
            }
            Elem sub = evaluatorFor(j).eval(inner, positionalAssignment(x));
            push(Formula::box(omega->name(sub), std::move(inner)));
          }
        }
      }
    }
    sentenceConjuncts += static_cast<long long>(members.size());
    if (sentenceConjuncts > caps.searchBudget)
      throw CapExceeded("characteristic sentence exceeds the search budget; "
                        "lower alpha or set WORKBENCH_MAX_SEARCH");
    auto out = Formula::bigAnd(std::move(members));
    sentMemo.emplace(key, out);
    return out;
  }
};

InvariantEngine::InvariantEngine(std::vector<const Structure*> probes,
                                 int anchorLen, int alpha, InvariantCaps caps,
                                 std::vector<const Structure*> extras)
    : impl_(std::make_unique<Impl>()), anchorLen_(anchorLen), alpha_(alpha),
      caps_(caps) {
  if (probes.empty()) throw ConfigError("the probe class is empty");
  if (anchorLen < 0 || alpha < 0 || caps.moveCap < 1)
    throw ConfigError("anchor length and alpha must be nonnegative, moveCap positive");
  auto& im = *impl_;
  im.anchorLen = anchorLen;
  im.alpha = alpha;
  im.caps = caps;
  for (const Structure* p : probes)
    if (std::find(im.pool.begin(), im.pool.end(), p) == im.pool.end())
      im.pool.push_back(p);
  im.probeCount = static_cast<int>(im.pool.size());
  for (const Structure* e : extras)
    if (std::find(im.pool.begin(), im.pool.end(), e) == im.pool.end())
      im.pool.push_back(e);
  im.omega = &im.pool.front()->omega();
  im.sig = &im.pool.front()->sig();
  for (const Structure* p : im.pool) {
    if (&p->omega() != im.omega)
      throw CrossStructureError("invariant structures live over different algebras");
    if (&p->sig() != im.sig)
      throw CrossStructureError("invariant structures have different signatures");
  }
  im.canon.resize(static_cast<std::size_t>(im.probeCount));
  for (int j = 0; j < im.probeCount; ++j) im.canon[static_cast<std::size_t>(j)] = j;
  std::sort(im.canon.begin(), im.canon.end(), [&](int a, int b) {
    return im.pool[static_cast<std::size_t>(a)]->id() <
           im.pool[static_cast<std::size_t>(b)]->id();
  });

  const int maxLen = anchorLen + alpha * caps.moveCap;
  long double total = 0;
  for (std::size_t i = 0; i < im.pool.size(); ++i)
    for (int len = anchorLen; len <= maxLen; ++len) {
      long double s = 1;
      for (int k = 0; k < len; ++k) s *= static_cast<long double>(im.carrier(static_cast<int>(i)));
      total += s;
    }
  if (total > static_cast<long double>(caps.searchBudget))
    throw CapExceeded("invariant anchor pool needs about " +
                      std::to_string(static_cast<long long>(total)) +
                      " tuples; the budget allows " +
                      std::to_string(caps.searchBudget) +
                      " (set WORKBENCH_MAX_SEARCH)");

  for (int len = anchorLen; len <= maxLen; ++len) im.buildLevel0(len);
  for (int beta = 0; beta < alpha; ++beta)
    for (int len = anchorLen; len <= anchorLen + (alpha - beta - 1) * caps.moveCap;
         ++len)
      im.buildTransition(beta, len);
}

InvariantEngine::~InvariantEngine() = default;

InvariantTable InvariantEngine::table(const Structure& m,
                                      const std::vector<Sec>& abar) {
  auto& im = *impl_;
  int i = im.poolIndexOf(m);
  if (static_cast<int>(abar.size()) != anchorLen_)
    throw ConfigError("anchor tuple length does not match the engine");
  InvariantTable t;
  t.structureName = m.name();
  t.anchorText = tupleToString(m, abar);
  t.anchorExtent = m.tupleExtent(abar);
  t.anchorLen = anchorLen_;
  t.alpha = alpha_;
  t.moveCap = caps_.moveCap;
  for (int ck : im.canon)
    t.probeNames.push_back(im.pool[static_cast<std::size_t>(ck)]->name());

  for (const auto& atom : im.atoms(anchorLen_))
    t.base[atom.key] = atomValue(m, atom, abar);

  for (int beta = 0; beta < alpha_; ++beta) {
    for (std::size_t cj = 0; cj < im.canon.size(); ++cj) {
      int j = im.canon[cj];
      const Structure& probe = *im.pool[static_cast<std::size_t>(j)];
      for (int n = 0; n <= caps_.moveCap; ++n) {
        std::size_t sp = im.space(j, anchorLen_ + n);
        for (std::size_t code = 0; code < sp; ++code) {
          auto x = im.decode(j, code, anchorLen_ + n);
          Elem es = probe.tupleExtent(
              std::vector<Sec>(x.begin(), x.begin() + anchorLen_));
          Elem et = probe.tupleExtent(
              std::vector<Sec>(x.begin() + anchorLen_, x.end()));
          if (!im.omega->leq(et, im.omega->meet(t.anchorExtent, es))) continue;
          t.slabs[{beta, static_cast<int>(cj), tupleToString(probe, x)}] =
              im.slabValue(beta, i, abar, j, x, n);
        }
      }
    }
  }
  return t;
}

bool InvariantEngine::equal(const Structure& m, const std::vector<Sec>& abar,
                            const Structure& n, const std::vector<Sec>& bbar) {
  auto& im = *impl_;
  if (static_cast<int>(abar.size()) != anchorLen_ ||
      static_cast<int>(bbar.size()) != anchorLen_)
    throw ConfigError("anchor tuple length does not match the engine");
  int i = im.poolIndexOf(m), j = im.poolIndexOf(n);
  const auto& cls = im.classes.at({alpha_, anchorLen_});
  return cls[static_cast<std::size_t>(i)][im.encode(i, abar)] ==
         cls[static_cast<std::size_t>(j)][im.encode(j, bbar)];
}

FormulaPtr InvariantEngine::sentence(const Structure& m,
                                     const std::vector<Sec>& abar) {
  auto& im = *impl_;
  int i = im.poolIndexOf(m);
  if (static_cast<int>(abar.size()) != anchorLen_)
    throw ConfigError("anchor tuple length does not match the engine");
  if (!im.strictConstsChecked) {
    for (const Structure* p : im.pool)
      for (std::size_t c = 0; c < im.sig->consts.size(); ++c)
        if (p->extent(p->constValue(static_cast<int>(c))) != im.omega->top())
          throw ConfigError(
              "characteristic sentences require constants with extent top");
    im.strictConstsChecked = true;
  }
  return im.buildSentence(alpha_, i, abar);
}

std::vector<FormulaPtr> InvariantEngine::sentenceLevels(
    const Structure& m, const std::vector<Sec>& abar) {
  std::vector<FormulaPtr> out;
  out.reserve(static_cast<std::size_t>(alpha_) + 1);
  sentence(m, abar);  // validates and fills the construction memo
  auto& im = *impl_;
  int i = im.poolIndexOf(m);
  for (int level = 0; level <= alpha_; ++level)
    out.push_back(im.buildSentence(level, i, abar));
  return out;
}

std::vector<Elem> InvariantEngine::sentenceValuesAt(
    const Structure& owner, const std::vector<Sec>& abar,
    const Structure& host, const std::vector<Sec>& bbar) {
  auto levels = sentenceLevels(owner, abar);
  auto& im = *impl_;
  int h = im.poolIndexOf(host);
  if (bbar.size() != abar.size())
    throw ConfigError("anchor tuple length does not match the engine");
  auto asg = positionalAssignment(bbar);
  std::vector<Elem> out;
  out.reserve(levels.size());
  for (const auto& s : levels) out.push_back(im.evaluatorFor(h).eval(s, asg));
  return out;
}

InvariantTable gInvariant(const Structure& m, const Structure& n,
                          const std::vector<Sec>& abar, int alpha,
                          InvariantCaps caps) {
  InvariantEngine eng({&m, &n}, static_cast<int>(abar.size()), alpha, caps);
  return eng.table(m, abar);
}

InvariantTable hInvariant(const std::vector<const Structure*>& probes,
                          const Structure& m, const std::vector<Sec>& abar,
                          int alpha, InvariantCaps caps) {
  InvariantEngine eng(probes, static_cast<int>(abar.size()), alpha, caps, {&m});
  return eng.table(m, abar);
}

FormulaPtr scottSentence(const std::vector<const Structure*>& probes,
                         const Structure& m, const std::vector<Sec>& abar,
                         int alpha, InvariantCaps caps) {
  InvariantEngine eng(probes, static_cast<int>(abar.size()), alpha, caps, {&m});
  return eng.sentence(m, abar);
}

CompareResult compareInvariants(const InvariantTable& x, const InvariantTable& y) {
  if (x.alpha != y.alpha || x.moveCap != y.moveCap || x.probeNames != y.probeNames)
    throw ConfigError("invariant tables were built with different parameters");
  if (x.anchorLen != y.anchorLen)
    throw IncomparableDomains("anchors have different lengths");
  if (x.anchorExtent != y.anchorExtent)
    throw IncomparableDomains("anchors have different extents");
  if (x.base.size() != y.base.size() || x.slabs.size() != y.slabs.size())
    throw ConfigError("invariant tables have mismatched key sets");

  CompareResult res;
  for (auto xi = x.base.begin(), yi = y.base.begin(); xi != x.base.end();
       ++xi, ++yi) {
    if (xi->first != yi->first)
      throw ConfigError("invariant tables have mismatched key sets");
    if (xi->second != yi->second) {
      res.firstDivergence = Divergence{0, xi->first, xi->second, yi->second};
      return res;
    }
  }
  for (auto xi = x.slabs.begin(), yi = y.slabs.begin(); xi != x.slabs.end();
       ++xi, ++yi) {
    if (xi->first != yi->first)
      throw ConfigError("invariant tables have mismatched key sets");
    if (xi->second != yi->second) {
      res.firstDivergence =
          Divergence{xi->first.level + 1,
                     x.probeNames[static_cast<std::size_t>(xi->first.probe)] +
                         " : " + xi->first.tuple,
                     xi->second, yi->second};
      return res;
    }
  }
  res.equal = true;
  return res;
}

std::string renderInvariantTable(const InvariantTable& t,
                                 const HeytingAlgebra& omega) {
  std::string out = "invariant " + t.structureName + " anchor=" + t.anchorText +
                    " extent=" + omega.name(t.anchorExtent) +
                    " alpha=" + std::to_string(t.alpha) + "\n";
  for (const auto& [k, v] : t.base)
    out += "  base " + k + " = " + omega.name(v) + "\n";
  for (const auto& [k, v] : t.slabs)
    out += "  level " + std::to_string(k.level + 1) + " probe=" +
           t.probeNames[static_cast<std::size_t>(k.probe)] + " tuple=" +
           k.tuple + " = " + omega.name(v) + "\n";
  return out;
}

}  // namespace wb
