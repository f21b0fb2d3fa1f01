#include "workbench/backforth.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <string>

#include "workbench/heyting.hpp"

namespace wb {

std::uint64_t defaultSearchBudget() {
  if (const char* env = std::getenv("WORKBENCH_MAX_SEARCH")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 2'000'000;
}

namespace {

IsoPairs closePairs(const Structure& m, const Structure& n, IsoPairs pairs) {
  IsoPairs out;
  for (const auto& [a, b] : pairs)
    for (Elem p = 0; p < m.omega().size(); ++p)
      out.push_back({m.restrict(a, p), n.restrict(b, p)});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// A closed pair set is a partial isomorphism when every unnested atom takes
// the same value on matching tuples from its domain and range.
bool validIso(const Structure& m, const Structure& n, const IsoPairs& h) {
  const auto& o = m.omega();
  for (const auto& [a, b] : h) {
    for (const auto& [a2, b2] : h)
      if (m.eqValue(a, a2) != n.eqValue(b, b2)) return false;
    for (std::size_t c = 0; c < m.sig().consts.size(); ++c)
      if (m.eqValue(a, m.constValue(static_cast<int>(c))) !=
          n.eqValue(b, n.constValue(static_cast<int>(c))))
        return false;
  }
  (void)o;
  const std::size_t k = h.size();
  auto tuples = [&](int arity, auto&& use) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
    auto walk = [&](auto&& self, std::size_t pos) -> void {
      if (pos == pick.size()) {
        use(pick);
        return;
      }
      for (std::size_t i = 0; i < k; ++i) {
        pick[pos] = i;
        self(self, pos + 1);
      }
    };
    walk(walk, 0);
  };
  bool ok = true;
  for (std::size_t r = 0; r < m.sig().rels.size() && ok; ++r)
    tuples(m.sig().rels[r].arity, [&](const std::vector<std::size_t>& pick) {
      if (!ok) return;
      std::vector<Sec> am, bn;
      for (auto i : pick) {
        am.push_back(h[i].first);
        bn.push_back(h[i].second);
      }
      if (m.relValue(static_cast<int>(r), am) != n.relValue(static_cast<int>(r), bn))
        ok = false;
    });
  for (std::size_t f = 0; f < m.sig().funs.size() && ok; ++f)
    tuples(m.sig().funs[f].arity + 1, [&](const std::vector<std::size_t>& pick) {
      if (!ok) return;
      std::vector<Sec> am, bn;
      for (std::size_t j = 0; j + 1 < pick.size(); ++j) {
        am.push_back(h[pick[j]].first);
        bn.push_back(h[pick[j]].second);
      }
      Sec targetM = h[pick.back()].first, targetN = h[pick.back()].second;
      if (m.eqValue(m.funValue(static_cast<int>(f), am), targetM) !=
          n.eqValue(n.funValue(static_cast<int>(f), bn), targetN))
        ok = false;
    });
  return ok;
}

}  // namespace

QTable::QTable(StructurePtr m, StructurePtr n, BackForthConfig cfg)
    : m_(std::move(m)), n_(std::move(n)), cfg_(cfg) {
  if (&m_->omega() != &n_->omega())
    throw CrossStructureError("structures live over different algebras");
  if (&m_->sig() != &n_->sig())
    throw CrossStructureError("structures have different signatures");
  if (m_->id() == n_->id())
    throw CrossStructureError(
        "comparison needs two structure objects; clone() one side first");
  if (cfg_.moveCap < 1 || cfg_.maxTupleLen < 0 || cfg_.maxAlpha < 0)
    throw ConfigError("caps must be positive (moveCap) and nonnegative");
  domCap_ = cfg_.maxTupleLen + cfg_.maxAlpha * cfg_.moveCap;
  buildUniverse();
}

void QTable::buildUniverse() {
  std::uint64_t spent = 0;
  auto charge = [&]() {
    if (++spent > cfg_.searchBudget)
      throw CapExceeded("partial-isomorphism search exceeded the budget of " +
                        std::to_string(cfg_.searchBudget) +
                        " steps (WORKBENCH_MAX_SEARCH)");
  };

  IsoPairs empty;
  std::deque<std::pair<int, int>> queue;  // (iso id, generators used)
  if (validIso(*m_, *n_, empty)) {
    index_[empty] = 0;
    isos_.push_back(empty);
    queue.push_back({0, 0});
  }
  while (!queue.empty()) {
    auto [id, gens] = queue.front();
    queue.pop_front();
    if (gens >= domCap_) continue;
    IsoPairs base = isos_[static_cast<std::size_t>(id)];
    for (Sec a = 0; a < m_->carrierSize(); ++a)
      for (Sec b = 0; b < n_->carrierSize(); ++b) {
        if (std::find(base.begin(), base.end(), std::make_pair(a, b)) != base.end())
          continue;
        charge();
        IsoPairs ext = base;
        ext.push_back({a, b});
        ext = closePairs(*m_, *n_, std::move(ext));
        if (index_.count(ext)) continue;
        if (!validIso(*m_, *n_, ext)) continue;
        int nid = static_cast<int>(isos_.size());
        index_[ext] = nid;
        isos_.push_back(ext);
        queue.push_back({nid, gens + 1});
      }
  }

  const std::size_t u = isos_.size();
  const std::size_t pairSpace =
      static_cast<std::size_t>(m_->carrierSize()) * n_->carrierSize();
  pairBits_.assign(u, Bitset(pairSpace));
  for (std::size_t i = 0; i < u; ++i)
    for (const auto& [a, b] : isos_[i])
      pairBits_[i].set(static_cast<std::size_t>(a) * n_->carrierSize() + b);
  hasDom_.assign(m_->carrierSize(), Bitset(u));
  hasRng_.assign(n_->carrierSize(), Bitset(u));
  for (std::size_t i = 0; i < u; ++i)
    for (const auto& [a, b] : isos_[i]) {
      hasDom_[a].set(i);
      hasRng_[b].set(i);
    }
  slice_.assign(u, std::vector<int>(m_->omega().size(), -1));
  supersets_.assign(u, Bitset());
}

std::optional<int> QTable::closeAndFind(const IsoPairs& pairs) const {
  IsoPairs closed = closePairs(*m_, *n_, pairs);
  if (!validIso(*m_, *n_, closed)) return std::nullopt;
  auto it = index_.find(closed);
  if (it == index_.end())
    throw CapExceeded("partial isomorphism needs more generators than the "
                      "configured caps admit");
  return it->second;
}

int QTable::sliceId(int isoId, Elem q) {
  int& memo = slice_[static_cast<std::size_t>(isoId)][q];
  if (memo >= 0) return memo;
  IsoPairs cut;
  for (const auto& [a, b] : isos_[static_cast<std::size_t>(isoId)])
    cut.push_back({m_->restrict(a, q), n_->restrict(b, q)});
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
  auto it = index_.find(cut);
  if (it == index_.end())
    throw CapExceeded("slice of a universe member escaped the universe");
  return memo = it->second;
}

void QTable::ensureLevel(int alpha) {
  const auto& o = m_->omega();
  if (levels_.empty()) {
    std::vector<Bitset> base(o.size(), Bitset(isos_.size(), true));
    if (cfg_.q0ExtentVariant) {
      for (Elem p = 0; p < o.size(); ++p) {
        Bitset bs(isos_.size());
        for (std::size_t i = 0; i < isos_.size(); ++i) {
          // Meet of the extents of the maximal domain sections: the pair set
          // is closed, so restrictions are quotiented away.
          Elem meet = o.top();
          for (const auto& [a, b] : isos_[i]) {
            bool maximal = true;
            for (const auto& [a2, b2] : isos_[i])
              if (a2 != a && m_->restrict(a2, m_->extent(a)) == a) maximal = false;
            if (maximal) meet = o.meet(meet, m_->extent(a));
          }
          if (meet == p) bs.set(i);
        }
        base[p] = bs;
      }
    }
    levels_.push_back(std::move(base));
  }
  while (static_cast<int>(levels_.size()) <= alpha) {
    int prev = static_cast<int>(levels_.size()) - 1;
    if (stabilizedAt_ >= 0 && prev >= stabilizedAt_) {
      levels_.push_back(levels_.back());
      continue;
    }
    std::vector<Bitset> next(m_->omega().size(), Bitset(isos_.size()));
    for (Elem p = 0; p < m_->omega().size(); ++p)
      for (std::size_t i = 0; i < isos_.size(); ++i)
        if (levels_[static_cast<std::size_t>(prev)][p].test(i) &&
            surviveRefine(static_cast<int>(i), p, prev))
          next[p].set(i);
    bool same = true;
    for (Elem p = 0; p < m_->omega().size() && same; ++p)
      same = next[p] == levels_.back()[p];
    levels_.push_back(std::move(next));
    if (same && stabilizedAt_ < 0) stabilizedAt_ = prev;
  }
}

bool QTable::surviveRefine(int isoId, Elem p, int prevAlpha) {
  return sideOk(isoId, p, prevAlpha, 0) && sideOk(isoId, p, prevAlpha, 1);
}

bool QTable::sideOk(int isoId, Elem p, int prevAlpha, int side) {
  const auto& o = m_->omega();
  const Structure& src = side == 0 ? *m_ : *n_;
  std::vector<Sec> pool;
  for (Sec s = 0; s < src.carrierSize(); ++s)
    if (o.leq(src.extent(s), p)) pool.push_back(s);

  std::vector<Sec> tuple;
  auto tupleOk = [&]() {
    Elem e = o.top();
    for (Sec s : tuple) e = o.meet(e, src.extent(s));
    Elem covered = o.bot();
    for (Elem q = 0; q < o.size(); ++q) {
      if (!o.leq(q, e)) continue;
      Bitset cand = levels_[static_cast<std::size_t>(prevAlpha)][q];
      cand &= supersetsOfSlice(isoId, q);
      for (Sec s : tuple)
        cand &= side == 0 ? hasDom_[src.restrict(s, q)] : hasRng_[src.restrict(s, q)];
      if (cand.any()) covered = o.join(covered, q);
    }
    return covered == e;
  };
  auto walk = [&](auto&& self, int remaining) -> bool {
    if (!tuple.empty() && !tupleOk()) return false;
    if (remaining == 0) return true;
    for (Sec s : pool) {
      tuple.push_back(s);
      bool ok = self(self, remaining - 1);
      tuple.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return walk(walk, cfg_.moveCap);
}

const Bitset& QTable::supersetsOfSlice(int isoId, Elem q) {
  int s = sliceId(isoId, q);
  Bitset& memo = supersets_[static_cast<std::size_t>(s)];
  if (memo.size() == 0) {
    Bitset bs(isos_.size());
    for (std::size_t u = 0; u < isos_.size(); ++u)
      if (pairBits_[static_cast<std::size_t>(s)].subsetOf(pairBits_[u])) bs.set(u);
    memo = std::move(bs);
  }
  return memo;
}

bool QTable::inQ(int alpha, Elem p, int isoId) {
  if (alpha < 0 || alpha > cfg_.maxAlpha)
    throw ConfigError("refinement level " + std::to_string(alpha) +
                      " is outside the configured maxAlpha of " +
                      std::to_string(cfg_.maxAlpha));
  ensureLevel(alpha);
  return levels_[static_cast<std::size_t>(alpha)][p].test(
      static_cast<std::size_t>(isoId));
}

std::vector<int> QTable::levelMembers(int alpha, Elem p) {
  ensureLevel(alpha);
  std::vector<int> out;
  for (std::size_t i = 0; i < isos_.size(); ++i)
    if (levels_[static_cast<std::size_t>(alpha)][p].test(i))
      out.push_back(static_cast<int>(i));
  return out;
}

int QTable::stabilization() {
  for (int a = 0; a < cfg_.maxAlpha; ++a) {
    ensureLevel(a + 1);
    if (stabilizedAt_ >= 0 && stabilizedAt_ <= a) return stabilizedAt_;
  }
  return stabilizedAt_ >= 0 && stabilizedAt_ <= cfg_.maxAlpha ? stabilizedAt_ : -1;
}

std::vector<QTable::CoverPiece> QTable::feasibleCover(int isoId, int alpha, int side,
                                                      const std::vector<Sec>& tuple) {
  ensureLevel(alpha);
  const auto& o = m_->omega();
  const Structure& src = side == 0 ? *m_ : *n_;
  Elem e = o.top();
  for (Sec s : tuple) e = o.meet(e, src.extent(s));
  std::vector<CoverPiece> out;
  for (Elem q = 0; q < o.size(); ++q) {
    if (!o.leq(q, e)) continue;
    Bitset cand = levels_[static_cast<std::size_t>(alpha)][q];
    cand &= supersetsOfSlice(isoId, q);
    for (Sec s : tuple)
      cand &= side == 0 ? hasDom_[src.restrict(s, q)] : hasRng_[src.restrict(s, q)];
    if (cand.any()) out.push_back({q, cand.firstSet()});
  }
  return out;
}

std::optional<SimWitness> simAlpha(QTable& qt, const std::vector<Sec>& abar,
                                   const std::vector<Sec>& bbar, int alpha) {
  if (abar.size() != bbar.size())
    throw ConfigError("tuples have different lengths");
  if (static_cast<int>(abar.size()) > qt.config().maxTupleLen)
    throw ConfigError("tuple longer than the configured maxTupleLen");
  Elem ea = qt.M().tupleExtent(abar);
  Elem eb = qt.N().tupleExtent(bbar);
  if (ea != eb)
    throw ConfigError("extent mismatch: E(a-bar) = " + qt.M().omega().name(ea) +
                      " but E(b-bar) = " + qt.N().omega().name(eb));
  IsoPairs pairs;
  for (std::size_t i = 0; i < abar.size(); ++i) pairs.push_back({abar[i], bbar[i]});
  auto id = qt.closeAndFind(pairs);
  if (!id) return std::nullopt;
  if (!qt.inQ(alpha, ea, *id)) return std::nullopt;
  return SimWitness{alpha, ea, *id, qt.isoPairs(*id)};
}

ScottRankResult scottRank(const StructurePtr& m, int maxTupleLen, BackForthConfig cfg) {
  cfg.maxTupleLen = maxTupleLen;
  auto n = m->clone(m->name() + "_clone");
  QTable qt(m, n, cfg);

  int stab = qt.stabilization();
  if (stab < 0)
    throw CapExceeded("refinement did not stabilize within maxAlpha = " +
                      std::to_string(cfg.maxAlpha) + "; raise --alpha");

  // Gamma_alpha: same-length, same-extent tuple pairs that are *not*
  // alpha-similar.  The table is stable past stab, so computing through
  // stab+1 suffices to find the least fixpoint of Gamma.
  std::vector<std::size_t> trace;
  int top = std::min(cfg.maxAlpha, stab + 1);
  for (int a = 0; a <= top; ++a) {
    std::size_t gamma = 0;
    for (int len = 0; len <= maxTupleLen; ++len) {
      std::vector<Sec> ab(static_cast<std::size_t>(2 * len), 0);
      auto walk = [&](auto&& self, std::size_t pos) -> void {
        if (pos == ab.size()) {
          std::vector<Sec> abar(ab.begin(), ab.begin() + len);
          std::vector<Sec> bbar(ab.begin() + len, ab.end());
          if (m->tupleExtent(abar) != n->tupleExtent(bbar)) return;
          if (!simAlpha(qt, abar, bbar, a)) ++gamma;
          return;
        }
        for (Sec s = 0; s < m->carrierSize(); ++s) {
          ab[pos] = s;
          self(self, pos + 1);
        }
      };
      walk(walk, 0);
    }
    trace.push_back(gamma);
  }
  int rank = top;
  for (int a = 0; a + 1 <= top; ++a)
    if (trace[static_cast<std::size_t>(a)] == trace[static_cast<std::size_t>(a + 1)]) {
      rank = a;
      break;
    }
  return {rank, trace, stab};
}

}  // namespace wb
