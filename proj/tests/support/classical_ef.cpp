#include "support/classical_ef.hpp"

#include <stdexcept>
#include <vector>

namespace wbtest {
namespace {

using wb::Sec;
using wb::Structure;

bool isTrue(const Structure& m, wb::Elem v) { return v == m.omega().top(); }

void requireClassical(const Structure& m) {
  if (m.omega().size() != 2)
    throw std::logic_error("ef: algebra is not two-valued");
}

// Every index tuple of the given arity over 0..k-1, fed to `use`.
template <typename F>
void indexTuples(std::size_t k, int arity, F&& use) {
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
}

// Identical atomic diagrams on the anchored tuples: position equalities,
// position-vs-constant equalities, relation atoms and function-graph atoms.
bool atomicMatch(const Structure& m, const Structure& n,
                 const std::vector<Sec>& abar, const std::vector<Sec>& bbar) {
  const std::size_t k = abar.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      if (isTrue(m, m.eqValue(abar[i], abar[j])) !=
          isTrue(n, n.eqValue(bbar[i], bbar[j])))
        return false;
    for (std::size_t c = 0; c < m.sig().consts.size(); ++c)
      if (isTrue(m, m.eqValue(abar[i], m.constValue(static_cast<int>(c)))) !=
          isTrue(n, n.eqValue(bbar[i], n.constValue(static_cast<int>(c)))))
        return false;
  }
  bool ok = true;
  for (std::size_t r = 0; r < m.sig().rels.size() && ok; ++r)
    indexTuples(k, m.sig().rels[r].arity, [&](const std::vector<std::size_t>& pick) {
      if (!ok) return;
      std::vector<Sec> am, bn;
      for (auto i : pick) {
        am.push_back(abar[i]);
        bn.push_back(bbar[i]);
      }
      if (isTrue(m, m.relValue(static_cast<int>(r), am)) !=
          isTrue(n, n.relValue(static_cast<int>(r), bn)))
        ok = false;
    });
  for (std::size_t f = 0; f < m.sig().funs.size() && ok; ++f)
    indexTuples(k, m.sig().funs[f].arity + 1,
                [&](const std::vector<std::size_t>& pick) {
                  if (!ok) return;
                  std::vector<Sec> am, bn;
                  for (std::size_t j = 0; j + 1 < pick.size(); ++j) {
                    am.push_back(abar[pick[j]]);
                    bn.push_back(bbar[pick[j]]);
                  }
                  Sec tm = abar[pick.back()], tn = bbar[pick.back()];
                  if (isTrue(m, m.eqValue(m.funValue(static_cast<int>(f), am), tm)) !=
                      isTrue(n, n.eqValue(n.funValue(static_cast<int>(f), bn), tn)))
                    ok = false;
                });
  return ok;
}

bool efRec(const Structure& m, const Structure& n, std::vector<Sec>& abar,
           std::vector<Sec>& bbar, int alpha) {
  if (!atomicMatch(m, n, abar, bbar)) return false;
  if (alpha == 0) return true;
  // Spoiler plays one element on either side; duplicator needs a reply.
  for (Sec a = 0; a < m.carrierSize(); ++a) {
    bool answered = false;
    for (Sec b = 0; b < n.carrierSize() && !answered; ++b) {
      abar.push_back(a);
      bbar.push_back(b);
      answered = efRec(m, n, abar, bbar, alpha - 1);
      abar.pop_back();
      bbar.pop_back();
    }
    if (!answered) return false;
  }
  for (Sec b = 0; b < n.carrierSize(); ++b) {
    bool answered = false;
    for (Sec a = 0; a < m.carrierSize() && !answered; ++a) {
      abar.push_back(a);
      bbar.push_back(b);
      answered = efRec(m, n, abar, bbar, alpha - 1);
      abar.pop_back();
      bbar.pop_back();
    }
    if (!answered) return false;
  }
  return true;
}

}  // namespace

bool efEquivalent(const Structure& m, const Structure& n,
                  const std::vector<Sec>& abar, const std::vector<Sec>& bbar,
                  int alpha) {
  requireClassical(m);
  requireClassical(n);
  if (abar.size() != bbar.size())
    throw std::logic_error("ef: tuple lengths differ");
  std::vector<Sec> as = abar, bs = bbar;
  return efRec(m, n, as, bs, alpha);
}

int efScottRank(const Structure& m, int tupleCap, int maxAlpha) {
  requireClassical(m);
  // Mirror of the library's Gamma trace: count ordered same-extent tuple
  // pairs that are NOT alpha-equivalent; the rank is where the count first
  // repeats.  Pairs of different extents are incomparable and skipped;
  // pairs at the bottom extent live at a trivial stage and always match.
  std::vector<std::size_t> trace;
  for (int a = 0; a <= maxAlpha; ++a) {
    std::size_t gamma = 0;
    for (int len = 0; len <= tupleCap; ++len) {
      std::vector<Sec> ab(static_cast<std::size_t>(2 * len), 0);
      auto walk = [&](auto&& self, std::size_t pos) -> void {
        if (pos == ab.size()) {
          std::vector<Sec> abar(ab.begin(), ab.begin() + len);
          std::vector<Sec> bbar(ab.begin() + len, ab.end());
          if (m.tupleExtent(abar) != m.tupleExtent(bbar)) return;
          if (m.tupleExtent(abar) == m.omega().bot()) return;
          if (!efEquivalent(m, m, abar, bbar, a)) ++gamma;
          return;
        }
        for (Sec s = 0; s < m.carrierSize(); ++s) {
          ab[pos] = s;
          self(self, pos + 1);
        }
      };
      walk(walk, 0);
    }
    trace.push_back(gamma);
    if (trace.size() >= 2 && trace[trace.size() - 2] == trace.back())
      return a - 1;
  }
  return maxAlpha;
}

}  // namespace wbtest
