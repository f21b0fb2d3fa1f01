#include "workbench/heyting.hpp"

#include <algorithm>
#include <atomic>
#include <bit>

namespace wb {

namespace {

std::uint64_t nextAlgebraId() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

std::optional<Elem> HeytingAlgebra::elem(std::string_view name) const {
  for (Elem i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

Elem HeytingAlgebra::elemOrThrow(std::string_view name) const {
  if (auto e = elem(name)) return *e;
  throw ConfigError("algebra " + label_ + " has no element named '" +
                    std::string(name) + "'");
}

std::vector<Elem> HeytingAlgebra::elements() const {
  std::vector<Elem> out(size());
  for (Elem i = 0; i < size(); ++i) out[i] = i;
  return out;
}

Elem HeytingAlgebra::bigMeet(std::span<const Elem> xs) const {
  Elem acc = top_;
  for (Elem x : xs) acc = meet(acc, x);
  return acc;
}

Elem HeytingAlgebra::bigJoin(std::span<const Elem> xs) const {
  Elem acc = bot_;
  for (Elem x : xs) acc = join(acc, x);
  return acc;
}

void HeytingAlgebra::finishFromLeq() {
  const std::size_t n = names_.size();
  auto le = [&](Elem a, Elem b) { return leq_[a * n + b] != 0; };

  // Antisymmetry: distinct names that compare both ways are rejected.
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b)
      if (a != b && le(a, b) && le(b, a))
        throw LatticeError(LatticeError::Kind::NotAPartialOrder,
                           {names_[a], names_[b]},
                           "order is not antisymmetric: " + names_[a] +
                               " <= " + names_[b] + " and " + names_[b] +
                               " <= " + names_[a]);

  // Greatest lower / least upper bound of every pair, with witnesses when a
  // pair has none.
  meet_.assign(n * n, 0);
  join_.assign(n * n, 0);
  for (Elem a = 0; a < n; ++a) {
    for (Elem b = 0; b < n; ++b) {
      std::vector<Elem> lower, upper;
      for (Elem c = 0; c < n; ++c) {
        if (le(c, a) && le(c, b)) lower.push_back(c);
        if (le(a, c) && le(b, c)) upper.push_back(c);
      }
      auto greatest = [&](const std::vector<Elem>& xs) -> std::optional<Elem> {
        for (Elem x : xs) {
          bool top_of = true;
          for (Elem y : xs)
            if (!le(y, x)) { top_of = false; break; }
          if (top_of) return x;
        }
        return std::nullopt;
      };
      auto least = [&](const std::vector<Elem>& xs) -> std::optional<Elem> {
        for (Elem x : xs) {
          bool bot_of = true;
          for (Elem y : xs)
            if (!le(x, y)) { bot_of = false; break; }
          if (bot_of) return x;
        }
        return std::nullopt;
      };
      auto m = greatest(lower);
      if (!m)
        throw LatticeError(LatticeError::Kind::NotALattice,
                           {names_[a], names_[b]},
                           "elements " + names_[a] + " and " + names_[b] +
                               " have no meet");
      auto j = least(upper);
      if (!j)
        throw LatticeError(LatticeError::Kind::NotALattice,
                           {names_[a], names_[b]},
                           "elements " + names_[a] + " and " + names_[b] +
                               " have no join");
      meet_[a * n + b] = *m;
      join_[a * n + b] = *j;
    }
  }

  // Bottom and top exist in any finite lattice.
  bot_ = 0;
  top_ = 0;
  for (Elem c = 0; c < n; ++c) {
    bot_ = meet_[bot_ * n + c];
    top_ = join_[top_ * n + c];
  }

  // Distributivity, with the counterexample triple on failure.
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b)
      for (Elem c = 0; c < n; ++c) {
        Elem lhs = meet_[a * n + join_[b * n + c]];
        Elem rhs = join_[meet_[a * n + b] * n + meet_[a * n + c]];
        if (lhs != rhs)
          throw LatticeError(
              LatticeError::Kind::NotDistributive, {names_[a], names_[b], names_[c]},
              "distributivity fails on (" + names_[a] + ", " + names_[b] +
                  ", " + names_[c] + "): " + names_[a] + " /\\ (" + names_[b] +
                  " \\/ " + names_[c] + ") = " + names_[lhs] + " but (" +
                  names_[a] + " /\\ " + names_[b] + ") \\/ (" + names_[a] +
                  " /\\ " + names_[c] + ") = " + names_[rhs]);
      }

  // Relative pseudocomplement: implies(q, r) = join of { s : s /\ q <= r }.
  // In a finite distributive lattice this join itself satisfies the
  // adjunction p /\ q <= r  iff  p <= implies(q, r).
  implies_.assign(n * n, 0);
  for (Elem q = 0; q < n; ++q)
    for (Elem r = 0; r < n; ++r) {
      Elem acc = bot_;
      for (Elem s = 0; s < n; ++s)
        if (le(meet_[s * n + q], r)) acc = join_[acc * n + s];
      implies_[q * n + r] = acc;
    }

  id_ = nextAlgebraId();
}

HeytingAlgebra HeytingAlgebra::fromOrderRelation(
    std::vector<std::string> names,
    const std::vector<std::pair<std::string, std::string>>& order) {
  HeytingAlgebra h;
  h.label_ = "(unnamed)";
  h.names_ = std::move(names);
  const std::size_t n = h.names_.size();
  if (n == 0) throw ConfigError("an algebra needs at least one element");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (h.names_[i] == h.names_[j])
        throw ConfigError("duplicate element name '" + h.names_[i] + "'");

  h.leq_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) h.leq_[i * n + i] = 1;
  for (const auto& [lo, hi] : order) {
    auto a = h.elem(lo), b = h.elem(hi);
    if (!a) throw ConfigError("order mentions unknown element '" + lo + "'");
    if (!b) throw ConfigError("order mentions unknown element '" + hi + "'");
    h.leq_[*a * n + *b] = 1;
  }
  // Transitive closure (Warshall).
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (h.leq_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (h.leq_[k * n + j]) h.leq_[i * n + j] = 1;

  h.finishFromLeq();
  return h;
}

HeytingAlgebra HeytingAlgebra::fromPosetDownsets(
    int points, const std::vector<std::pair<int, int>>& less) {
  if (points < 0 || points > 16)
    throw ConfigError("downset construction supports 0..16 points");
  const int n = points;
  std::vector<std::uint32_t> below(n, 0);  // below[i]: points <= i
  for (int i = 0; i < n; ++i) below[i] = 1u << i;
  for (auto [a, b] : less) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw ConfigError("poset point index out of range");
    below[b] |= 1u << a;
  }
  // Close transitively.
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (below[i] & (1u << j)) {
          std::uint32_t merged = below[i] | below[j];
          if (merged != below[i]) { below[i] = merged; changed = true; }
        }
  }

  std::vector<std::uint32_t> downsets;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    bool closed = true;
    for (int i = 0; i < n && closed; ++i)
      if (s & (1u << i))
        if ((s & below[i]) != below[i]) closed = false;
    if (closed) downsets.push_back(s);
  }
  std::sort(downsets.begin(), downsets.end(),
            [](std::uint32_t a, std::uint32_t b) {
              auto pa = std::popcount(a), pb = std::popcount(b);
              return pa != pb ? pa < pb : a < b;
            });

  HeytingAlgebra h;
  h.label_ = "downsets(" + std::to_string(points) + "pt)";
  const std::size_t m = downsets.size();
  h.names_.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    h.names_[i] = "d" + std::to_string(downsets[i]);
  h.leq_.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      h.leq_[i * m + j] = (downsets[i] & ~downsets[j]) == 0 ? 1 : 0;
  h.finishFromLeq();
  return h;
}

HeytingAlgebra makeOmega2() {
  auto h = HeytingAlgebra::fromOrderRelation({"bot", "top"}, {{"bot", "top"}});
  h.setLabel("omega2");
  return h;
}

HeytingAlgebra makeChain3() {
  auto h = HeytingAlgebra::fromOrderRelation({"bot", "m", "top"},
                                             {{"bot", "m"}, {"m", "top"}});
  h.setLabel("chain3");
  return h;
}

HeytingAlgebra makeDiamond() {
  auto h = HeytingAlgebra::fromOrderRelation(
      {"bot", "p", "q", "top"},
      {{"bot", "p"}, {"bot", "q"}, {"p", "top"}, {"q", "top"}});
  h.setLabel("diamond");
  return h;
}

}  // namespace wb
