#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "workbench/error.hpp"

namespace wb {

// Index of an element within its algebra.
using Elem = std::uint32_t;

// A finite complete Heyting algebra with every operation precomputed into
// immutable tables at construction time.  Construction validates the input
// exhaustively (lattice structure, distributivity) and reports witnesses on
// failure; afterwards all queries are table lookups.
//
// Completeness is automatic for finite lattices: bigMeet/bigJoin fold the
// binary operations, with bigJoin({}) = bot and bigMeet({}) = top.
class HeytingAlgebra {
 public:
  // Build from element names and a list of `a <= b` assertions.  The order
  // used is the reflexive transitive closure of the assertions.
  static HeytingAlgebra fromOrderRelation(
      std::vector<std::string> names,
      const std::vector<std::pair<std::string, std::string>>& order);

  // The algebra of downward closed subsets of a finite poset, ordered by
  // inclusion.  `less` lists strict order assertions i < j on point indices.
  // Always a Heyting algebra, whatever the poset; handy for random testing.
  static HeytingAlgebra fromPosetDownsets(
      int points, const std::vector<std::pair<int, int>>& less);

  std::size_t size() const { return names_.size(); }
  Elem bot() const { return bot_; }
  Elem top() const { return top_; }

  bool leq(Elem a, Elem b) const { return leq_[a * size() + b] != 0; }
  Elem meet(Elem a, Elem b) const { return meet_[a * size() + b]; }
  Elem join(Elem a, Elem b) const { return join_[a * size() + b]; }
  Elem implies(Elem a, Elem b) const { return implies_[a * size() + b]; }
  Elem neg(Elem a) const { return implies(a, bot_); }

  Elem bigMeet(std::span<const Elem> xs) const;
  Elem bigJoin(std::span<const Elem> xs) const;

  const std::string& name(Elem a) const { return names_[a]; }
  std::optional<Elem> elem(std::string_view name) const;
  // Like elem() but throws ConfigError naming the algebra.
  Elem elemOrThrow(std::string_view name) const;

  const std::string& label() const { return label_; }
  void setLabel(std::string s) { label_ = std::move(s); }

  // Identity used to reject cross-algebra mixing.
  std::uint64_t id() const { return id_; }

  // All elements in index order (ids are a linear extension of leq).
  std::vector<Elem> elements() const;

 private:
  HeytingAlgebra() = default;
  void finishFromLeq();  // derives meet/join/implies tables, validates

  std::string label_;
  std::uint64_t id_ = 0;
  std::vector<std::string> names_;
  std::vector<std::uint8_t> leq_;
  std::vector<Elem> meet_, join_, implies_;
  Elem bot_ = 0, top_ = 0;
};

// Built-in algebras used by fixtures and documentation examples.
HeytingAlgebra makeOmega2();    // {bot, top}
HeytingAlgebra makeChain3();    // {bot, m, top}
HeytingAlgebra makeDiamond();   // {bot, p, q, top}, p and q incomparable

}  // namespace wb
