#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wb {

// Base class for all workbench errors.  Subclasses carry structured witness
// data so callers (CLI, tests) can render precise diagnostics.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised while building an algebra from an order relation.
struct LatticeError : Error {
  enum class Kind { NotAPartialOrder, NotALattice, NotDistributive };

  Kind kind;
  std::vector<std::string> witness;  // element names involved in the failure

  LatticeError(Kind k, std::vector<std::string> w, const std::string& msg)
      : Error(msg), kind(k), witness(std::move(w)) {}
};

// Raised by parsers (formula text and workspace DSL).
struct ParseError : Error {
  std::size_t line;
  std::size_t column;

  ParseError(std::size_t ln, std::size_t col, const std::string& msg)
      : Error("parse error at " + std::to_string(ln) + ":" +
              std::to_string(col) + ": " + msg),
        line(ln),
        column(col) {}
};

// Mixing handles from different structures or algebras.
struct CrossStructureError : Error {
  using Error::Error;
};

// A requested computation exceeds the configured caps; never silently
// truncated, always reported.
struct CapExceeded : Error {
  using Error::Error;
};

// Bad run configuration (flags, tuples of the wrong shape, and so on).
struct ConfigError : Error {
  using Error::Error;
};

// Two invariant tables whose anchors cannot be compared (different lengths
// or different anchor extents).
struct IncomparableDomains : Error {
  using Error::Error;
};

}  // namespace wb
