#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "workbench/heyting.hpp"

namespace wb {

// Index of a section within its structure's carrier.
using Sec = std::uint32_t;

struct Signature {
  struct Rel { std::string name; int arity = 0; };
  struct Fun { std::string name; int arity = 0; };
  struct Const {
    std::string name;
    // Extent the interpretation must have.  Empty means "top" (the strict
    // default); anything else is only legal in lax mode.
    std::string extentName;
  };

  std::string name;
  std::vector<Rel> rels;
  std::vector<Fun> funs;
  std::vector<Const> consts;

  const Rel* rel(std::string_view n) const;
  const Fun* fun(std::string_view n) const;
  const Const* cnst(std::string_view n) const;
  bool lax() const;  // true iff some constant declares a non-top extent
};

// A finite structure over a Heyting algebra: a restriction-closed set of
// sections together with relation, function and constant interpretations
// satisfying the characteristic-function and function laws.
//
// Carriers are built by StructureBuilder from generator sections and
// identifications; interpretations are supplied on explicit tuples and the
// builder extends them to the whole carrier by the laws, then verifies the
// declarations against the extension.  Instances are immutable.
class Structure {
 public:
  const HeytingAlgebra& omega() const { return *omega_; }
  const Signature& sig() const { return *sig_; }
  const std::string& name() const { return name_; }
  std::uint64_t id() const { return id_; }  // distinct per instance

  std::size_t carrierSize() const { return extent_.size(); }
  Elem extent(Sec a) const { return extent_[a]; }
  Sec restrict(Sec a, Elem p) const { return restrict_[a * omega_->size() + p]; }
  // Omega-valued equality [a = b].
  Elem eqValue(Sec a, Sec b) const { return eq_[a * carrierSize() + b]; }

  Elem tupleExtent(const std::vector<Sec>& t) const;
  std::vector<Sec> restrictTuple(const std::vector<Sec>& t, Elem p) const;
  Elem tupleEq(const std::vector<Sec>& a, const std::vector<Sec>& b) const;

  Elem relValue(int relIdx, const std::vector<Sec>& args) const;
  Sec funValue(int funIdx, const std::vector<Sec>& args) const;
  Sec constValue(int constIdx) const;

  // Display name: the generator name, or "gen|p" for a proper restriction.
  const std::string& secName(Sec a) const { return secName_[a]; }
  std::optional<Sec> findSection(std::string_view name) const;
  // Parses "gen" or "gen|elem" against this structure.
  Sec sectionExpr(std::string_view expr) const;
  std::vector<Sec> parseTuple(std::string_view commaSeparated) const;

  // A deep copy with a fresh instance id (and a new name), so a structure can
  // be compared against itself through disjoint handles.
  std::shared_ptr<Structure> clone(const std::string& newName) const;

 private:
  friend class StructureBuilder;
  Structure() = default;

  const HeytingAlgebra* omega_ = nullptr;
  const Signature* sig_ = nullptr;
  std::string name_;
  std::uint64_t id_ = 0;

  std::vector<Elem> extent_;
  std::vector<Sec> restrict_;   // [sec * |omega| + p]
  std::vector<Elem> eq_;        // [a * n + b]
  std::vector<std::string> secName_;

  // Interpretations, total on the carrier: rel_[r] indexed by mixed-radix
  // tuple code, fun_[f] likewise, const_[c] a section.
  std::vector<std::vector<Elem>> rel_;
  std::vector<std::vector<Sec>> fun_;
  std::vector<Sec> const_;

  std::size_t tupleCode(const std::vector<Sec>& t) const;
};

using StructurePtr = std::shared_ptr<Structure>;

// One violated law, with enough names to see why.
struct LawViolation {
  std::string law;      // e.g. "R(a-bar) <= E(a-bar)"
  std::string detail;   // witness description with section names
};

struct ValidationReport {
  std::vector<LawViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Accumulates generators, identifications and interpretation declarations,
// then closes under restriction, quotients by extensionality and derives the
// remaining interpretation values from the laws.
class StructureBuilder {
 public:
  StructureBuilder(const HeytingAlgebra& omega, const Signature& sig,
                   std::string name);

  // Declared sections; extent by algebra element name or id.
  void addSection(const std::string& name, Elem extent);
  // identify lhs|p = rhs|p (use top for a bare handle).
  void identify(const std::string& lhs, Elem lp, const std::string& rhs, Elem rp);

  // Interpretation declarations on tuples of section expressions
  // ("gen" or "gen|elem" strings, resolved after closure).
  void setRel(const std::string& rel, const std::vector<std::string>& args, Elem value);
  void setFun(const std::string& fun, const std::vector<std::string>& args,
              const std::string& value);
  void setConst(const std::string& cname, const std::string& value);

  // strict: every constant interpretation must have extent top.
  // The returned report lists violated laws; the structure is only usable
  // when the report is clean.
  std::pair<StructurePtr, ValidationReport> build(bool strict = true);

 private:
  struct GenDecl { std::string name; Elem extent; };
  struct IdentDecl { std::string lhs; Elem lp; std::string rhs; Elem rp; };
  struct RelDecl { std::string rel; std::vector<std::string> args; Elem value; };
  struct FunDecl { std::string fun; std::vector<std::string> args; std::string value; };
  struct ConstDecl { std::string cname; std::string value; };

  const HeytingAlgebra& omega_;
  const Signature& sig_;
  std::string name_;
  std::vector<GenDecl> gens_;
  std::vector<IdentDecl> idents_;
  std::vector<RelDecl> relDecls_;
  std::vector<FunDecl> funDecls_;
  std::vector<ConstDecl> constDecls_;
};

// Re-checks the presheaf/structure laws on the finished tables, exhaustively.
// Builder output always passes; the check exists so the laws stay visible
// and so hand-constructed or mutated instances can be audited.
ValidationReport validateStructure(const Structure& m);

std::string tupleToString(const Structure& m, const std::vector<Sec>& t);

}  // namespace wb
