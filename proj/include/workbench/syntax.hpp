// Terms and formulae of the finite logic fragment, plus the [p] (box) and
// <p> (check) connectives, rank measures, classification, and the canonical
// unnested-atomic enumeration.
//
// ASTs are immutable and shared via shared_ptr; printFormula is injective on
// ASTs and serves as the canonical serialization (used as a table key).
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "workbench/error.hpp"

namespace wb {

struct Signature;

class Term;
using TermPtr = std::shared_ptr<const Term>;

class Term {
public:
  enum class Kind { Var, Const, App };

  static TermPtr var(int index);
  static TermPtr cnst(std::string name);
  static TermPtr app(std::string fun, std::vector<TermPtr> args);

  Kind kind() const { return kind_; }
  int varIndex() const { return varIndex_; }
  const std::string& symbol() const { return symbol_; }
  const std::vector<TermPtr>& args() const { return args_; }

private:
  Kind kind_;
  int varIndex_ = -1;
  std::string symbol_;
  std::vector<TermPtr> args_;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
public:
  enum class Kind { Eq, Rel, Not, Implies, BigAnd, BigOr, Forall, Exists, Box, Check };

  static FormulaPtr eq(TermPtr lhs, TermPtr rhs);
  static FormulaPtr rel(std::string name, std::vector<TermPtr> args);
  static FormulaPtr not_(FormulaPtr body);
  static FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr bigAnd(std::vector<FormulaPtr> members);
  static FormulaPtr bigOr(std::vector<FormulaPtr> members);
  static FormulaPtr forall(std::vector<int> vars, FormulaPtr body);  // vars nonempty
  static FormulaPtr exists(std::vector<int> vars, FormulaPtr body);  // vars nonempty
  static FormulaPtr box(std::string elemName, FormulaPtr body);
  static FormulaPtr check(std::string elemName);

  Kind kind() const { return kind_; }
  const TermPtr& lhs() const { return terms_[0]; }           // Eq
  const TermPtr& rhs() const { return terms_[1]; }           // Eq
  const std::string& relName() const { return symbol_; }     // Rel
  const std::vector<TermPtr>& terms() const { return terms_; }
  const FormulaPtr& body() const { return subs_[0]; }        // Not, Forall, Exists, Box
  const FormulaPtr& left() const { return subs_[0]; }        // Implies
  const FormulaPtr& right() const { return subs_[1]; }       // Implies
  const std::vector<FormulaPtr>& members() const { return subs_; }  // BigAnd/BigOr
  const std::vector<int>& boundVars() const { return vars_; }       // sorted, unique
  const std::string& elemName() const { return symbol_; }    // Box, Check

private:
  Kind kind_;
  std::string symbol_;
  std::vector<TermPtr> terms_;
  std::vector<FormulaPtr> subs_;
  std::vector<int> vars_;
};

// --- Serialization (grammar shared with the parser; see parser.hpp).
std::string printTerm(const TermPtr& t);
std::string printFormula(const FormulaPtr& f);

// --- Variables.
std::vector<int> termVars(const TermPtr& t);       // sorted, unique
std::vector<int> freeVars(const FormulaPtr& f);    // sorted, unique
int maxVarIndex(const FormulaPtr& f);              // -1 if variable-free

// Rename free variable occurrences through `map` (identity outside its
// domain), renaming binders apart where they would capture an image index.
FormulaPtr renameFree(const FormulaPtr& f, const std::vector<std::pair<int, int>>& map);

// --- Rank measures.
int mrank(const TermPtr& t);    // Var 0, Const 1, App 1 + sum
int mrank(const FormulaPtr& f);
int qdegree(const FormulaPtr& f);  // quantifier blocks count 1 each

// --- Classification.
struct Classification {
  bool isUnnested;  // every atom is v=v, v=c, R(v...) or f(v...)=v (either orientation)
  bool isCeu;       // unnested atoms combined with BigAnd, Exists and Box only
  bool isPP;        // unnested atoms combined with BigAnd and Exists only
};
Classification classify(const FormulaPtr& f);
bool isUnnestedAtomic(const FormulaPtr& f);

// --- Canonical unnested atoms over variables v0..v_{n-1}, paired with every
// reindexing map into tuple positions 0..tupleLen-1.
struct UnnestedAtomic {
  FormulaPtr canonical;       // uses v0..v_{n-1} in order
  std::vector<int> indexMap;  // position i of the canonical atom reads tuple slot indexMap[i]
  FormulaPtr instantiated;    // canonical with vi replaced by v_{indexMap[i]}
  std::string key() const { return printFormula(instantiated); }
};
std::vector<UnnestedAtomic> enumerateUnnestedAtomics(const Signature& sig, int tupleLen);

// Structural equality via the canonical serialization.
bool sameFormula(const FormulaPtr& a, const FormulaPtr& b);

}  // namespace wb
