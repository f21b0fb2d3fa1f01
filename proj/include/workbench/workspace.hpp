// Loader for the workspace DSL: named algebras, signatures and structures
// parsed from text into ready-to-use objects.
//
//   file       :=  block*
//   block      :=  'algebra' NAME '{'
//                      'elements' ':' NAME (',' NAME)* ';'
//                      ('order' ':' NAME '<=' NAME (',' NAME '<=' NAME)* ';')?
//                  '}'
//               |  'signature' NAME '{' sigdecl* '}'
//               |  'structure' NAME 'over' ALGEBRA 'sig' SIGNATURE '{' decl* '}'
//   sigdecl    :=  'rel' NAME '/' ARITY ';'
//               |  'fun' NAME '/' ARITY ';'
//               |  'const' NAME ('extent' ELEM)? ';'
//   decl       :=  'section' NAME ('extent' ELEM)? ';'
//               |  'identify' sexpr '=' sexpr ';'
//               |  'rel' NAME '(' sexprs? ')' '=' ELEM ';'
//               |  'fun' NAME '(' sexprs? ')' '=' sexpr ';'
//               |  'const' NAME '=' sexpr ';'
//   sexpr      :=  NAME ('|' ELEM)?      (a generator, optionally restricted)
//
// `#` starts a comment through end of line.  Omitted extents default to top.
// The algebra order is the reflexive transitive closure of the assertions;
// a structure's declarations are extended to the full carrier by the
// structure laws and verified against them.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "workbench/presheaf.hpp"

namespace wb {

struct LoadOptions {
  // Accept constants whose declared extent is below top.  Characteristic
  // sentences and their invariants still refuse such signatures.
  bool laxConstants = false;
};

// Loaded objects by name.  Algebras and signatures are heap-owned here
// because structures keep plain references to them for their lifetime.
struct Workspace {
  std::map<std::string, std::shared_ptr<HeytingAlgebra>> algebras;
  std::map<std::string, std::shared_ptr<Signature>> signatures;
  std::map<std::string, StructurePtr> structures;

  // Structures whose declarations violated a structure law, with the
  // witnesses; such structures are not entered into `structures`.
  struct Issue {
    std::string name;
    ValidationReport report;
  };
  std::vector<Issue> issues;

  const HeytingAlgebra& algebra(const std::string& name) const;
  const Signature& signature(const std::string& name) const;
  const Structure& structure(const std::string& name) const;
  StructurePtr structurePtr(const std::string& name) const;
};

// Parse DSL text into (or on top of) a workspace.  Throws ParseError with
// 1-based line:column for malformed input, unknown names and duplicate
// definitions; LatticeError for element/order lists that do not form a
// distributive lattice.  Law violations inside a structure block do not
// throw; they are recorded as issues.
void loadWorkspaceText(Workspace& ws, std::string_view text,
                       LoadOptions opts = {});

Workspace loadWorkspace(std::string_view text, LoadOptions opts = {});

// Reads and parses each file in order into one workspace.  File-system
// failures raise ConfigError naming the path.
Workspace loadWorkspaceFiles(const std::vector<std::string>& paths,
                             LoadOptions opts = {});

}  // namespace wb
