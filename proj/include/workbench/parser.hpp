// Text grammar for formulae.
//
//   formula  :=  prefix ('->' formula)?                    (right associative)
//   prefix   :=  '~' prefix
//             |  '[' elem ']' formula                      (box, widest scope)
//             |  'forall' varset formula
//             |  'exists' varset formula
//             |  atom
//   atom     :=  '(' formula ')'
//             |  '/\' '{' formula (';' formula)* '}'       (empty braces ok)
//             |  '\/' '{' ... '}'
//             |  '<' elem '>'                              (check)
//             |  R '(' term (',' term)* ')'                (relation symbol)
//             |  term '=' term
//   term     :=  'v'<digits>  |  binderName  |  constName  |  f '(' term,... ')'
//   varset   :=  '{' name+ '}'                             (space/comma separated)
//
// Binder names other than v<k> (e.g. `exists {x} R(x)`) are allocated the
// lowest indices not mentioned as explicit v<k> anywhere in the input, in
// order of binder appearance.  `#` starts a comment through end of line.
#pragma once

#include <string>
#include <string_view>

#include "workbench/syntax.hpp"

namespace wb {

struct Signature;
class HeytingAlgebra;

struct ParseOptions {
  // Maximum number of distinct variables a formula may mention.
  int varCap = 8;
};

FormulaPtr parseFormula(std::string_view text, const Signature& sig,
                        const HeytingAlgebra& omega, ParseOptions opts = {});

}  // namespace wb
