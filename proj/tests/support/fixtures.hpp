// Shared fixtures for unit and acceptance tests.  A Structure keeps raw
// pointers to its algebra and signature, so every fixture bundles the owners
// with the structures built over them.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "workbench/heyting.hpp"
#include "workbench/presheaf.hpp"

namespace wbtest {

struct Family {
  std::shared_ptr<wb::HeytingAlgebra> omega;
  std::shared_ptr<wb::Signature> sig;
  std::vector<wb::StructurePtr> structures;

  const wb::StructurePtr& at(std::size_t i) const { return structures[i]; }
};

// Classical pure sets over the two-element algebra: one structure per
// requested size, all sharing one algebra and one empty signature.
inline Family pureSetFamily(const std::vector<int>& sizes) {
  Family fam;
  fam.omega = std::make_shared<wb::HeytingAlgebra>(wb::makeOmega2());
  fam.sig = std::make_shared<wb::Signature>();
  fam.sig->name = "Pure";
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    wb::StructureBuilder b(*fam.omega, *fam.sig,
                           "Set" + std::to_string(sizes[s]));
    for (int i = 0; i < sizes[s]; ++i)
      b.addSection("x" + std::to_string(i), fam.omega->top());
    auto [ptr, report] = b.build();
    if (!report.ok()) throw std::logic_error("pure set fixture invalid");
    fam.structures.push_back(std::move(ptr));
  }
  return fam;
}

// Chain algebra workspace with two structures differing in one relation
// value; M vs N separates already at the base invariants, M vs M does not.
inline const char* kChainWorkspace = R"(
# three-element chain, one unary relation
algebra C3 {
  elements: bot, m, top;
  order: bot <= m, m <= top;
}
signature S {
  rel R/1;
}
structure M over C3 sig S {
  section a extent top;
  section b extent m;
  rel R(a) = m;
  rel R(b) = m;
}
structure N over C3 sig S {
  section a extent top;
  section b extent m;
  rel R(a) = top;
  rel R(b) = m;
}
)";

// Pure sets of size two and three over the two-element algebra, as text.
inline const char* kPureSetsWorkspace = R"(
algebra O2 {
  elements: bot, top;
  order: bot <= top;
}
signature Empty {
}
structure Two over O2 sig Empty {
  section x;
  section y;
}
structure Three over O2 sig Empty {
  section x;
  section y;
  section z;
}
)";

}  // namespace wbtest
