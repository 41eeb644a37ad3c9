#pragma once

#include <array>
#include <vector>

#include "semisic/core.hpp"
#include "semisic/model.hpp"

namespace semisic {

inline constexpr double kQubitBMin = 1.0 / 16;  // excluded
inline constexpr double kQubitBMax = 1.0 / 12;  // included, the SIC

/// One member of the qubit semi-SIC family, indexed by the overlap b.
struct QubitFamilyPoint {
  double b = 0;
  double r = 0;      // |<psi_1|psi_2>|
  double theta = 0;  // relative phase of psi_3, psi_4; principal arccos value
  SemiSicParams params;
};

QubitFamilyPoint family_point(double b);

/// psi_1 .. psi_4 of the canonical family member, unit norm.
std::array<Ket, 4> family_kets(const QubitFamilyPoint& point);

/// E_1 = a_- |psi_1><psi_1|, E_2 = a_- |psi_2><psi_2|,
/// E_3 = a_+ |psi_3><psi_3|, E_4 = a_+ |psi_4><psi_4|.
Povm construct(const QubitFamilyPoint& point);
Povm construct(double b);

struct Canonicalization {
  Operator u;                       // canonical[x] = u * povm[permutation[x]] * u^dagger
  Povm canonical;
  double b = 0;
  std::array<int, 4> permutation{};
  double residual = 0;              // max entrywise distance from construct(b)
};

/// Finds the unitary and element ordering that bring a qubit semi-SIC POVM
/// to the canonical family form. When several orderings work (the a_- pair
/// can be swapped, and for the SIC any pair may lead), the candidate whose
/// unitary is closest to the identity wins, then the lexicographically
/// smallest permutation.
Canonicalization canonicalize(const Povm& povm, const Tolerances& tol = {});

}  // namespace semisic
