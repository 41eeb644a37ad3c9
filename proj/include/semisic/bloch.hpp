#pragma once

#include "semisic/core.hpp"
#include "semisic/dual_frame.hpp"
#include "semisic/qubit.hpp"

namespace semisic {

using BlochVector = Eigen::Vector3d;

inline constexpr double kBlochSlack = 1e-12;

/// rho = (I + rx X + ry Y + rz Z) / 2.
Operator bloch_to_state(const BlochVector& r);

/// Outcome probabilities of the family member at `point`, written directly
/// in Bloch coordinates: q = offset + response * r.
ProbabilityVector bloch_to_probs(const BlochVector& r, const QubitFamilyPoint& point);

struct BlochAffineMap {
  Eigen::Vector4d offset;
  Eigen::Matrix<double, 4, 3> response;
};

BlochAffineMap bloch_affine_map(const QubitFamilyPoint& point);

/// Least-squares inverse of bloch_to_probs. Throws InconsistentProbabilities
/// when the vector is not in the image of the map (residual above 1e-8) or
/// maps outside the Bloch ball.
BlochVector probs_to_bloch(const ProbabilityVector& q, const QubitFamilyPoint& point);

}  // namespace semisic
