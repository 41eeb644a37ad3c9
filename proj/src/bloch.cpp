#include "semisic/bloch.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace semisic {

namespace {

void require_in_ball(const BlochVector& r, const char* what) {
  if (!r.allFinite() || r.norm() > 1 + kBlochSlack) {
    throw Error(ErrorCode::kOutsideBlochBall,
                std::string(what) + ": |r| = " + std::to_string(r.norm()) + " exceeds 1");
  }
}

}  // namespace

Operator bloch_to_state(const BlochVector& r) {
  require_in_ball(r, "bloch_to_state");
  Operator rho(2, 2);
  rho << Complex(1 + r.z(), 0), Complex(r.x(), -r.y()),
         Complex(r.x(), r.y()), Complex(1 - r.z(), 0);
  return rho / 2;
}

BlochAffineMap bloch_affine_map(const QubitFamilyPoint& point) {
  const double am = point.params.a_minus;
  const double ap = point.params.a_plus;
  const double r = point.r;
  const double c = 2 * std::numbers::sqrt2 / 3;
  const double cx = c * std::cos(point.theta);
  const double sy = c * std::sin(point.theta);

  BlochAffineMap map;
  map.offset << am, am, ap, ap;
  map.response << 0, 0, 1,
                  2 * r * std::sqrt(1 - r * r), 0, 2 * r * r - 1,
                  -cx, -sy, -1.0 / 3,
                  -cx, sy, -1.0 / 3;
  map.response.array().colwise() *= map.offset.array();
  // q_x = Tr[E_x rho] carries the 1/2 of rho = (I + r.sigma)/2.
  map.offset /= 2;
  map.response /= 2;
  return map;
}

ProbabilityVector bloch_to_probs(const BlochVector& r, const QubitFamilyPoint& point) {
  require_in_ball(r, "bloch_to_probs");
  const auto map = bloch_affine_map(point);
  return map.offset + map.response * r;
}

BlochVector probs_to_bloch(const ProbabilityVector& q, const QubitFamilyPoint& point) {
  if (q.size() != 4) {
    throw Error(ErrorCode::kLengthMismatch, "probs_to_bloch: expected 4 probabilities");
  }
  const auto map = bloch_affine_map(point);
  const Eigen::Vector4d rhs = q - map.offset;
  const BlochVector r = map.response.colPivHouseholderQr().solve(rhs);
  const double residual = (map.response * r - rhs).norm();
  if (!(residual <= 1e-8)) {
    throw Error(ErrorCode::kInconsistentProbabilities,
                "probs_to_bloch: least-squares residual " + std::to_string(residual));
  }
  if (r.norm() > 1 + kBlochSlack) {
    throw Error(ErrorCode::kInconsistentProbabilities,
                "probs_to_bloch: probabilities imply |r| = " + std::to_string(r.norm()) +
                    ", not a quantum state");
  }
  return r;
}

}  // namespace semisic
