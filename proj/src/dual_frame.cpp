#include "semisic/dual_frame.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semisic/operator.hpp"

namespace semisic {

DualCoefficients dual_coefficients(int d, double b, double own, double other, int own_count,
                                   const Tolerances& tol) {
  const int n = d * d;
  const double diag_gap = own * own - b;
  if (std::abs(diag_gap) < tol.tol_cond) {
    throw Error(ErrorCode::kDegenerateCoefficients, "dual_coefficients: a^2 - b vanishes");
  }
  DualCoefficients c;
  c.alpha = 1 / diag_gap;
  if (own_count == n) {
    // The block sum is the identity, so only beta + gamma is determined.
    c.beta = 0;
    c.gamma = -b / (own * diag_gap);
    return c;
  }
  const double denom = own_count * b * (other - own) + other * diag_gap;
  if (std::abs(denom) < tol.tol_cond) {
    throw Error(ErrorCode::kDegenerateCoefficients, "dual_coefficients: singular block system");
  }
  c.gamma = -b / denom;
  c.beta = c.gamma * (other - own) / diag_gap;
  return c;
}

DualFrame dual_basis(const Povm& povm, const SemiSicParams& params, const Tolerances& tol) {
  const int d = params.d;
  const int n = d * d;
  if (povm.dim != d || static_cast<int>(povm.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "dual_basis: POVM shape does not match parameters");
  }
  const int k = params.k;
  if (k < 1 || k > n) throw Error(ErrorCode::kNotSemiSic, "dual_basis: k outside [1, d^2]");

  DualFrame frame;
  frame.dim = d;
  frame.source_k = k;
  frame.permutation.resize(n);
  std::iota(frame.permutation.begin(), frame.permutation.end(), 0);
  std::stable_sort(frame.permutation.begin(), frame.permutation.end(), [&](int x, int y) {
    return povm[x].trace().real() < povm[y].trace().real();
  });

  constexpr double kTraceMatch = 1e-8;
  Operator s = Operator::Zero(d, d);
  Operator t = Operator::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const int x = frame.permutation[i];
    const double expected = i < k ? params.a_minus : params.a_plus;
    if (std::abs(povm[x].trace().real() - expected) > kTraceMatch) {
      throw Error(ErrorCode::kNotSemiSic, "dual_basis: element " + std::to_string(x) +
                                              " does not carry the trace of its block");
    }
    (i < k ? s : t) += povm[x];
  }

  frame.minus_block = dual_coefficients(d, params.b, params.a_minus, params.a_plus, k, tol);
  if (k < n) {
    frame.plus_block = dual_coefficients(d, params.b, params.a_plus, params.a_minus, n - k, tol);
  }
  if (params.is_sic()) {
    // At a_- = a_+ the a_+ branch (with an empty T block) must give the same operator.
    const auto other = dual_coefficients(d, params.b, params.a_plus, params.a_minus, 0, tol);
    const auto& c = frame.minus_block;
    if (std::abs(other.alpha - c.alpha) > 1e-12 * std::abs(c.alpha) ||
        std::abs(other.beta - c.beta) > 1e-12 || std::abs(other.gamma - c.gamma) > 1e-12) {
      throw Error(ErrorCode::kDegenerateCoefficients, "dual_basis: SIC branches disagree");
    }
    frame.plus_block = c;
  }

  const Operator id = Operator::Identity(d, d);
  frame.duals.resize(n);
  for (int i = 0; i < n; ++i) {
    const int x = frame.permutation[i];
    const auto& c = i < k ? frame.minus_block : frame.plus_block;
    frame.duals[x] = c.alpha * povm[x] + c.beta * (i < k ? s : t) + c.gamma * id;
  }
  return frame;
}

DualFrame dual_basis(const Povm& povm, const Tolerances& tol) {
  const auto report = verify(povm, tol);
  if (!report.passed()) {
    throw Error(ErrorCode::kNotSemiSic, std::string("dual_basis: POVM verifies as ") +
                                            to_string(report.classification));
  }
  return dual_basis(povm, params_from_report(report), tol);
}

double duality_error(const Povm& povm, const DualFrame& frame) {
  double worst = 0;
  for (std::size_t x = 0; x < povm.size(); ++x) {
    for (std::size_t y = 0; y < frame.duals.size(); ++y) {
      const double v = (povm[x].array() * frame.duals[y].transpose().array()).sum().real();
      worst = std::max(worst, std::abs(v - (x == y ? 1.0 : 0.0)));
    }
  }
  return worst;
}

ProbabilityVector probabilities(const Operator& rho, const Povm& povm, const Tolerances& tol) {
  if (rho.rows() != povm.dim || rho.cols() != povm.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "probabilities: state and POVM dimensions differ");
  }
  if (!is_hermitian(rho, tol) || !is_psd(rho, tol) ||
      std::abs(rho.trace().real() - 1) > 1e-10) {
    throw Error(ErrorCode::kNotAState, "probabilities: rho is not a density operator");
  }
  ProbabilityVector p(povm.size());
  for (std::size_t y = 0; y < povm.size(); ++y) p(y) = hs_inner(povm[y], rho, tol);
  return p;
}

Operator reconstruct(const ProbabilityVector& p, const DualFrame& frame) {
  if (p.size() != static_cast<Eigen::Index>(frame.duals.size())) {
    throw Error(ErrorCode::kLengthMismatch, "reconstruct: expected " +
                                                std::to_string(frame.duals.size()) +
                                                " probabilities, got " + std::to_string(p.size()));
  }
  Operator rho = Operator::Zero(frame.dim, frame.dim);
  for (Eigen::Index y = 0; y < p.size(); ++y) rho += p(y) * frame.duals[y];
  return rho;
}

double feasibility_poly(const ProbabilityVector& p, const DualFrame& frame) {
  if (frame.dim != 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feasibility_poly: det >= 0 characterizes states only for qubits");
  }
  const Operator rho = reconstruct(p, frame);
  return (rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0)).real();
}

std::vector<RegionSample> region_grid(const DualFrame& frame, int resolution) {
  if (resolution < 2) throw Error(ErrorCode::kInvalidConfig, "region_grid: resolution must be >= 2");
  if (frame.dim != 2) throw Error(ErrorCode::kDimensionMismatch, "region_grid: qubit frames only");
  std::vector<RegionSample> samples;
  const double step = 1.0 / resolution;
  ProbabilityVector p(4);
  for (int i = 0; i <= resolution; ++i) {
    for (int j = 0; i + j <= resolution; ++j) {
      for (int l = 0; i + j + l <= resolution; ++l) {
        p << i * step, j * step, l * step, (resolution - i - j - l) * step;
        RegionSample s{p(0), p(1), p(2), feasibility_poly(p, frame), false};
        s.feasible = s.f >= -kFeasibilitySlack && (p.array() >= 0).all() && (p.array() <= 1).all();
        samples.push_back(s);
      }
    }
  }
  return samples;
}

}  // namespace semisic
