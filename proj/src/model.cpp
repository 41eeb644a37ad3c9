#include "semisic/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "semisic/operator.hpp"

namespace semisic {

namespace {

// Discriminants within this distance of zero are roundoff from b = 1/(4(d^2-1)).
constexpr double kDiscriminantSnap = 1e-14;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonNegligibleImaginaryPart: return "NonNegligibleImaginaryPart";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kBOutOfRange: return "BOutOfRange";
    case ErrorCode::kKOutOfRange: return "KOutOfRange";
    case ErrorCode::kDimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::kMalformedPovm: return "MalformedPovm";
    case ErrorCode::kBOutOfFamilyRange: return "BOutOfFamilyRange";
    case ErrorCode::kNotQubitSemiSic: return "NotQubitSemiSic";
    case ErrorCode::kDegenerateCoefficients: return "DegenerateCoefficients";
    case ErrorCode::kNotSemiSic: return "NotSemiSic";
    case ErrorCode::kNotAState: return "NotAState";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOutsideBlochBall: return "OutsideBlochBall";
    case ErrorCode::kInconsistentProbabilities: return "InconsistentProbabilities";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

void Tolerances::validate() const {
  for (double t : {tol_herm, tol_norm, tol_psd, tol_rank, tol_cond, tol_overlap}) {
    if (!(t > 0) || !std::isfinite(t)) {
      throw Error(ErrorCode::kInvalidConfig, "tolerances must be finite and strictly positive");
    }
  }
}

double completeness_error(const Povm& povm) {
  Operator sum = Operator::Zero(povm.dim, povm.dim);
  for (const auto& e : povm.elements) sum += e;
  return (sum - Operator::Identity(povm.dim, povm.dim)).cwiseAbs().maxCoeff();
}

TraceValues trace_values(int d, double b) {
  if (d < 2) throw Error(ErrorCode::kDimensionTooSmall, "trace_values: d must be at least 2");
  if (!(b > 0) || !std::isfinite(b)) {
    throw Error(ErrorCode::kBOutOfRange, "trace_values: b must be positive, got " + fmt(b));
  }
  double disc = 1.0 - 4.0 * b * (static_cast<double>(d) * d - 1);
  if (std::abs(disc) < kDiscriminantSnap) disc = 0;
  if (disc < 0) {
    throw Error(ErrorCode::kBOutOfRange,
                "trace_values: b = " + fmt(b) + " exceeds 1/(4(d^2-1)); traces would be complex");
  }
  // Smaller root from the product a_- a_+ = (d^2 - 1) b, avoiding cancellation.
  const double a_plus = (1 + std::sqrt(disc)) / 2;
  return {(static_cast<double>(d) * d - 1) * b / a_plus, a_plus};
}

void check_admissible_k(int d, int k) {
  if (d < 3) {
    throw Error(ErrorCode::kDimensionTooSmall,
                "b is fixed by k only for d >= 3; d = 2 has a continuous family");
  }
  const int dd = d * d;
  if (k <= dd - d || k > dd || 2 * k == dd) {
    throw Error(ErrorCode::kKOutOfRange, "k = " + std::to_string(k) + " is not in (" +
                                             std::to_string(dd - d) + ", " + std::to_string(dd) +
                                             "] for d = " + std::to_string(d));
  }
}

std::vector<int> admissible_k(int d) {
  if (d < 3) {
    throw Error(ErrorCode::kDimensionTooSmall,
                "admissible_k: d = 2 is the continuous-b regime");
  }
  std::vector<int> ks(d);
  std::iota(ks.begin(), ks.end(), d * d - d + 1);
  return ks;
}

SemiSicParams make_params(int d, int k) {
  return make_params(d, b_from_k<double>(d, k), k);
}

SemiSicParams make_params(int d, double b, int k) {
  const int dd = d * d;
  if (k < 1 || k > dd) {
    throw Error(ErrorCode::kKOutOfRange, "k = " + std::to_string(k) + " outside [1, d^2]");
  }
  if (d >= 3) {
    const double pinned = b_from_k<double>(d, k);
    if (std::abs(pinned - b) > 1e-9 * pinned) {
      throw Error(ErrorCode::kBOutOfRange, "b = " + fmt(b) + " does not match b(k=" +
                                               std::to_string(k) + ") = " + fmt(pinned));
    }
  }
  const auto [am, ap] = trace_values(d, b);
  SemiSicParams p{d, b, k, am, ap};
  const double count = k * am + (dd - k) * ap;
  if (std::abs(count - d) > 1e-9) {
    throw Error(ErrorCode::kKOutOfRange, "k = " + std::to_string(k) +
                                             " violates the trace-counting identity (sum " +
                                             fmt(count) + " != " + std::to_string(d) + ")");
  }
  return p;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::kSic: return "SIC";
    case Classification::kStrictSemiSic: return "StrictSemiSIC";
    case Classification::kNotSemiSic: return "NotSemiSIC";
  }
  return "Unknown";
}

std::vector<TraceClass> cluster_traces(std::vector<double> traces, double gap) {
  std::vector<TraceClass> classes;
  if (traces.empty()) return classes;
  std::sort(traces.begin(), traces.end());
  double sum = traces.front();
  int count = 1;
  for (std::size_t i = 1; i < traces.size(); ++i) {
    if (traces[i] - traces[i - 1] > gap) {
      classes.push_back({sum / count, count});
      sum = 0;
      count = 0;
    }
    sum += traces[i];
    ++count;
  }
  classes.push_back({sum / count, count});
  return classes;
}

VerificationReport verify(const Povm& povm, const Tolerances& tol) {
  tol.validate();
  const int d = povm.dim;
  const int n = d * d;
  if (d < 2) throw Error(ErrorCode::kMalformedPovm, "verify: dimension must be at least 2");
  if (static_cast<int>(povm.size()) != n) {
    throw Error(ErrorCode::kMalformedPovm, "verify: expected " + std::to_string(n) +
                                               " elements, got " + std::to_string(povm.size()));
  }
  for (int x = 0; x < n; ++x) {
    const auto& e = povm[x];
    const std::string where = "verify: element " + std::to_string(x);
    if (e.rows() != d || e.cols() != d) throw Error(ErrorCode::kMalformedPovm, where + " has wrong shape");
    if (!e.allFinite()) throw Error(ErrorCode::kMalformedPovm, where + " has non-finite entries");
    if (!is_hermitian(e, tol)) throw Error(ErrorCode::kMalformedPovm, where + " is not Hermitian");
    if (!is_psd(e, tol)) throw Error(ErrorCode::kMalformedPovm, where + " is not positive semidefinite");
  }

  VerificationReport report;
  report.dim = d;

  report.completeness_error = completeness_error(povm);
  report.complete = report.completeness_error <= tol.tol_herm * n;

  report.all_rank_one = std::all_of(povm.elements.begin(), povm.elements.end(),
                                    [&](const Operator& e) { return rank(e, tol) == 1; });

  Eigen::MatrixXd gram(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = x; y < n; ++y) {
      gram(x, y) = gram(y, x) = hs_inner(povm[x], povm[y], tol);
    }
  }
  double sum = 0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) sum += gram(x, y);
  report.fitted_b = sum / (n * (n - 1) / 2.0);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      report.overlap_deviation = std::max(report.overlap_deviation, std::abs(gram(x, y) - report.fitted_b));
  report.equiangular = report.overlap_deviation <= tol.tol_overlap;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram, Eigen::EigenvaluesOnly);
  const auto& lambda = gram_eig.eigenvalues();
  const double cutoff = tol.tol_rank * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  report.gram_rank = static_cast<int>((lambda.array() > cutoff).count());
  report.is_ic = report.gram_rank == n;

  std::vector<double> traces(n);
  for (int x = 0; x < n; ++x) traces[x] = povm[x].trace().real();
  report.trace_classes = cluster_traces(traces, 100 * tol.tol_norm);
  report.k = report.trace_classes.size() == 1 ? n : report.trace_classes.front().count;

  for (double a : traces) {
    report.trace_equation_residual =
        std::max(report.trace_equation_residual, std::abs(a * a - a + (n - 1) * report.fitted_b));
  }
  const bool traces_consistent =
      report.trace_equation_residual <= n * (tol.tol_overlap + tol.tol_herm * n);

  report.max_violation = std::max({report.overlap_deviation, report.completeness_error,
                                   report.trace_equation_residual});

  const bool ok = report.complete && report.all_rank_one && report.equiangular && report.is_ic &&
                  traces_consistent && report.trace_classes.size() <= 2;
  if (!ok) {
    report.classification = Classification::kNotSemiSic;
  } else if (report.trace_classes.size() == 1) {
    report.classification = Classification::kSic;
  } else {
    report.classification = Classification::kStrictSemiSic;
  }
  return report;
}

SemiSicParams params_from_report(const VerificationReport& report) {
  if (!report.passed()) {
    throw Error(ErrorCode::kNotSemiSic, "params_from_report: POVM did not verify as semi-SIC");
  }
  const int n = report.dim * report.dim;
  SemiSicParams p{report.dim, report.fitted_b, report.k, 0, 0};
  if (report.classification == Classification::kSic) {
    // One trace class at 1/d; the other root of the trace quadratic is 1 - 1/d.
    p.a_minus = 1.0 / report.dim;
    p.a_plus = report.dim == 2 ? p.a_minus : 1.0 - p.a_minus;
    p.k = n;
  } else {
    const auto tv = trace_values(report.dim, report.fitted_b);
    p.a_minus = tv.a_minus;
    p.a_plus = tv.a_plus;
  }
  return p;
}

}  // namespace semisic
