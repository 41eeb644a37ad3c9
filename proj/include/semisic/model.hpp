#pragma once

#include <string>
#include <vector>

#include "semisic/core.hpp"

namespace semisic {

/// The two admissible element traces, a_minus <= a_plus. They are the roots
/// of a^2 - a + (d^2 - 1) b = 0.
struct TraceValues {
  double a_minus = 0;
  double a_plus = 0;
};

TraceValues trace_values(int d, double b);

/// Overlap b for a d >= 3 semi-SIC with k elements of the smaller trace.
/// Templated so the same expression can be evaluated in exact rational
/// arithmetic; T must be constructible from long long and support / and *.
template <typename T = double>
T b_from_k(int d, int k);

void check_admissible_k(int d, int k);

template <typename T>
T b_from_k(int d, int k) {
  check_admissible_k(d, k);
  const long long dd = static_cast<long long>(d) * d;
  const long long kk = k;
  const long long num = (kk - d) * (kk + d - dd);
  const long long gap = dd - 2 * kk;
  return T(num) / (T(dd - 1) * T(gap * gap));
}

/// {d^2 - d + 1, ..., d^2}.
std::vector<int> admissible_k(int d);

struct SemiSicParams {
  int d = 0;
  double b = 0;
  int k = 0;
  double a_minus = 0;
  double a_plus = 0;

  bool is_sic() const { return a_minus == a_plus; }
};

/// Parameters for d >= 3, with b pinned by k.
SemiSicParams make_params(int d, int k);

/// Parameters with b given. For d >= 3, b must agree with b_from_k(d, k).
SemiSicParams make_params(int d, double b, int k);

enum class Classification { kSic, kStrictSemiSic, kNotSemiSic };

const char* to_string(Classification c);

struct TraceClass {
  double value = 0;
  int count = 0;
};

struct VerificationReport {
  int dim = 0;
  bool complete = false;
  bool is_ic = false;
  bool all_rank_one = false;
  bool equiangular = false;
  double fitted_b = 0;
  std::vector<TraceClass> trace_classes;
  int k = 0;
  Classification classification = Classification::kNotSemiSic;
  double max_violation = 0;
  double overlap_deviation = 0;
  double completeness_error = 0;
  double trace_equation_residual = 0;
  int gram_rank = 0;

  bool passed() const { return classification != Classification::kNotSemiSic; }
};

/// Sort traces and split at the largest gap when it exceeds `gap`;
/// returns classes in ascending order of value.
std::vector<TraceClass> cluster_traces(std::vector<double> traces, double gap);

/// Checks the semi-SIC conditions on a candidate POVM and classifies it.
/// Structural failures (element count, shape, non-Hermitian or non-PSD
/// elements) throw MalformedPovm; everything else lands in the report.
VerificationReport verify(const Povm& povm, const Tolerances& tol = {});

/// Parameters implied by a passing report.
SemiSicParams params_from_report(const VerificationReport& report);

}  // namespace semisic
