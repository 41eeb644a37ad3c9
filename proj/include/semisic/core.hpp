#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semisic {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;

enum class ErrorCode {
  kDimensionMismatch,
  kNonNegligibleImaginaryPart,
  kNotNormalized,
  kConvergenceFailure,
  kBOutOfRange,
  kKOutOfRange,
  kDimensionTooSmall,
  kMalformedPovm,
  kBOutOfFamilyRange,
  kNotQubitSemiSic,
  kDegenerateCoefficients,
  kNotSemiSic,
  kNotAState,
  kLengthMismatch,
  kOutsideBlochBall,
  kInconsistentProbabilities,
  kInvalidConfig,
  kParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Numerical thresholds shared by every predicate in the library.
///
/// `tol_rank` is relative to max(1, spectral norm). `tol_overlap` bounds the
/// spread of Hilbert-Schmidt overlaps accepted as "equiangular"; `tol_cond`
/// guards denominators in the dual-frame coefficients.
struct Tolerances {
  double tol_herm = 1e-12;
  double tol_norm = 1e-12;
  double tol_psd = 1e-10;
  double tol_rank = 1e-10;
  double tol_cond = 1e-12;
  double tol_overlap = 1e-10;

  void validate() const;
};

/// An ordered list of dim^2 measurement operators.
struct Povm {
  int dim = 0;
  std::vector<Operator> elements;

  std::size_t size() const { return elements.size(); }
  const Operator& operator[](std::size_t i) const { return elements[i]; }
};

/// Entrywise sum of the elements minus the identity, as a max-abs value.
double completeness_error(const Povm& povm);

}  // namespace semisic
