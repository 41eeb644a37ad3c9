#pragma once

#include <vector>

#include "semisic/core.hpp"
#include "semisic/model.hpp"

namespace semisic {

/// Coefficients of F_y = alpha E_y + beta B + gamma I, where B is the sum of
/// the elements sharing E_y's trace class (S for the a_- block, T for a_+).
struct DualCoefficients {
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
};

/// Coefficients for an element of trace `own` in a block of `own_count`
/// elements, the remaining elements having trace `other`. Solves
/// Tr[E_x F_y] = delta_xy using only the overlap b and the trace quadratic.
DualCoefficients dual_coefficients(int d, double b, double own, double other, int own_count,
                                   const Tolerances& tol = {});

struct DualFrame {
  int dim = 0;
  int source_k = 0;
  std::vector<Operator> duals;     // duals[y] is dual to povm[y], in caller order
  std::vector<int> permutation;    // block order: permutation[i] is the caller index
  DualCoefficients minus_block;
  DualCoefficients plus_block;
};

/// Dual basis of a semi-SIC POVM. Elements may be supplied in any order;
/// they are sorted into (a_-, a_+) blocks internally.
DualFrame dual_basis(const Povm& povm, const SemiSicParams& params, const Tolerances& tol = {});

/// Verifies the POVM first and derives the parameters from the report.
DualFrame dual_basis(const Povm& povm, const Tolerances& tol = {});

/// Max |Tr[E_x F_y] - delta_xy|.
double duality_error(const Povm& povm, const DualFrame& frame);

using ProbabilityVector = Eigen::VectorXd;

/// p_y = Tr[E_y rho] for a density operator rho.
ProbabilityVector probabilities(const Operator& rho, const Povm& povm, const Tolerances& tol = {});

/// sum_y p_y F_y. Unit trace whenever p sums to one; not necessarily PSD.
Operator reconstruct(const ProbabilityVector& p, const DualFrame& frame);

/// det(reconstruct(p)), qubit only.
double feasibility_poly(const ProbabilityVector& p, const DualFrame& frame);

struct RegionSample {
  double p1 = 0, p2 = 0, p3 = 0;
  double f = 0;
  bool feasible = false;
};

inline constexpr double kFeasibilitySlack = 1e-12;

/// Evaluates f on the simplex grid p_i = n_i / resolution with
/// p_4 = 1 - p_1 - p_2 - p_3 >= 0, ordered by (n_1, n_2, n_3).
std::vector<RegionSample> region_grid(const DualFrame& frame, int resolution);

}  // namespace semisic
