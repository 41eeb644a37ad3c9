#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semisic/core.hpp"
#include "semisic/model.hpp"

namespace semisic {

/// Columns are the unnormalized kets v_x; E_x = v_x v_x^dagger. A d x d^2
/// matrix, so the rank-one condition holds by construction.
using FrameVectors = Eigen::MatrixXcd;

/// sum_{x != y} (|<v_x|v_y>|^2 - b)^2 over ordered pairs.
double overlap_residual(const FrameVectors& v, double b);

/// w ||V V^dagger - I||_F^2.
double completeness_penalty(const FrameVectors& v, double weight);

double objective(const FrameVectors& v, double b, double weight);

// Gradients are returned as 2 df/d(conj V): for a perturbation D,
// df = Re sum conj(G) .* D to first order, so Re G is df/dRe V and Im G
// is df/dIm V.
FrameVectors overlap_gradient(const FrameVectors& v, double b);
FrameVectors completeness_gradient(const FrameVectors& v, double weight);
FrameVectors gradient(const FrameVectors& v, double b, double weight);

/// Central finite-difference gradient with step h, same convention.
FrameVectors finite_difference_gradient(const FrameVectors& v, double b, double weight,
                                        double h = 1e-6);

/// Replaces V by its polar factor (V V^dagger)^{-1/2} V, so V V^dagger = I.
/// Returns false and leaves V untouched when V V^dagger is singular.
bool project_to_coisometry(FrameVectors& v);

Povm assemble_povm(const FrameVectors& v);

/// Frame vectors sqrt(a_x) psi_x of a POVM of rank-one elements.
FrameVectors frame_vectors(const Povm& povm, const Tolerances& tol = {});

enum class StepPolicy { kLbfgs, kSteepest, kMomentum };

const char* to_string(StepPolicy p);
StepPolicy parse_step_policy(const std::string& name);

struct SearchConfig {
  int d = 2;
  int k = 2;
  std::optional<double> b;  // required for d = 2, k = 2; pinned by k otherwise
  int max_iterations = 4000;
  int restarts = 20;
  std::uint64_t seed = 0;
  double initial_step = 1.0;
  StepPolicy policy = StepPolicy::kLbfgs;
  double decay = 0.5;         // backtracking shrink factor
  double momentum = 0.9;      // only for kMomentum
  double penalty_weight = 10.0;
  double residual_goal = 1e-12;
  double stop_residual = 1e-30;
  bool project = true;
  int threads = 0;            // 0: hardware concurrency
  int trace_points = 64;
};

/// Overlap targeted by the config, validating it on the way.
double target_b(const SearchConfig& config);

void validate(const SearchConfig& config);

struct TracePoint {
  int iteration = 0;
  double residual = 0;
};

struct RestartSummary {
  int index = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double residual = 0;
  std::vector<TracePoint> trace;
};

struct SearchReport {
  SearchConfig config;
  double b = 0;
  double best_residual = 0;
  int best_restart = -1;
  int restarts_run = 0;
  std::vector<RestartSummary> restarts;
  std::vector<TracePoint> objective_trace;  // of the best restart
  double gradient_check = 0;
  std::optional<Povm> best_povm;
  std::optional<VerificationReport> verification;
  bool trace_split_matches = false;

  std::vector<int> iterations_per_restart() const;
};

/// One descent from the given start. Exposed for tests; run_search is the
/// entry point.
RestartSummary descend(FrameVectors& v, double b, const SearchConfig& config);

/// Random start for restart `index`, derived only from (seed, index).
FrameVectors initial_vectors(int d, std::uint64_t seed, int index);

/// Max relative error of the analytic gradient against central differences
/// at five random points drawn from `seed`.
double gradient_check(int d, double b, double weight, std::uint64_t seed);

SearchReport run_search(const SearchConfig& config);

}  // namespace semisic
