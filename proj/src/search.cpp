#include "semisic/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "semisic/operator.hpp"
#include "semisic/qubit.hpp"

namespace semisic {

namespace {

using RealVector = Eigen::VectorXd;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t restart_seed(std::uint64_t seed, int index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

FrameVectors gaussian_vectors(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  FrameVectors v(d, d * d);
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = Complex(normal(rng), normal(rng));
  return v;
}

void require_frame_shape(const FrameVectors& v) {
  if (v.rows() < 1 || v.cols() != v.rows() * v.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "search: expected a d x d^2 matrix of kets");
  }
}

// Real coordinates (Re, Im interleaved) of a complex matrix; std::complex is
// layout-compatible with double[2].
Eigen::Map<const FrameVectors> as_frame(const RealVector& x, int d) {
  return {reinterpret_cast<const Complex*>(x.data()), d, d * d};
}

RealVector as_real(const FrameVectors& v) {
  return Eigen::Map<const RealVector>(reinterpret_cast<const double*>(v.data()), 2 * v.size());
}

}  // namespace

double overlap_residual(const FrameVectors& v, double b) {
  require_frame_shape(v);
  Eigen::MatrixXd w = (v.adjoint() * v).cwiseAbs2().array() - b;
  w.diagonal().setZero();
  return w.squaredNorm();
}

double completeness_penalty(const FrameVectors& v, double weight) {
  require_frame_shape(v);
  const Eigen::Index d = v.rows();
  return weight * (v * v.adjoint() - FrameVectors::Identity(d, d)).squaredNorm();
}

double objective(const FrameVectors& v, double b, double weight) {
  return overlap_residual(v, b) + completeness_penalty(v, weight);
}

FrameVectors overlap_gradient(const FrameVectors& v, double b) {
  require_frame_shape(v);
  const FrameVectors gram = v.adjoint() * v;
  Eigen::MatrixXd w = gram.cwiseAbs2().array() - b;
  w.diagonal().setZero();
  return 8.0 * v * w.cast<Complex>().cwiseProduct(gram);
}

FrameVectors completeness_gradient(const FrameVectors& v, double weight) {
  require_frame_shape(v);
  const Eigen::Index d = v.rows();
  return 4.0 * weight * (v * v.adjoint() - FrameVectors::Identity(d, d)) * v;
}

FrameVectors gradient(const FrameVectors& v, double b, double weight) {
  return overlap_gradient(v, b) + completeness_gradient(v, weight);
}

FrameVectors finite_difference_gradient(const FrameVectors& v, double b, double weight, double h) {
  require_frame_shape(v);
  FrameVectors g(v.rows(), v.cols());
  FrameVectors probe = v;
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    const Complex base = v(idx);
    double part[2];
    for (int c = 0; c < 2; ++c) {
      const Complex step = c == 0 ? Complex(h, 0) : Complex(0, h);
      probe(idx) = base + step;
      const double up = objective(probe, b, weight);
      probe(idx) = base - step;
      const double down = objective(probe, b, weight);
      part[c] = (up - down) / (2 * h);
    }
    probe(idx) = base;
    g(idx) = Complex(part[0], part[1]);
  }
  return g;
}

bool project_to_coisometry(FrameVectors& v) {
  const FrameVectors frame_op = v * v.adjoint();
  Eigen::SelfAdjointEigenSolver<FrameVectors> eig(frame_op);
  if (eig.info() != Eigen::Success) return false;
  const auto& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 1e-12 * std::max(1.0, lambda.maxCoeff()))) return false;
  const FrameVectors inv_sqrt =
      eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
      eig.eigenvectors().adjoint();
  v = inv_sqrt * v;
  return true;
}

Povm assemble_povm(const FrameVectors& v) {
  require_frame_shape(v);
  Povm povm{static_cast<int>(v.rows()), {}};
  povm.elements.reserve(v.cols());
  for (Eigen::Index x = 0; x < v.cols(); ++x) povm.elements.push_back(v.col(x) * v.col(x).adjoint());
  return povm;
}

FrameVectors frame_vectors(const Povm& povm, const Tolerances& tol) {
  FrameVectors v(povm.dim, static_cast<Eigen::Index>(povm.size()));
  for (std::size_t x = 0; x < povm.size(); ++x) {
    const auto eig = eig_hermitian(povm[x], tol);
    const Eigen::Index top = eig.values.size() - 1;
    v.col(x) = std::sqrt(std::max(0.0, eig.values(top))) * eig.vectors.col(top);
  }
  return v;
}

const char* to_string(StepPolicy p) {
  switch (p) {
    case StepPolicy::kLbfgs: return "lbfgs";
    case StepPolicy::kSteepest: return "steepest";
    case StepPolicy::kMomentum: return "momentum";
  }
  return "unknown";
}

StepPolicy parse_step_policy(const std::string& name) {
  if (name == "lbfgs") return StepPolicy::kLbfgs;
  if (name == "steepest") return StepPolicy::kSteepest;
  if (name == "momentum") return StepPolicy::kMomentum;
  throw Error(ErrorCode::kInvalidConfig, "unknown step policy '" + name + "'");
}

double target_b(const SearchConfig& config) {
  if (config.d >= 3) {
    const double pinned = b_from_k<double>(config.d, config.k);
    if (config.b && std::abs(*config.b - pinned) > 1e-12 * pinned) {
      throw Error(ErrorCode::kInvalidConfig, "b is fixed by k for d >= 3");
    }
    return pinned;
  }
  if (config.d != 2) throw Error(ErrorCode::kInvalidConfig, "d must be at least 2");
  if (config.k == 4) {
    if (config.b && std::abs(*config.b - kQubitBMax) > 1e-15) {
      throw Error(ErrorCode::kInvalidConfig, "k = 4 in d = 2 is the SIC, b = 1/12");
    }
    return kQubitBMax;
  }
  if (config.k != 2) throw Error(ErrorCode::kInvalidConfig, "d = 2 requires k = 2 or k = 4");
  if (!config.b) throw Error(ErrorCode::kInvalidConfig, "d = 2, k = 2 requires b");
  try {
    return family_point(*config.b).b;
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
}

void validate(const SearchConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (c.d < 2 || c.d > 16) fail("d must be in [2, 16]");
  try {
    target_b(c);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (c.max_iterations < 1) fail("max_iterations must be positive");
  if (c.restarts < 1) fail("restarts must be positive");
  if (!(c.initial_step > 0)) fail("initial_step must be positive");
  if (!(c.decay > 0 && c.decay < 1)) fail("decay must be in (0, 1)");
  if (!(c.momentum >= 0 && c.momentum < 1)) fail("momentum must be in [0, 1)");
  if (!(c.penalty_weight > 0)) fail("penalty_weight must be positive");
  if (!(c.residual_goal > 0)) fail("residual_goal must be positive");
  if (!(c.stop_residual >= 0)) fail("stop_residual must be non-negative");
  if (c.threads < 0) fail("threads must be non-negative");
  if (c.trace_points < 2) fail("trace_points must be at least 2");
}

std::vector<int> SearchReport::iterations_per_restart() const {
  std::vector<int> out;
  out.reserve(restarts.size());
  for (const auto& r : restarts) out.push_back(r.iterations);
  return out;
}

FrameVectors initial_vectors(int d, std::uint64_t seed, int index) {
  std::mt19937_64 rng(restart_seed(seed, index));
  FrameVectors v = gaussian_vectors(d, rng);
  v *= std::sqrt(d / v.squaredNorm());
  return v;
}

RestartSummary descend(FrameVectors& v, double b, const SearchConfig& config) {
  require_frame_shape(v);
  const int d = static_cast<int>(v.rows());
  const double w = config.penalty_weight;
  constexpr int kMemory = 8;
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-20;

  auto f_of = [&](const RealVector& x) { return objective(as_frame(x, d), b, w); };
  auto g_of = [&](const RealVector& x) { return as_real(gradient(as_frame(x, d), b, w)); };

  RealVector x = as_real(v);
  double f = f_of(x);
  RealVector g = g_of(x);

  RestartSummary out;
  const int stride = std::max(1, config.max_iterations / (config.trace_points - 1));
  out.trace.push_back({0, f});

  std::deque<std::pair<RealVector, RealVector>> history;
  RealVector previous_direction = RealVector::Zero(x.size());
  double previous_step = config.initial_step / std::max(1.0, g.norm());

  int it = 0;
  while (it < config.max_iterations && f > config.stop_residual) {
    RealVector p;
    double trial = 1.0;
    if (config.policy == StepPolicy::kLbfgs && !history.empty()) {
      // Two-loop recursion.
      RealVector q = g;
      std::vector<double> a(history.size());
      for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = history[i];
        a[i] = s.dot(q) / y.dot(s);
        q -= a[i] * y;
      }
      const auto& [s_last, y_last] = history.back();
      q *= s_last.dot(y_last) / y_last.squaredNorm();
      for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& [s, y] = history[i];
        const double beta = y.dot(q) / y.dot(s);
        q += (a[i] - beta) * s;
      }
      p = -q;
    } else if (config.policy == StepPolicy::kMomentum) {
      p = -g + config.momentum * previous_direction;
      trial = std::min(1.0, previous_step / config.decay);
    } else {
      p = -g;
      trial = config.policy == StepPolicy::kLbfgs ? previous_step
                                                  : std::min(1.0, previous_step / config.decay);
    }
    double slope = g.dot(p);
    if (!(slope < 0)) {
      p = -g;
      slope = -g.squaredNorm();
      history.clear();
    }

    double t = trial;
    RealVector next;
    double f_next = f;
    bool accepted = false;
    while (t > kMinStep) {
      next = x + t * p;
      f_next = f_of(next);
      if (f_next <= f + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= config.decay;
    }
    if (!accepted) {
      if (!history.empty() || previous_direction.squaredNorm() > 0) {
        history.clear();
        previous_direction.setZero();
        continue;
      }
      break;
    }

    ++it;
    RealVector g_next = g_of(next);
    RealVector s = next - x;
    RealVector y = g_next - g;
    if (s.dot(y) > 1e-300) {
      history.emplace_back(std::move(s), std::move(y));
      if (history.size() > kMemory) history.pop_front();
    }
    x = std::move(next);
    g = std::move(g_next);
    f = f_next;
    previous_direction = p;
    previous_step = t;
    if (it % stride == 0) out.trace.push_back({it, f});
  }
  if (out.trace.back().iteration != it) out.trace.push_back({it, f});

  out.iterations = it;
  out.residual = f;
  v = as_frame(x, d);
  return out;
}

double gradient_check(int d, double b, double weight, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0x6a09e667f3bcc909ULL));
  double worst = 0;
  for (int i = 0; i < 5; ++i) {
    const FrameVectors v = gaussian_vectors(d, rng);
    const FrameVectors analytic = gradient(v, b, weight);
    const FrameVectors numeric = finite_difference_gradient(v, b, weight);
    worst = std::max(worst, (analytic - numeric).norm() /
                                std::max(numeric.norm(), std::numeric_limits<double>::min()));
  }
  return worst;
}

SearchReport run_search(const SearchConfig& config) {
  validate(config);
  const double b = target_b(config);

  SearchReport report;
  report.config = config;
  report.b = b;
  report.restarts.resize(config.restarts);
  std::vector<FrameVectors> finals(config.restarts);

  auto run_one = [&](int index) {
    FrameVectors v = initial_vectors(config.d, config.seed, index);
    RestartSummary summary = descend(v, b, config);
    if (config.project) {
      FrameVectors projected = v;
      if (project_to_coisometry(projected)) {
        const double f = objective(projected, b, config.penalty_weight);
        if (f <= summary.residual || f < config.residual_goal) {
          v = std::move(projected);
          summary.residual = f;
        }
      }
    }
    summary.index = index;
    summary.seed = restart_seed(config.seed, index);
    report.restarts[index] = std::move(summary);
    finals[index] = std::move(v);
  };

  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, config.restarts);
  if (threads == 1) {
    for (int i = 0; i < config.restarts; ++i) run_one(i);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int i = t; i < config.restarts; i += threads) run_one(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  report.restarts_run = config.restarts;

  report.best_restart = 0;
  for (int i = 1; i < config.restarts; ++i) {
    if (report.restarts[i].residual < report.restarts[report.best_restart].residual) report.best_restart = i;
  }
  const auto& best = report.restarts[report.best_restart];
  report.best_residual = best.residual;
  report.objective_trace = best.trace;
  report.gradient_check = gradient_check(config.d, b, config.penalty_weight, config.seed);

  if (report.best_residual < config.residual_goal) {
    report.best_povm = assemble_povm(finals[report.best_restart]);
    Tolerances tol;
    const double slack = 10 * std::sqrt(report.best_residual);
    tol.tol_overlap = std::max(tol.tol_overlap, slack);
    tol.tol_norm = std::max(tol.tol_norm, slack);
    tol.tol_herm = std::max(tol.tol_herm, slack);
    try {
      report.verification = verify(*report.best_povm, tol);
      report.trace_split_matches =
          report.verification->passed() && report.verification->k == config.k;
    } catch (const Error&) {
      report.verification.reset();
    }
  }
  return report;
}

}  // namespace semisic
