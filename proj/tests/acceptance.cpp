// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <boost/rational.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "semisic/bloch.hpp"
#include "semisic/dual_frame.hpp"
#include "semisic/io.hpp"
#include "semisic/model.hpp"
#include "semisic/operator.hpp"
#include "semisic/qubit.hpp"
#include "semisic/search.hpp"

using namespace semisic;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

const fs::path kWork = fs::temp_directory_path() / "semisic_acceptance";

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

Check construct_reproduction() {
  Check c;
  const auto path = (kWork / "construct.json").string();
  c.expect(run_cli({"construct", "--b", "2/25", "--out", path}) == 0, "construct exited non-zero");
  const auto doc = io::read_povm_document(path);
  const auto ref = oracle::povm_2_25();
  double dist = 0;
  for (int x = 0; x < 4; ++x) dist = std::max(dist, oracle::max_abs(doc.povm[x] - ref[x]));
  c.expect(dist < 1e-12, "matrix distance " + fmt(dist));
  const double theta = io::parse_number(doc.metadata.at("theta"));
  c.expect(std::abs(std::cos(theta) - 1 / (2 * std::numbers::sqrt2)) < 1e-12, "cos theta mismatch");
  const double traces[4] = {0.4, 0.4, 0.6, 0.6};
  for (int x = 0; x < 4; ++x)
    c.expect(std::abs(doc.povm[x].trace().real() - traces[x]) < 1e-12, "trace mismatch");
  return c;
}

Check dual_coefficients_example() {
  Check c;
  const auto e = construct(2.0 / 25);
  const auto frame = dual_basis(e);
  const Operator id = Operator::Identity(2, 2);
  const Operator f1 = 12.5 * e[0] - 2.5 * (e[0] + e[1]) - id;
  const Operator f3 = 25.0 / 7 * e[2] + 5.0 / 7 * (e[2] + e[3]) - id;
  const double d1 = oracle::max_abs(frame.duals[0] - f1), d3 = oracle::max_abs(frame.duals[2] - f3);
  c.expect(d1 < 1e-12, "F_1 off by " + fmt(d1));
  c.expect(d3 < 1e-12, "F_3 off by " + fmt(d3));
  const double err = duality_error(e, frame);
  c.expect(err < 1e-10, "duality error " + fmt(err));
  return c;
}

Check feasibility_polynomial() {
  Check c;
  const auto frame = dual_basis(construct(2.0 / 25));
  std::mt19937_64 rng(2025);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = oracle::random_simplex_point(rng);
    worst = std::max(worst, std::abs(feasibility_poly(p, frame) - oracle::explicit_poly(p)));
  }
  c.expect(worst < 1e-12, "max deviation " + fmt(worst));
  const double center = feasibility_poly(vec4(0.2, 0.2, 0.3, 0.3), frame);
  c.expect(std::abs(center - 0.25) < 1e-12, "f at maximally mixed image = " + fmt(center));
  return c;
}

Check sic_endpoint() {
  Check c;
  const auto e = construct(1.0 / 12);
  for (int x = 0; x < 4; ++x) {
    c.expect(std::abs(e[x].trace().real() - 0.5) < 1e-12, "trace not 1/2");
    for (int y = 0; y < 4; ++y)
      if (x != y) c.expect(std::abs(hs_inner(e[x], e[y]) - 1.0 / 12) < 1e-12, "overlap not 1/12");
  }
  c.expect(verify(e).classification == Classification::kSic, "not classified as SIC");
  const auto frame = dual_basis(e);
  for (int x = 0; x < 4; ++x)
    c.expect(oracle::max_abs(frame.duals[x] - (6 * e[x] - Operator::Identity(2, 2))) < 1e-12, "F_x != 6E_x - I");
  return c;
}

Check spectrum_table() {
  using Rational = boost::rational<long long>;
  Check c;
  c.expect(admissible_k(3) == std::vector<int>{7, 8, 9}, "admissible k for d = 3");
  const Rational expected[3] = {Rational(1, 50), Rational(5, 196), Rational(1, 36)};
  for (int k = 7; k <= 9; ++k) {
    c.expect(b_from_k<Rational>(3, k) == expected[k - 7], "b for k = " + std::to_string(k));
    const auto p = make_params(3, k);
    c.expect(std::abs(k * p.a_minus + (9 - k) * p.a_plus - 3) < 1e-12, "counting identity");
  }
  for (int d = 3; d <= 10; ++d)
    c.expect(b_from_k<Rational>(d, d * d) == Rational(1, d * d * (d + 1)), "SIC overlap at d = " + std::to_string(d));
  return c;
}

Check property_suites() {
  Check c;
  std::mt19937_64 rng(6);
  for (int i = 1; i <= 50; ++i) {
    const double b = kQubitBMin + (kQubitBMax - kQubitBMin) * i / 50.0;
    const auto pt = family_point(b);
    const auto e = construct(pt);
    const auto frame = dual_basis(e);
    c.expect(duality_error(e, frame) < 1e-10, "duality at b = " + fmt(b));
    double total = 0;
    for (const auto& x : e.elements) total += x.trace().real();
    c.expect(std::abs(total - 2) < 1e-12, "closure at b = " + fmt(b));

    for (int j = 0; j < 2; ++j) {
      const Operator rho = oracle::random_state(2, rng);
      c.expect(oracle::max_abs(reconstruct(probabilities(rho, e), frame) - rho) < 1e-10, "rho round trip");
    }

    const BlochVector r1 = oracle::random_bloch(rng), r2 = oracle::random_bloch(rng);
    const Eigen::VectorXd mix = 0.3 * bloch_to_probs(r1, pt) + 0.7 * bloch_to_probs(r2, pt);
    c.expect((bloch_to_probs(0.3 * r1 + 0.7 * r2, pt) - mix).cwiseAbs().maxCoeff() < 1e-12, "bloch affine");
    c.expect((probs_to_bloch(bloch_to_probs(r1, pt), pt) - r1).norm() < 1e-10, "bloch round trip");

    const Operator v = oracle::random_unitary(2, rng);
    Povm moved{2, {}};
    for (const auto& x : e.elements) moved.elements.push_back(v * x * v.adjoint());
    c.expect(std::abs(canonicalize(moved).b - b) < 1e-6, "canonicalize recovery at b = " + fmt(b));
  }
  const auto sic3 = oracle::povm_from_vectors(oracle::hesse_sic_vectors());
  c.expect(duality_error(sic3, dual_basis(sic3)) < 1e-10, "duality for the d = 3 SIC");
  for (int d = 2; d <= 3; ++d) {
    const double g = gradient_check(d, d == 2 ? 0.08 : 0.02, 10, 7);
    c.expect(g < 1e-5, "gradient check " + fmt(g));
  }
  return c;
}

bool monotone(const std::vector<TracePoint>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i].residual > trace[i - 1].residual) return false;
  return true;
}

Check search(std::string& summary) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  SearchConfig q;
  q.d = 2;
  q.k = 2;
  q.b = 2.0 / 25;
  q.restarts = 20;
  q.seed = 1;
  const auto rq = run_search(q);
  c.expect(rq.best_residual < 1e-12, "d = 2 best residual " + fmt(rq.best_residual));

  SearchConfig s;
  s.d = 3;
  s.k = 9;
  s.restarts = 50;
  s.seed = 1;
  s.residual_goal = 1e-10;
  const auto rs = run_search(s);
  c.expect(rs.best_residual < 1e-10, "d = 3 SIC best residual " + fmt(rs.best_residual));
  c.expect(rs.verification && rs.verification->classification == Classification::kSic,
           "d = 3 SIC candidate does not verify");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 120, "regression runs took " + fmt(secs) + " s");
  summary += " d=2: " + fmt(rq.best_residual) + "; d=3 k=9: " + fmt(rs.best_residual) + ";";

  // Open cases: only reporting, determinism, monotone traces and gradient checks.
  for (int k : {7, 8}) {
    SearchConfig s;
    s.d = 3;
    s.k = k;
    s.restarts = 50;
    s.seed = 1;
    const auto first = run_search(s);
    const auto path = (kWork / ("search_k" + std::to_string(k) + ".json")).string();
    io::write_json_file(path, io::to_json(first));
    const auto j = io::read_json_file(path);
    c.expect(j.contains("best_residual") && j["restarts"].size() == 50, "report for k = " + std::to_string(k));

    s.threads = 1;
    const auto second = run_search(s);
    bool same = first.best_residual == second.best_residual;
    for (int i = 0; i < s.restarts; ++i) same = same && first.restarts[i].residual == second.restarts[i].residual;
    c.expect(same, "non-deterministic for k = " + std::to_string(k));

    for (const auto& r : first.restarts) c.expect(monotone(r.trace), "non-monotone trace");
    c.expect(first.gradient_check < 1e-5, "gradient check " + fmt(first.gradient_check));
    summary += " d=3 k=" + std::to_string(k) + ": " + fmt(first.best_residual) + ";";
  }
  return c;
}

Check region_checks() {
  Check c;
  for (const char* b : {"1/12", "2/25"}) {
    const auto doc_path = (kWork / "region_povm.json").string();
    const auto csv_path = (kWork / "region.csv").string();
    c.expect(run_cli({"construct", "--b", b, "--out", doc_path}) == 0, "construct failed");
    c.expect(run_cli({"region", "--in", doc_path, "--resolution", "100", "--out", csv_path}) == 0, "region failed");
    const auto doc = io::read_povm_document(doc_path);
    const auto frame = dual_basis(doc.povm);
    const auto center = probabilities(Operator::Identity(2, 2) / 2, doc.povm);

    std::ifstream in(csv_path);
    std::string line;
    std::getline(in, line);
    int feasible = 0, violations = 0;
    bool center_feasible = false;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string cell;
      double v[5];
      for (double& x : v) {
        std::getline(row, cell, ',');
        x = std::stod(cell);
      }
      if (v[4] != 1) continue;
      ++feasible;
      const auto p = vec4(v[0], v[1], v[2], 1 - v[0] - v[1] - v[2]);
      const Operator rho = reconstruct(p, frame);
      if (!is_psd(rho) || std::abs(rho.trace().real() - 1) > 1e-12) ++violations;
      if ((p - center).cwiseAbs().maxCoeff() < 1e-12) center_feasible = true;
    }
    const std::string tag = std::string(" at b = ") + b;
    c.expect(feasible > 0, "empty feasible set" + tag);
    c.expect(center_feasible, "maximally mixed point missing" + tag);
    c.expect(violations == 0, std::to_string(violations) + " violations" + tag);
  }
  return c;
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  std::string search_summary;
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"example reproduction at b = 2/25", 1, construct_reproduction},
      {"dual-basis coefficients at b = 2/25", 1, dual_coefficients_example},
      {"feasibility polynomial", 1, feasibility_polynomial},
      {"SIC endpoint degeneration", 1, sic_endpoint},
      {"spectrum table", 1, spectrum_table},
      {"property suites", 10, property_suites},
      {"search regression and open-case harness", 600, [&] { return search(search_summary); }},
      {"feasibility regions at resolution 100", 30, region_checks},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& crit = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = crit.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.ok && secs > crit.budget_seconds) {
      c.ok = false;
      c.detail = "took " + fmt(secs) + " s, budget " + fmt(crit.budget_seconds) + " s";
    }
    std::printf("[%s] %zu: %s (%.2f s)", c.ok ? "PASS" : "FAIL", i + 1, crit.name, secs);
    if (!c.ok) std::printf(" - %s", c.detail.c_str());
    std::printf("\n");
    failures += c.ok ? 0 : 1;
  }
  std::printf("search best residuals:%s\n", search_summary.c_str());
  fs::remove_all(kWork);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
