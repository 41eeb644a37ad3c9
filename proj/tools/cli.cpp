#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <boost/rational.hpp>

#include "semisic/bloch.hpp"
#include "semisic/dual_frame.hpp"
#include "semisic/io.hpp"
#include "semisic/model.hpp"
#include "semisic/qubit.hpp"
#include "semisic/search.hpp"

namespace semisic::cli {

namespace {

// Raised for conditions that map to exit code 1.
struct SemanticFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Text output uses 15 significant digits; JSON keeps full precision.
std::string shortest(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
  return ec == std::errc() ? std::string(buf, end) : io::format17(x);
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + shortest(v(i));
  return s;
}

int cmd_construct(const std::string& b_text, const std::string& out_path, std::ostream& out) {
  const auto point = family_point(io::parse_number(b_text));
  const Povm povm = construct(point);
  const auto report = verify(povm);
  io::PovmDocument doc{povm, point.b, report.k,
                       {{"source", "construct"},
                        {"r", io::format17(point.r)},
                        {"theta", io::format17(point.theta)}}};
  const auto text = io::to_json(doc).dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    io::write_text_file(out_path, text);
    out << "wrote " << out_path << " (b = " << shortest(point.b) << ", " << to_string(report.classification)
        << ")\n";
  }
  return kOk;
}

int cmd_verify(const std::string& in_path, bool json, std::ostream& out) {
  const auto doc = io::read_povm_document(in_path);
  const auto report = verify(doc.povm);
  if (json) {
    out << io::to_json(report).dump(2) << "\n";
  } else {
    out << "classification: " << to_string(report.classification) << "\n"
        << "fitted_b: " << shortest(report.fitted_b) << "\n"
        << "k: " << report.k << "\n"
        << "max_violation: " << shortest(report.max_violation) << "\n"
        << "complete: " << report.complete << "  ic: " << report.is_ic
        << "  rank_one: " << report.all_rank_one << "  equiangular: " << report.equiangular << "\n";
  }
  return report.passed() ? kOk : kNegative;
}

DualFrame frame_for(const Povm& povm) {
  const auto report = verify(povm);
  if (!report.passed()) {
    throw SemanticFailure(std::string("POVM verifies as ") + to_string(report.classification));
  }
  return dual_basis(povm, params_from_report(report));
}

int cmd_dual(const std::string& in_path, const std::string& out_path, std::ostream& out) {
  const auto doc = io::read_povm_document(in_path);
  const auto frame = frame_for(doc.povm);
  auto j = io::to_json(frame);
  j["duality_error"] = duality_error(doc.povm, frame);
  if (out_path.empty() || out_path == "-") {
    out << j.dump(2) << "\n";
  } else {
    io::write_json_file(out_path, j);
    out << "wrote " << out_path << " (duality error " << shortest(duality_error(doc.povm, frame)) << ")\n";
  }
  return kOk;
}

int cmd_region(const std::string& in_path, int resolution, const std::string& out_path, std::ostream& out) {
  const auto doc = io::read_povm_document(in_path);
  if (doc.povm.dim != 2) throw Error(ErrorCode::kDimensionMismatch, "region: qubit POVMs only");
  const auto frame = frame_for(doc.povm);
  const auto samples = region_grid(frame, resolution);
  const auto feasible = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.feasible; });
  if (out_path.empty() || out_path == "-") {
    io::write_region_csv(out, samples);
  } else {
    std::ostringstream csv;
    io::write_region_csv(csv, samples);
    io::write_text_file(out_path, csv.str());
    out << "wrote " << out_path << ": " << feasible << " of " << samples.size() << " grid points feasible\n";
  }
  return kOk;
}

int cmd_bloch(const std::string& b_text, const std::vector<std::string>& to_probs,
              const std::vector<std::string>& to_bloch, std::ostream& out) {
  if (to_probs.empty() && to_bloch.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "bloch: one of --to-probs or --to-bloch is required");
  }
  const auto point = family_point(io::parse_number(b_text));
  auto numbers = [](const std::vector<std::string>& texts) {
    Eigen::VectorXd v(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) v(i) = io::parse_number(texts[i]);
    return v;
  };
  try {
    if (!to_probs.empty()) {
      out << join(bloch_to_probs(numbers(to_probs), point)) << "\n";
    } else {
      out << join(probs_to_bloch(numbers(to_bloch), point)) << "\n";
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInconsistentProbabilities || e.code() == ErrorCode::kOutsideBlochBall) {
      throw SemanticFailure(e.what());
    }
    throw;
  }
  return kOk;
}

int cmd_spectrum(int d, std::ostream& out) {
  out << "k b b_exact a_minus a_plus\n";
  for (int k : admissible_k(d)) {
    const auto exact = b_from_k<boost::rational<long long>>(d, k);
    const auto p = make_params(d, k);
    out << k << " " << shortest(p.b) << " " << exact.numerator() << "/" << exact.denominator() << " "
        << shortest(p.a_minus) << " " << shortest(p.a_plus) << "\n";
  }
  return kOk;
}

int cmd_search(const SearchConfig& config, const std::string& out_path, bool require_solution,
               std::ostream& out) {
  const auto report = run_search(config);
  if (!out_path.empty()) io::write_json_file(out_path, io::to_json(report));
  out << "d = " << config.d << ", k = " << config.k << ", b = " << shortest(report.b) << "\n"
      << "best_residual: " << shortest(report.best_residual) << " (restart " << report.best_restart << " of "
      << report.restarts_run << ")\n"
      << "gradient_check: " << shortest(report.gradient_check) << "\n";
  if (report.verification) {
    out << "verification: " << to_string(report.verification->classification)
        << ", k = " << report.verification->k
        << (report.trace_split_matches ? " (matches target split)" : " (does not match target split)") << "\n";
  } else {
    out << "verification: no candidate below residual goal " << shortest(config.residual_goal) << "\n";
  }
  if (require_solution && !report.trace_split_matches) {
    throw SemanticFailure("no solution with the requested trace split was found");
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Construct, verify, and search for semi-SIC POVMs"};
  app.require_subcommand(1);

  std::string b_text, in_path, out_path;
  bool json = false;

  auto* construct_cmd = app.add_subcommand("construct", "Canonical qubit semi-SIC POVM for a given b");
  construct_cmd->add_option("--b", b_text, "overlap b in (1/16, 1/12]; decimal or fraction")->required();
  construct_cmd->add_option("--out", out_path, "output JSON path ('-' for stdout)");

  auto* verify_cmd = app.add_subcommand("verify", "Check the semi-SIC conditions on a POVM document");
  verify_cmd->add_option("--in", in_path, "POVM document")->required();
  verify_cmd->add_flag("--json", json, "print the report as JSON");

  auto* dual_cmd = app.add_subcommand("dual", "Dual basis of a semi-SIC POVM document");
  dual_cmd->add_option("--in", in_path, "POVM document")->required();
  dual_cmd->add_option("--out", out_path, "output JSON path ('-' for stdout)");

  int resolution = 50;
  auto* region_cmd = app.add_subcommand("region", "Feasibility grid over the probability simplex (qubit)");
  region_cmd->add_option("--in", in_path, "POVM document")->required();
  region_cmd->add_option("--resolution", resolution, "grid divisions per axis")->check(CLI::Range(2, 2000));
  region_cmd->add_option("--out", out_path, "output CSV path ('-' for stdout)");

  std::vector<std::string> to_probs, to_bloch;
  auto* bloch_cmd = app.add_subcommand("bloch", "Bloch vector <-> outcome probabilities (qubit family)");
  bloch_cmd->add_option("--b", b_text, "overlap b in (1/16, 1/12]")->required();
  auto* probs_opt = bloch_cmd->add_option("--to-probs", to_probs, "rx ry rz")->expected(3)->allow_extra_args(false);
  auto* bloch_opt = bloch_cmd->add_option("--to-bloch", to_bloch, "q1 q2 q3 q4")->expected(4)->allow_extra_args(false);
  probs_opt->excludes(bloch_opt);

  int spectrum_d = 3;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Admissible k and overlaps b for d >= 3");
  spectrum_cmd->add_option("--d", spectrum_d, "dimension")->required();

  SearchConfig config;
  std::string search_b, policy = "lbfgs", goal, step, decay, momentum, penalty;
  bool no_project = false, require_solution = false;
  auto* search_cmd = app.add_subcommand("search", "Multi-start descent for semi-SIC POVMs");
  search_cmd->add_option("--d", config.d, "dimension")->required();
  search_cmd->add_option("--k", config.k, "number of elements with the smaller trace")->required();
  search_cmd->add_option("--b", search_b, "overlap (required for d = 2, k = 2)");
  search_cmd->add_option("--restarts", config.restarts, "number of random starts");
  search_cmd->add_option("--seed", config.seed, "master seed");
  search_cmd->add_option("--max-iterations", config.max_iterations, "iterations per restart");
  search_cmd->add_option("--policy", policy, "lbfgs | steepest | momentum");
  search_cmd->add_option("--step", step, "initial step");
  search_cmd->add_option("--decay", decay, "backtracking shrink factor in (0, 1)");
  search_cmd->add_option("--momentum", momentum, "momentum coefficient for --policy momentum");
  search_cmd->add_option("--penalty", penalty, "completeness penalty weight");
  search_cmd->add_option("--goal", goal, "residual goal");
  search_cmd->add_option("--threads", config.threads, "worker threads (0: all cores)");
  search_cmd->add_flag("--no-project", no_project, "skip the final co-isometry projection");
  search_cmd->add_flag("--require-solution", require_solution, "exit 1 unless the target split is found");
  search_cmd->add_option("--out", out_path, "report JSON path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*construct_cmd) return cmd_construct(b_text, out_path, out);
    if (*verify_cmd) return cmd_verify(in_path, json, out);
    if (*dual_cmd) return cmd_dual(in_path, out_path, out);
    if (*region_cmd) return cmd_region(in_path, resolution, out_path, out);
    if (*bloch_cmd) return cmd_bloch(b_text, to_probs, to_bloch, out);
    if (*spectrum_cmd) return cmd_spectrum(spectrum_d, out);
    if (*search_cmd) {
      if (!search_b.empty()) config.b = io::parse_number(search_b);
      if (!step.empty()) config.initial_step = io::parse_number(step);
      if (!decay.empty()) config.decay = io::parse_number(decay);
      if (!momentum.empty()) config.momentum = io::parse_number(momentum);
      if (!penalty.empty()) config.penalty_weight = io::parse_number(penalty);
      if (!goal.empty()) config.residual_goal = io::parse_number(goal);
      config.policy = parse_step_policy(policy);
      config.project = !no_project;
      return cmd_search(config, out_path, require_solution, out);
    }
  } catch (const SemanticFailure& e) {
    err << "error: " << e.what() << "\n";
    return kNegative;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace semisic::cli
