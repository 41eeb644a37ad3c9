#include "semisic/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace semisic::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::kParseError, what); }

double entry_number(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + ": expected a number");
  return j.get<double>();
}

Json trace_to_json(const std::vector<TracePoint>& trace) {
  Json out = Json::array();
  for (const auto& p : trace) out.push_back({p.iteration, p.residual});
  return out;
}

}  // namespace

double parse_number(const std::string& text) {
  static const std::regex fraction(R"(^-?\d+/\d+$)");
  if (std::regex_match(text, fraction)) {
    const auto slash = text.find('/');
    const double num = std::stod(text.substr(0, slash));
    const double den = std::stod(text.substr(slash + 1));
    if (den == 0) parse_error("zero denominator in '" + text + "'");
    return num / den;
  }
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    parse_error("not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) parse_error("not a number: '" + text + "'");
  return value;
}

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json operator_to_json(const Operator& op) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < op.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < op.cols(); ++j) row.push_back({op(i, j).real(), op(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Operator operator_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    parse_error(where + ": expected " + std::to_string(dim) + " rows");
  }
  Operator op(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      parse_error(where + ", row " + std::to_string(r) + ": expected " + std::to_string(dim) + " entries");
    }
    for (int c = 0; c < dim; ++c) {
      const std::string at = where + ", entry (" + std::to_string(r) + "," + std::to_string(c) + ")";
      const auto& pair = row[c];
      if (!pair.is_array() || pair.size() != 2) parse_error(at + ": expected [re, im]");
      op(r, c) = Complex(entry_number(pair[0], at), entry_number(pair[1], at));
    }
  }
  return op;
}

Json to_json(const PovmDocument& doc) {
  Json j;
  j["dim"] = doc.povm.dim;
  if (doc.b) j["b"] = *doc.b;
  if (doc.k) j["k"] = *doc.k;
  Json elements = Json::array();
  for (const auto& e : doc.povm.elements) elements.push_back(operator_to_json(e));
  j["elements"] = std::move(elements);
  j["metadata"] = doc.metadata;
  return j;
}

PovmDocument povm_document_from_json(const Json& j) {
  if (!j.is_object()) parse_error("POVM document must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) parse_error("missing integer field 'dim'");
  PovmDocument doc;
  doc.povm.dim = j["dim"].get<int>();
  if (doc.povm.dim < 1 || doc.povm.dim > 64) parse_error("'dim' out of range");
  if (j.contains("b") && !j["b"].is_null()) doc.b = entry_number(j["b"], "field 'b'");
  if (j.contains("k") && !j["k"].is_null()) {
    if (!j["k"].is_number_integer()) parse_error("field 'k' must be an integer");
    doc.k = j["k"].get<int>();
  }
  if (!j.contains("elements") || !j["elements"].is_array()) parse_error("missing array field 'elements'");
  int index = 0;
  for (const auto& e : j["elements"]) {
    doc.povm.elements.push_back(operator_from_json(e, doc.povm.dim, "element " + std::to_string(index++)));
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) parse_error("'metadata' must be an object");
    for (const auto& [key, value] : j["metadata"].items()) {
      doc.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  return doc;
}

Json to_json(const VerificationReport& r) {
  Json classes = Json::array();
  for (const auto& c : r.trace_classes) classes.push_back({{"trace", c.value}, {"count", c.count}});
  return {
      {"dim", r.dim},
      {"classification", to_string(r.classification)},
      {"complete", r.complete},
      {"is_ic", r.is_ic},
      {"all_rank_one", r.all_rank_one},
      {"equiangular", r.equiangular},
      {"fitted_b", r.fitted_b},
      {"k", r.k},
      {"trace_classes", std::move(classes)},
      {"max_violation", r.max_violation},
      {"overlap_deviation", r.overlap_deviation},
      {"completeness_error", r.completeness_error},
      {"trace_equation_residual", r.trace_equation_residual},
      {"gram_rank", r.gram_rank},
  };
}

Json to_json(const DualFrame& frame) {
  Json duals = Json::array();
  for (const auto& f : frame.duals) duals.push_back(operator_to_json(f));
  auto coeffs = [](const DualCoefficients& c) {
    return Json{{"alpha", c.alpha}, {"beta", c.beta}, {"gamma", c.gamma}};
  };
  return {
      {"dim", frame.dim},
      {"k", frame.source_k},
      {"permutation", frame.permutation},
      {"minus_block", coeffs(frame.minus_block)},
      {"plus_block", coeffs(frame.plus_block)},
      {"duals", std::move(duals)},
  };
}

Json to_json(const SearchReport& r) {
  const auto& c = r.config;
  Json config = {
      {"d", c.d},
      {"k", c.k},
      {"b", c.b ? Json(*c.b) : Json(nullptr)},
      {"max_iterations", c.max_iterations},
      {"restarts", c.restarts},
      {"seed", c.seed},
      {"initial_step", c.initial_step},
      {"step_policy", to_string(c.policy)},
      {"decay", c.decay},
      {"momentum", c.momentum},
      {"penalty_weight", c.penalty_weight},
      {"residual_goal", c.residual_goal},
      {"stop_residual", c.stop_residual},
      {"project", c.project},
  };
  Json restarts = Json::array();
  for (const auto& s : r.restarts) {
    restarts.push_back({{"index", s.index},
                        {"seed", s.seed},
                        {"iterations", s.iterations},
                        {"residual", s.residual},
                        {"trace", trace_to_json(s.trace)}});
  }
  Json j = {
      {"config", std::move(config)},
      {"b", r.b},
      {"best_residual", r.best_residual},
      {"best_restart", r.best_restart},
      {"restarts_run", r.restarts_run},
      {"iterations_per_restart", r.iterations_per_restart()},
      {"objective_trace", trace_to_json(r.objective_trace)},
      {"gradient_check", r.gradient_check},
      {"restarts", std::move(restarts)},
      {"trace_split_matches", r.trace_split_matches},
  };
  j["verification"] = r.verification ? to_json(*r.verification) : Json(nullptr);
  if (r.best_povm) {
    PovmDocument doc{*r.best_povm, r.b, c.k, {{"source", "search"}}};
    j["best_povm"] = to_json(doc);
  } else {
    j["best_povm"] = nullptr;
  }
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    parse_error("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) parse_error("cannot write '" + path + "'");
  out << text;
  if (!out) parse_error("write to '" + path + "' failed");
}

PovmDocument read_povm_document(const std::string& path) {
  return povm_document_from_json(read_json_file(path));
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_region_csv(std::ostream& out, const std::vector<RegionSample>& samples) {
  out << "p1,p2,p3,f,feasible\n";
  for (const auto& s : samples) {
    out << format17(s.p1) << ',' << format17(s.p2) << ',' << format17(s.p3) << ',' << format17(s.f)
        << ',' << (s.feasible ? 1 : 0) << '\n';
  }
}

}  // namespace semisic::io
