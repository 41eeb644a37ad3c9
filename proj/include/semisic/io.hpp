#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semisic/core.hpp"
#include "semisic/dual_frame.hpp"
#include "semisic/model.hpp"
#include "semisic/search.hpp"

namespace semisic::io {

using Json = nlohmann::json;

/// Decimal or simple fraction ("2/25", "-1/12").
double parse_number(const std::string& text);

/// %.17g.
std::string format17(double x);

struct PovmDocument {
  Povm povm;
  std::optional<double> b;
  std::optional<int> k;
  std::map<std::string, std::string> metadata;
};

/// Operators as nested arrays of [re, im] pairs.
Json operator_to_json(const Operator& op);
Operator operator_from_json(const Json& j, int dim, const std::string& where);

Json to_json(const PovmDocument& doc);
PovmDocument povm_document_from_json(const Json& j);

Json to_json(const VerificationReport& report);
Json to_json(const DualFrame& frame);
Json to_json(const SearchReport& report);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

PovmDocument read_povm_document(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// Header `p1,p2,p3,f,feasible`; floats at 17 significant digits.
void write_region_csv(std::ostream& out, const std::vector<RegionSample>& samples);

}  // namespace semisic::io
