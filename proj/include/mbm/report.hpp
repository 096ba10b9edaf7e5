#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace mbm {

// One verification row. pass <=> |predicted - estimated| <= tolerance for kind "near",
// estimated <= predicted + tolerance for "at-most", estimated < predicted for "below".
struct Check {
  std::string name;
  double predicted = 0.0;
  double estimated = 0.0;
  double tolerance = 0.0;
  std::string kind = "near";
  bool pass = false;
};

Check near(std::string name, double predicted, double estimated, double tolerance);
Check at_most(std::string name, double bound, double estimated, double tolerance = 0.0);
Check below(std::string name, double bound, double estimated);
Check within(std::string name, double lo, double hi, double estimated);
bool evaluate(const Check& c);

struct ReportRecord {
  std::string name;
  std::vector<Check> rows;
  std::uint64_t seed = 0;
  std::string config_hash;
  nlohmann::json config = nlohmann::json::object();

  bool pass() const;
};

nlohmann::json to_json(const ReportRecord& r);
ReportRecord record_from_json(const nlohmann::json& j);

// Pretty-printed with a trailing newline; stable under parse and re-dump.
std::string dump_json(const nlohmann::json& j);
std::string hash_json(const nlohmann::json& j);

// 17 significant digits, '.' decimal; nan and inf spelled out.
std::string format_real(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(const std::vector<double>& row);
  std::string str() const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

void write_text(const std::string& path, const std::string& content);

}  // namespace mbm
