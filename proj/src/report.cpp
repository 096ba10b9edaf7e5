#include "mbm/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mbm/errors.hpp"

namespace mbm {

using nlohmann::json;

bool evaluate(const Check& c) {
  if (std::isnan(c.estimated) || std::isnan(c.predicted)) return false;
  if (c.kind == "at-most") return c.estimated <= c.predicted + c.tolerance;
  if (c.kind == "below") return c.estimated < c.predicted;
  // rounding slack so that interval endpoints built by within() stay inside
  return std::abs(c.predicted - c.estimated) <= c.tolerance * (1.0 + 1e-12);
}

namespace {

Check make(std::string name, double predicted, double estimated, double tolerance, std::string kind) {
  Check c{std::move(name), predicted, estimated, tolerance, std::move(kind), false};
  c.pass = evaluate(c);
  return c;
}

// JSON has no nan/inf; they travel as strings.
json real_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

double real_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  return std::stod(j.get<std::string>());
}

}  // namespace

Check near(std::string name, double predicted, double estimated, double tolerance) {
  return make(std::move(name), predicted, estimated, tolerance, "near");
}

Check at_most(std::string name, double bound, double estimated, double tolerance) {
  return make(std::move(name), bound, estimated, tolerance, "at-most");
}

Check below(std::string name, double bound, double estimated) {
  return make(std::move(name), bound, estimated, 0.0, "below");
}

Check within(std::string name, double lo, double hi, double estimated) {
  return make(std::move(name), 0.5 * (lo + hi), estimated, 0.5 * (hi - lo), "near");
}

bool ReportRecord::pass() const {
  for (const auto& c : rows)
    if (!c.pass) return false;
  return !rows.empty();
}

json to_json(const ReportRecord& r) {
  json rows = json::array();
  for (const auto& c : r.rows)
    rows.push_back({{"name", c.name},
                    {"predicted", real_to_json(c.predicted)},
                    {"estimated", real_to_json(c.estimated)},
                    {"tolerance", real_to_json(c.tolerance)},
                    {"kind", c.kind},
                    {"pass", c.pass}});
  return {{"name", r.name},
          {"pass", r.pass()},
          {"rows", rows},
          {"environment", {{"seed", r.seed}, {"config_hash", r.config_hash}}},
          {"config", r.config}};
}

ReportRecord record_from_json(const json& j) {
  ReportRecord r;
  r.name = j.at("name").get<std::string>();
  r.seed = j.at("environment").at("seed").get<std::uint64_t>();
  r.config_hash = j.at("environment").at("config_hash").get<std::string>();
  r.config = j.at("config");
  for (const auto& row : j.at("rows")) {
    Check c;
    c.name = row.at("name").get<std::string>();
    c.predicted = real_from_json(row.at("predicted"));
    c.estimated = real_from_json(row.at("estimated"));
    c.tolerance = real_from_json(row.at("tolerance"));
    c.kind = row.at("kind").get<std::string>();
    c.pass = row.at("pass").get<bool>();
    r.rows.push_back(c);
  }
  return r;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string hash_json(const json& j) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw Error("CSV row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t k = 0; k < header_.size(); ++k) out += (k ? "," : "") + header_[k];
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + format_real(row[k]);
    out += "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::error_code ec;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << content;
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace mbm
