#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rockland {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::optional<double> residual;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::string detail;

  /// Numeric check: passes when residual <= tolerance.
  static CheckResult numeric(std::string name, double residual, double tolerance,
                             std::optional<std::uint64_t> seed = std::nullopt, std::string detail = "") {
    return {std::move(name), std::isfinite(residual) && residual <= tolerance, residual, tolerance, seed,
            std::move(detail)};
  }
  /// Exact (boolean) check.
  static CheckResult exact(std::string name, bool ok, std::string detail = "") {
    return {std::move(name), ok, std::nullopt, std::nullopt, std::nullopt, std::move(detail)};
  }
};

/// Schema-versioned run report; keys are emitted in insertion order.
class Report {
 public:
  using Json = nlohmann::ordered_json;
  static constexpr const char* kSchema = "1";

  Report() = default;
  explicit Report(std::string command) : command_(std::move(command)) {}

  void set_model(std::string path, std::string canonical_text) {
    model_path_ = std::move(path);
    model_text_ = std::move(canonical_text);
  }
  void set_dimension(const std::string& key, Json value) { dimensions_[key] = std::move(value); }
  void set_setting(const std::string& key, Json value) { settings_[key] = std::move(value); }
  void add_result(const std::string& key, Json value) { results_[key] = std::move(value); }
  void add_check(CheckResult c) { checks_.push_back(std::move(c)); }
  void add_checks(const std::vector<CheckResult>& cs) { checks_.insert(checks_.end(), cs.begin(), cs.end()); }
  void add_artifact(std::string path) { artifacts_.push_back(std::move(path)); }

  const std::vector<CheckResult>& checks() const { return checks_; }
  bool all_passed() const {
    for (const auto& c : checks_)
      if (!c.pass) return false;
    return true;
  }
  int exit_status() const { return all_passed() ? 0 : 1; }

  Json to_json() const {
    Json j;
    j["schema"] = kSchema;
    j["command"] = command_;
    Json model = Json::object();
    if (!model_path_.empty()) model["path"] = model_path_;
    if (!model_text_.empty()) model["text"] = model_text_;
    j["model"] = model;
    j["dimensions"] = dimensions_.is_null() ? Json::object() : dimensions_;
    j["settings"] = settings_.is_null() ? Json::object() : settings_;
    Json checks = Json::array();
    for (const auto& c : checks_) {
      Json e;
      e["name"] = c.name;
      e["status"] = c.pass ? "pass" : "fail";
      e["residual"] = number(c.residual);
      e["tolerance"] = number(c.tolerance);
      e["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
      if (!c.detail.empty()) e["detail"] = c.detail;
      checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["results"] = results_.is_null() ? Json::object() : results_;
    j["artifacts"] = artifacts_;
    j["passed"] = all_passed();
    return j;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }

 private:
  static Json number(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
  }

  std::string command_;
  std::string model_path_, model_text_;
  Json dimensions_, settings_, results_;
  std::vector<CheckResult> checks_;
  std::vector<std::string> artifacts_;
};

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  std::filesystem::path p(path);
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace rockland
