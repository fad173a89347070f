#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bifbm/params.hpp"

namespace bifbm {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

enum class ExperimentKind { simulate, qv, ito, tanaka, chaos, potential };

ExperimentKind parse_kind(const std::string& s);
std::string kind_name(ExperimentKind k);

struct ConfigError : std::runtime_error {
  std::vector<std::string> violations;
  explicit ConfigError(std::vector<std::string> v);
};

/// Fully materialized experiment description; defaults are filled in at parse
/// time so the report echo is self-contained.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  std::vector<double> h;
  std::vector<double> k;
  double t = 1.0;
  std::size_t n = 512;
  std::size_t n_paths = 256;
  std::uint64_t seed = 1;
  std::vector<double> eps_schedule;
  std::size_t truncation = 30;
  std::vector<double> alpha_list;
  std::vector<double> levels;
  double theta = 0.0;
  std::string csv_prefix;  // empty: no CSV artifacts

  MultiParams multi_params() const;
  nlohmann::ordered_json echo() const;

  /// Parses and validates; collects all constraint violations into ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig from_file(const std::string& path);
};

struct MetricRecord {
  std::string name;
  double estimate;
  double standard_error;
  double target;
  double tolerance;
  bool pass;  // |estimate - target| <= tolerance + 3 SE
};

MetricRecord make_metric(std::string name, double estimate, double se, double target,
                         double tolerance);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MetricRecord> metrics;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;

  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
  void write(const std::string& path) const;
};

/// Runs one experiment; CSV artifacts land next to `out_dir` when configured.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

std::vector<std::string> list_experiments();
std::string describe_experiment(const std::string& kind);

}  // namespace bifbm
