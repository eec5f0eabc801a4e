#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cqpt/mqpt.hpp"
#include "cqpt/tomography.hpp"

namespace cqpt {

enum class ExperimentKind { haar_bench, dephasing, depolarizing, damping, time_noise, compare_mqpt };

std::string to_string(ExperimentKind kind);
/// Throws ConfigError("experiment").
ExperimentKind experiment_kind_from_string(const std::string& name);
const std::vector<ExperimentKind>& all_experiments();
std::string describe(ExperimentKind kind);

std::string library_version();

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::haar_bench;
  /// System size. haar_bench and compare_mqpt sweep N = 1..qubits.
  int qubits = 1;
  std::uint64_t seed = 11;
  TrainerConfig trainer;
  /// gamma, p or t values; empty selects default_grid(experiment).
  std::vector<double> grid;
  double beta = 0.1;
  Index train_size = 0;  // 0 means 6^N
  Index test_size = 20;
  /// depolarizing only: per-qubit channels instead of the global map.
  bool depolarizing_local = false;
  std::filesystem::path output = "cqpt_out";
  unsigned threads = 0;  // 0 means hardware_concurrency

  /// Throws ConfigError naming the field.
  void validate() const;
  std::vector<double> effective_grid() const;
};

std::vector<double> default_grid(ExperimentKind kind);

/// key = value lines, '#' starts a comment. Unknown keys and malformed
/// values throw ConfigError with the key as field.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Every field that influences results, in a fixed order, numbers at 17
/// digits. output and threads are left out: moving a run or changing the
/// pool size does not change its CSVs.
std::string canonical_config_text(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

// Structured results, also used by the acceptance suite.

struct HaarRun {
  int num_qubits = 0;
  TrainingTrace trace;
  double test_infidelity = 0.0;
};
std::vector<HaarRun> run_haar_bench(const ExperimentConfig& cfg);

struct TrendPoint {
  double parameter = 0.0;
  double input_infidelity = 0.0;   // I_F(rho_in, rho_f)
  double output_infidelity = 0.0;  // I_F(rho_E, rho_J)
  double final_cost = 0.0;
  int iterations = 0;
};
/// dephasing, depolarizing or damping, one Choi training per grid value.
std::vector<TrendPoint> run_trend(const ExperimentConfig& cfg);

struct TimePoint {
  double t = 0.0;
  double homogeneous_true = 0.0;
  double homogeneous_rec = 0.0;
  double inhomogeneous_true = 0.0;
  double inhomogeneous_rec = 0.0;
};
/// <sigma_x (x) I> for |++> through dephasing with gamma(t) from both
/// schedules, exact channel versus trained Choi matrix.
std::vector<TimePoint> run_time_noise(const ExperimentConfig& cfg);

struct ComparisonRun {
  MqptResult result;
  double fidelity = 0.0;  // 1 - mean test infidelity
};
/// CQPT and MQPT on the same Haar target, probes and starting point, for
/// N = 1..qubits. Ordered (cqpt, mqpt) per N.
std::vector<ComparisonRun> run_compare_mqpt(const ExperimentConfig& cfg);

struct ExperimentOutput {
  std::vector<std::string> files;  // names relative to cfg.output
  std::filesystem::path manifest;
};

/// Runs the experiment, writes its CSVs into cfg.output and a manifest next
/// to them. Unwritable output is a ConfigError on "output".
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Manifest ------------------------------------------------------------------

std::string sha256_hex(std::string_view bytes);
/// Throws std::runtime_error if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const ExperimentConfig& cfg, const std::vector<std::string>& files,
                    const std::filesystem::path& path);

struct VerifyReport {
  bool ok = false;
  std::vector<std::string> problems;
};

/// Recomputes the config hash and every listed file's digest. Paths are
/// resolved against the manifest's directory. Malformed manifests throw
/// ConfigError("manifest").
VerifyReport verify_manifest(const std::filesystem::path& manifest);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cqpt
