#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "cqpt/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

struct RunOptions {
  std::string config;
  std::optional<int> qubits;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> experiment;
  std::optional<std::string> gamma_grid;
  std::optional<std::string> retraction;
  std::optional<std::string> output;
};

// Overrides are folded back into the key=value text so they go through the
// same parser and error reporting as the file itself.
cqpt::ExperimentConfig load_with_overrides(const RunOptions& o) {
  std::ifstream in(o.config, std::ios::binary);
  if (!in) throw cqpt::ConfigError("config", "cannot read " + o.config);
  std::stringstream ss;
  ss << in.rdbuf();
  std::map<std::string, std::string> extra;
  if (o.qubits) extra["qubits"] = std::to_string(*o.qubits);
  if (o.seed) extra["seed"] = std::to_string(*o.seed);
  if (o.experiment) extra["experiment"] = *o.experiment;
  if (o.gamma_grid) extra["grid"] = *o.gamma_grid;
  if (o.retraction) extra["retraction"] = *o.retraction;
  if (o.output) extra["output"] = *o.output;

  std::string text;
  for (std::string line; std::getline(ss, line);) {
    std::string key = line.substr(0, std::min(line.find('='), line.find('#')));
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t\r") + 1);
    if (!extra.count(key)) text += line + '\n';
  }
  for (const auto& [k, v] : extra) text += k + " = " + v + '\n';
  return cqpt::parse_experiment_config(text);
}

int run(const RunOptions& o) {
  const cqpt::ExperimentConfig cfg = load_with_overrides(o);
  const auto out = cqpt::run_experiment(cfg);
  for (const auto& f : out.files) std::cout << (cfg.output / f).string() << '\n';
  std::cout << out.manifest.string() << '\n';
  return kOk;
}

int verify(const std::string& manifest) {
  const auto report = cqpt::verify_manifest(manifest);
  for (const auto& p : report.problems) std::cerr << "verify: " << p << '\n';
  std::cout << (report.ok ? "OK" : "MISMATCH") << ' ' << manifest << '\n';
  return report.ok ? kOk : kNumericalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compilation-based quantum process tomography experiments"};
  app.require_subcommand(1);

  RunOptions opts;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a key=value config");
  run_cmd->add_option("config", opts.config, "config file")->required();
  run_cmd->add_option("--qubits", opts.qubits, "override qubits");
  run_cmd->add_option("--seed", opts.seed, "override seed");
  run_cmd->add_option("--experiment", opts.experiment, "override experiment");
  run_cmd->add_option("--gamma-grid", opts.gamma_grid, "override grid, comma separated");
  run_cmd->add_option("--retraction", opts.retraction, "qr, polar, cayley or exponential");
  run_cmd->add_option("--output", opts.output, "override output directory");

  auto* list_cmd = app.add_subcommand("list-experiments", "print the available experiments");

  std::string manifest;
  auto* verify_cmd = app.add_subcommand("verify", "recheck a run's manifest");
  verify_cmd->add_option("manifest", manifest, "manifest.txt")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return run(opts);
    if (*list_cmd) {
      for (auto k : cqpt::all_experiments()) {
        std::cout << cqpt::to_string(k) << "\t" << cqpt::describe(k) << '\n';
      }
      return kOk;
    }
    if (*verify_cmd) return verify(manifest);
  } catch (const cqpt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const cqpt::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kConfigError;
}
