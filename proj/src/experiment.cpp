#include "cqpt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "cqpt/metrics.hpp"

#ifndef CQPT_VERSION
#define CQPT_VERSION "unknown"
#endif

namespace cqpt {
namespace {

const char* const kNames[] = {"haar_bench", "dephasing",  "depolarizing",
                              "damping",    "time_noise", "compare_mqpt"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + csv_number(v[i]);
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << bytes) || !out.flush()) {
    throw ConfigError("output", "cannot write " + path.string());
  }
}

// Runs f(0..n-1) on a small pool. Each index owns its output slot, so
// results do not depend on scheduling. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ChannelSpec trend_target(const ExperimentConfig& cfg, double value) {
  switch (cfg.experiment) {
    case ExperimentKind::dephasing:
      return ChannelSpec::dephasing(cfg.qubits, value);
    case ExperimentKind::depolarizing:
      return cfg.depolarizing_local ? ChannelSpec::depolarizing_local(cfg.qubits, value)
                                    : ChannelSpec::depolarizing(cfg.qubits, value);
    case ExperimentKind::damping:
      return ChannelSpec::amplitude_damping(cfg.qubits, value);
    default:
      throw std::invalid_argument("trend_target: not a noise-trend experiment");
  }
}

ChannelSpec haar_target(int n, const RngStream& stream) {
  RngStream rng = stream.substream(10);
  return ChannelSpec::unitary(haar_unitary(qubit_dimension(n), rng));
}

Vector plus_ket(int num_qubits) {
  const Index d = qubit_dimension(num_qubits);
  return Vector::Constant(d, Scalar(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
}

}  // namespace

std::string to_string(ExperimentKind kind) { return kNames[static_cast<int>(kind)]; }

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : all_experiments()) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> all{
      ExperimentKind::haar_bench,   ExperimentKind::dephasing,  ExperimentKind::depolarizing,
      ExperimentKind::damping,      ExperimentKind::time_noise, ExperimentKind::compare_mqpt};
  return all;
}

std::string describe(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::haar_bench:
      return "Kraus-path training on a Haar-random unitary, N = 1..qubits; cost curves";
    case ExperimentKind::dephasing:
      return "Choi-path reconstruction of dephasing over a gamma grid";
    case ExperimentKind::depolarizing:
      return "Choi-path reconstruction of depolarizing noise over a p grid";
    case ExperimentKind::damping:
      return "Choi-path reconstruction of amplitude damping over a gamma grid";
    case ExperimentKind::time_noise:
      return "<sigma_x> under homogeneous and inhomogeneous dephasing, 2 qubits";
    case ExperimentKind::compare_mqpt:
      return "resource ledger, single-outcome compilation versus full POVM fitting";
  }
  return {};
}

std::string library_version() { return CQPT_VERSION; }

std::vector<double> default_grid(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::dephasing:
    case ExperimentKind::depolarizing:
    case ExperimentKind::damping:
      return {0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
    case ExperimentKind::time_noise: {
      std::vector<double> t;
      for (int i = 0; i <= 20; ++i) t.push_back(0.5 * i);
      return t;
    }
    default:
      return {};
  }
}

std::vector<double> ExperimentConfig::effective_grid() const {
  return grid.empty() ? default_grid(experiment) : grid;
}

void ExperimentConfig::validate() const {
  trainer.validate();
  if (qubits < 1 || qubits > 5) throw ConfigError("qubits", "must lie in [1, 5]");
  if (experiment == ExperimentKind::time_noise && qubits != 2) {
    throw ConfigError("qubits", "time_noise is defined for 2 qubits");
  }
  if (train_size < 0) throw ConfigError("train_size", "must be >= 0 (0 = 6^N)");
  if (test_size < 1) throw ConfigError("test_size", "must be >= 1");
  if (!(beta > 0.0)) throw ConfigError("beta", "must be > 0");
  const bool uses_grid = experiment != ExperimentKind::haar_bench &&
                         experiment != ExperimentKind::compare_mqpt;
  if (!uses_grid && !grid.empty()) throw ConfigError("grid", "not used by " + to_string(experiment));
  for (double v : effective_grid()) {
    if (experiment == ExperimentKind::time_noise) {
      if (!(v >= 0.0)) throw ConfigError("grid", "times must be >= 0");
    } else if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError("grid", "values must lie in [0, 1]");
    }
  }
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!kv.emplace(key, trim(std::string_view(line).substr(eq + 1))).second) {
      throw ConfigError(key, "given twice");
    }
  }
  for (const auto& [key, v] : kv) {
    auto& t = cfg.trainer;
    if (key == "experiment") {
      cfg.experiment = experiment_kind_from_string(v);
    } else if (key == "qubits") {
      cfg.qubits = parse_int<int>(key, v);
    } else if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(key, v);
    } else if (key == "grid") {
      cfg.grid = parse_list(key, v);
    } else if (key == "beta") {
      cfg.beta = parse_real(key, v);
    } else if (key == "train_size") {
      cfg.train_size = parse_int<Index>(key, v);
    } else if (key == "test_size") {
      cfg.test_size = parse_int<Index>(key, v);
    } else if (key == "depolarizing") {
      if (v != "global" && v != "local") throw ConfigError(key, "expected global or local");
      cfg.depolarizing_local = v == "local";
    } else if (key == "output") {
      if (v.empty()) throw ConfigError(key, "empty path");
      cfg.output = v;
    } else if (key == "threads") {
      cfg.threads = parse_int<unsigned>(key, v);
    } else if (key == "learning_rate") {
      t.learning_rate = parse_real(key, v);
    } else if (key == "max_iters") {
      t.max_iters = parse_int<int>(key, v);
    } else if (key == "cost_tol") {
      t.cost_tol = parse_real(key, v);
    } else if (key == "retraction") {
      try {
        t.retraction = retraction_from_string(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "kraus_terms") {
      t.kraus_terms = parse_int<Index>(key, v);
    } else if (key == "gradient_mode") {
      try {
        t.gradient_mode = gradient_mode_from_string(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "init_scale") {
      t.init_scale = parse_real(key, v);
    } else if (key == "timing") {
      t.timing = parse_bool(key, v);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  const auto& t = cfg.trainer;
  std::ostringstream out;
  out << "experiment=" << to_string(cfg.experiment) << '\n'
      << "qubits=" << cfg.qubits << '\n'
      << "seed=" << cfg.seed << '\n'
      << "grid=" << join(cfg.effective_grid()) << '\n'
      << "beta=" << csv_number(cfg.beta) << '\n'
      << "train_size=" << cfg.train_size << '\n'
      << "test_size=" << cfg.test_size << '\n'
      << "depolarizing=" << (cfg.depolarizing_local ? "local" : "global") << '\n'
      << "learning_rate=" << csv_number(t.learning_rate) << '\n'
      << "max_iters=" << t.max_iters << '\n'
      << "cost_tol=" << csv_number(t.cost_tol) << '\n'
      << "retraction=" << to_string(t.retraction) << '\n'
      << "kraus_terms=" << t.kraus_terms << '\n'
      << "gradient_mode=" << to_string(t.gradient_mode) << '\n'
      << "init_scale=" << csv_number(t.init_scale) << '\n'
      << "timing=" << (t.timing ? "true" : "false") << '\n';
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  return sha256_hex(canonical_config_text(cfg));
}

std::vector<HaarRun> run_haar_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<HaarRun> runs(static_cast<std::size_t>(cfg.qubits));
  const RngStream base(cfg.seed);
  parallel_for(runs.size(), cfg.threads, [&](std::size_t i) {
    const int n = static_cast<int>(i) + 1;
    const RngStream stream = base.substream(static_cast<std::uint64_t>(n));
    const ChannelSpec target = haar_target(n, stream);
    const auto split = make_split(n, cfg.train_size, cfg.test_size, stream);
    RngStream init = stream.substream(3);
    TrainingTrace trace = train_kraus(target, split.train, cfg.trainer, init);
    const double inf = evaluate_kraus(trace.stack, target, split.test);
    runs[i] = {n, std::move(trace), inf};
  });
  return runs;
}

std::vector<TrendPoint> run_trend(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.effective_grid();
  const RngStream stream = RngStream(cfg.seed).substream(static_cast<std::uint64_t>(cfg.qubits));
  const auto split = make_split(cfg.qubits, cfg.train_size, cfg.test_size, stream);
  std::vector<TrendPoint> points(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    const ChannelSpec target = trend_target(cfg, grid[i]);
    RngStream init = stream.substream(1000 + i);
    const TrainingTrace trace = train_choi(target, split.train, cfg.trainer, init);
    const ChoiEvaluation ev = evaluate_choi(*trace.choi, target, split.test);
    points[i] = {grid[i], ev.input_infidelity, ev.output_infidelity, trace.final_cost,
                 trace.iterations};
  });
  return points;
}

std::vector<TimePoint> run_time_noise(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.effective_grid();
  const RngStream stream = RngStream(cfg.seed).substream(static_cast<std::uint64_t>(cfg.qubits));
  const auto split = make_split(cfg.qubits, cfg.train_size, cfg.test_size, stream);
  const Matrix rho = projector(plus_ket(cfg.qubits));
  // values[2 i + s]: (exact, reconstructed) for grid point i, schedule s
  std::vector<std::pair<double, double>> values(2 * grid.size());
  parallel_for(values.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t i = task / 2;
    const NoiseSchedule schedule{task % 2 ? ScheduleKind::inhomogeneous : ScheduleKind::homogeneous,
                                 cfg.beta};
    const ChannelSpec target = ChannelSpec::dephasing(cfg.qubits, gamma_at(schedule, grid[i]));
    RngStream init = stream.substream(1000 + task);
    const TrainingTrace trace = train_choi(target, split.train, cfg.trainer, init);
    values[task] = {expect_sigma_x_first(apply_channel(target, rho)),
                    expect_sigma_x_first(reconstruct_state(*trace.choi, rho))};
  });
  std::vector<TimePoint> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.push_back({grid[i], values[2 * i].first, values[2 * i].second, values[2 * i + 1].first,
                   values[2 * i + 1].second});
  }
  return out;
}

std::vector<ComparisonRun> run_compare_mqpt(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ComparisonRun> runs(2 * static_cast<std::size_t>(cfg.qubits));
  const RngStream base(cfg.seed);
  // Sequential on purpose: the two methods' wall times are compared, and a
  // shared core would skew them.
  for (std::size_t task = 0; task < runs.size(); ++task) {
    const int n = static_cast<int>(task / 2) + 1;
    const RngStream stream = base.substream(static_cast<std::uint64_t>(n));
    const ChannelSpec target = haar_target(n, stream);
    const auto split = make_split(n, cfg.train_size, cfg.test_size, stream);
    RngStream init = stream.substream(3);
    MqptResult r = task % 2 ? train_mqpt(target, split.train, cfg.trainer, init)
                            : train_cqpt_with_ledger(target, split.train, cfg.trainer, init);
    const double fid = 1.0 - evaluate_kraus(r.trace.stack, target, split.test);
    runs[task] = {std::move(r), fid};
  }
  return runs;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec || !std::filesystem::is_directory(cfg.output)) {
    throw ConfigError("output", "cannot create directory " + cfg.output.string());
  }
  ExperimentOutput out;
  auto emit = [&](const std::string& name, const std::string& bytes) {
    write_file(cfg.output / name, bytes);
    out.files.push_back(name);
  };
  const std::string n_suffix = "_N" + std::to_string(cfg.qubits) + ".csv";

  switch (cfg.experiment) {
    case ExperimentKind::haar_bench: {
      std::ostringstream summary;
      summary << "N,iterations,final_cost,converged,test_infidelity\n";
      for (const auto& run : run_haar_bench(cfg)) {
        std::ostringstream curve;
        write_trace_csv(curve, run.trace);
        emit("haar_cost_N" + std::to_string(run.num_qubits) + ".csv", curve.str());
        summary << run.num_qubits << ',' << run.trace.iterations << ','
                << csv_number(run.trace.final_cost) << ',' << (run.trace.converged ? 1 : 0) << ','
                << csv_number(run.test_infidelity) << '\n';
      }
      emit("haar_summary.csv", summary.str());
      break;
    }
    case ExperimentKind::dephasing:
    case ExperimentKind::depolarizing:
    case ExperimentKind::damping: {
      std::ostringstream csv;
      csv << "parameter,infidelity_in,infidelity_out,final_cost,iterations\n";
      for (const auto& p : run_trend(cfg)) {
        csv << csv_number(p.parameter) << ',' << csv_number(p.input_infidelity) << ','
            << csv_number(p.output_infidelity) << ',' << csv_number(p.final_cost) << ','
            << p.iterations << '\n';
      }
      emit(to_string(cfg.experiment) + n_suffix, csv.str());
      break;
    }
    case ExperimentKind::time_noise: {
      std::ostringstream csv;
      csv << "t,homogeneous_E,homogeneous_J,inhomogeneous_E,inhomogeneous_J\n";
      for (const auto& p : run_time_noise(cfg)) {
        csv << csv_number(p.t) << ',' << csv_number(p.homogeneous_true) << ','
            << csv_number(p.homogeneous_rec) << ',' << csv_number(p.inhomogeneous_true) << ','
            << csv_number(p.inhomogeneous_rec) << '\n';
      }
      emit("time_noise" + n_suffix, csv.str());
      break;
    }
    case ExperimentKind::compare_mqpt: {
      const auto runs = run_compare_mqpt(cfg);
      std::vector<ResourceLedger> ledgers;
      std::ostringstream table;
      table << "method,N,evaluations,total_evaluations,stored_entries,elapsed_ms,fidelity\n";
      for (const auto& r : runs) {
        const auto& l = r.result.ledger;
        table << l.method << ',' << l.num_qubits << ',' << l.evaluations_per_call << ','
              << l.total_evaluations << ',' << l.stored_entries << ','
              << csv_number(l.elapsed_ms) << ',' << csv_number(r.fidelity) << '\n';
        ledgers.push_back(l);
      }
      std::ostringstream ledger_csv;
      write_ledger_csv(ledger_csv, ledgers);
      emit("compare_ledger.csv", ledger_csv.str());
      emit("compare_resources.csv", table.str());
      break;
    }
  }
  out.manifest = cfg.output / "manifest.txt";
  write_manifest(cfg, out.files, out.manifest);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static const char* const hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

// Layout, one record per line:
//   cqpt-manifest 1
//   version <library version>
//   seed <seed>
//   config_sha256 <hex>
//   config <key=value>      (canonical config, repeated)
//   file <name> <hex>       (repeated)
void write_manifest(const ExperimentConfig& cfg, const std::vector<std::string>& files,
                    const std::filesystem::path& path) {
  const std::filesystem::path dir = path.parent_path();
  std::ostringstream out;
  out << "cqpt-manifest 1\n"
      << "version " << library_version() << '\n'
      << "seed " << cfg.seed << '\n'
      << "config_sha256 " << config_hash(cfg) << '\n';
  std::istringstream canon(canonical_config_text(cfg));
  for (std::string line; std::getline(canon, line);) out << "config " << line << '\n';
  for (const auto& f : files) out << "file " << f << ' ' << sha256_file(dir / f) << '\n';
  write_file(path, out.str());
}

VerifyReport verify_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw ConfigError("manifest", "cannot read " + manifest.string());
  VerifyReport report;
  std::string line, header, recorded_hash, canon;
  std::vector<std::pair<std::string, std::string>> files;
  std::getline(in, header);
  if (header != "cqpt-manifest 1") throw ConfigError("manifest", "not a cqpt manifest");
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    const std::string tag = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (tag == "config_sha256") {
      recorded_hash = rest;
    } else if (tag == "config") {
      canon += rest + '\n';
    } else if (tag == "file") {
      const auto split = rest.rfind(' ');
      if (split == std::string::npos) throw ConfigError("manifest", "bad file line: " + line);
      files.emplace_back(rest.substr(0, split), rest.substr(split + 1));
    } else if (tag != "version" && tag != "seed") {
      throw ConfigError("manifest", "unknown record '" + tag + "'");
    }
  }
  if (recorded_hash.empty() || canon.empty()) {
    throw ConfigError("manifest", "missing config records");
  }
  if (sha256_hex(canon) != recorded_hash) report.problems.push_back("config hash mismatch");
  const std::filesystem::path dir = manifest.parent_path();
  for (const auto& [name, digest] : files) {
    try {
      if (sha256_file(dir / name) != digest) report.problems.push_back(name + ": hash mismatch");
    } catch (const std::runtime_error&) {
      report.problems.push_back(name + ": missing");
    }
  }
  report.ok = report.problems.empty();
  return report;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length samples of size >= 2");
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mean = 0.5 * static_cast<double>(x.size() - 1);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

}  // namespace cqpt
