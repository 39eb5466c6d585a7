#ifndef FEMTO_CONFIG_HPP
#define FEMTO_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "femto/errors.hpp"
#include "femto/video_model.hpp"

namespace femto {

enum class Scenario {
  MulticastCase1,
  MulticastCase2,
  MulticastCase3,
  StreamSingle,
  StreamNoninterfering,
  StreamInterfering,
};

const char* to_string(Scenario scenario);
Scenario parse_scenario(const std::string& name);
bool is_multicast(Scenario scenario);

struct MulticastParams {
  int num_users = 8;
  int num_fbs = 3;
  int levels = 4;
  double total_bandwidth_hz = 2e6;
  double mbs_bandwidth_hz = 1e6;  // FBSs get the rest of the total
  double target_rate_bps = 2e6;
  double noise_w = 1e-3;
  double mbs_gain_mean = 1e-2;
  double fbs_gain_mean = 1.0;
  double coverage_probability = 1.0;
  int oracle_max_users = 12;
  std::optional<double> radius_per_watt;

  double fbs_bandwidth_hz() const { return total_bandwidth_hz - mbs_bandwidth_hz; }
};

struct SolverParams {
  double step = 0.01;
  double threshold = 1e-6;
  int max_iters = 10000;
  double initial_lambda = 1.0;
  bool warm_start = true;
  int greedy_max_iters = 2000;
};

struct StreamParams {
  int num_channels = 8;
  double p01 = 0.4;
  double p10 = 0.3;
  std::optional<double> eta;
  double gamma = 0.2;
  double epsilon = 0.3;
  double delta = 0.3;
  int window_slots = 10;
  int windows = 5;
  double mbs_kbps = 300.0;
  double channel_kbps = 300.0;
  int num_fbs = 1;
  int users_per_fbs = 3;
  std::vector<std::pair<int, int>> edges;
  std::optional<int> fbs_antennas;  // defaults to num_channels
  double decode_threshold = 1.0;
  double loss_min = 0.004;
  double loss_max = 0.028;
  std::vector<VideoSequence> videos;
  SolverParams solver;
  int trace_slots = 0;

  int num_users() const { return num_fbs * users_per_fbs; }
};

/// A sweep point: a plain number, or an (epsilon, delta) pair.
using SweepValue = std::variant<double, std::pair<double, double>>;

struct Sweep {
  std::string variable;
  std::vector<SweepValue> values;
};

struct SeedRange {
  std::uint64_t first = 1;
  std::uint64_t last = 10;

  std::vector<std::uint64_t> list() const;
};

/// "a..b" (inclusive) or a single number. Throws ConfigError.
SeedRange parse_seed_range(const std::string& text);

struct ExperimentConfig {
  Scenario scenario = Scenario::MulticastCase3;
  SeedRange seeds;
  std::optional<Sweep> sweep;
  std::string output = "out";
  MulticastParams multicast;
  StreamParams stream;
};

/// Synthetic stand-ins for three CIF test sequences. Not fitted to any codec.
std::vector<VideoSequence> default_videos();

/// Parses and validates a JSON document. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Throws ConfigError when any module precondition could fail at run time.
void validate(const ExperimentConfig& config);

/// Copy of `config` with the sweep variable set to `value`.
ExperimentConfig apply_sweep(const ExperimentConfig& config, const std::string& variable,
                             const SweepValue& value);

std::string format_sweep_value(const SweepValue& value);

}  // namespace femto

#endif  // FEMTO_CONFIG_HPP
