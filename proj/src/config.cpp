#include "femto/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <type_traits>

#include <json.hpp>

namespace femto {

namespace {

using json = nlohmann::json;

constexpr std::pair<Scenario, const char*> kScenarioNames[] = {
    {Scenario::MulticastCase1, "multicast-case1"},
    {Scenario::MulticastCase2, "multicast-case2"},
    {Scenario::MulticastCase3, "multicast-case3"},
    {Scenario::StreamSingle, "stream-single"},
    {Scenario::StreamNoninterfering, "stream-noninterfering"},
    {Scenario::StreamInterfering, "stream-interfering"},
};

const std::set<std::string> kMulticastSweeps = {"levels", "mbs_bandwidth_hz", "num_users"};
const std::set<std::string> kStreamSweeps = {"num_channels", "eta", "sensing_error",
                                             "common_bandwidth", "budget"};

// Reads the members of one JSON object, rejecting any key not consumed.
class Fields {
public:
  Fields(const json& object, std::string where) : object_(object), where_(std::move(where)) {
    if (!object_.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = object_.find(key);
    if (it == object_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const json* v = find(key)) out = as<T>(*v, key);
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (const json* v = find(key)) out = as<T>(*v, key);
  }

  void finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key \"" + it.key() + "\"");
  }

  template <typename T>
  T as(const json& v, const std::string& key) const {
    const std::string name = where_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(name + " must be true or false");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(name + " must be a number");
      return v.get<T>();
    } else {
      if (!v.is_string()) throw ConfigError(name + " must be a string");
      return v.get<std::string>();
    }
  }

private:
  const json& object_;
  std::string where_;
  std::set<std::string> seen_;
};

MulticastParams parse_multicast(const json& j) {
  MulticastParams p;
  Fields f(j, "multicast");
  f.read("num_users", p.num_users);
  f.read("num_fbs", p.num_fbs);
  f.read("levels", p.levels);
  f.read("total_bandwidth_hz", p.total_bandwidth_hz);
  f.read("mbs_bandwidth_hz", p.mbs_bandwidth_hz);
  f.read("target_rate_bps", p.target_rate_bps);
  f.read("noise_w", p.noise_w);
  f.read("mbs_gain_mean", p.mbs_gain_mean);
  f.read("fbs_gain_mean", p.fbs_gain_mean);
  f.read("coverage_probability", p.coverage_probability);
  f.read("oracle_max_users", p.oracle_max_users);
  f.read("radius_per_watt", p.radius_per_watt);
  f.finish();
  return p;
}

SolverParams parse_solver(const json& j) {
  SolverParams s;
  Fields f(j, "stream.solver");
  f.read("step", s.step);
  f.read("threshold", s.threshold);
  f.read("max_iters", s.max_iters);
  f.read("initial_lambda", s.initial_lambda);
  f.read("warm_start", s.warm_start);
  f.read("greedy_max_iters", s.greedy_max_iters);
  f.finish();
  return s;
}

StreamParams parse_stream(const json& j) {
  StreamParams p;
  p.videos = default_videos();
  Fields f(j, "stream");
  f.read("num_channels", p.num_channels);
  f.read("p01", p.p01);
  f.read("p10", p.p10);
  f.read("eta", p.eta);
  f.read("gamma", p.gamma);
  f.read("epsilon", p.epsilon);
  f.read("delta", p.delta);
  f.read("window_slots", p.window_slots);
  f.read("windows", p.windows);
  f.read("mbs_kbps", p.mbs_kbps);
  f.read("channel_kbps", p.channel_kbps);
  f.read("num_fbs", p.num_fbs);
  f.read("users_per_fbs", p.users_per_fbs);
  f.read("fbs_antennas", p.fbs_antennas);
  f.read("decode_threshold", p.decode_threshold);
  f.read("loss_min", p.loss_min);
  f.read("loss_max", p.loss_max);
  f.read("trace_slots", p.trace_slots);
  if (const json* edges = f.find("edges")) {
    if (!edges->is_array()) throw ConfigError("stream.edges must be an array of [u, v] pairs");
    for (const auto& e : *edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ConfigError("stream.edges entries must be [u, v] integer pairs");
      p.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  if (const json* videos = f.find("videos")) {
    if (!videos->is_array()) throw ConfigError("stream.videos must be an array");
    p.videos.clear();
    for (const auto& v : *videos) {
      VideoSequence seq;
      Fields vf(v, "stream.videos[]");
      vf.read("name", seq.name);
      vf.read("alpha_db", seq.alpha_db);
      vf.read("beta_db_per_kbps", seq.beta_db_per_kbps);
      vf.finish();
      p.videos.push_back(seq);
    }
  }
  if (const json* solver = f.find("solver")) p.solver = parse_solver(*solver);
  f.finish();
  return p;
}

SweepValue parse_sweep_value(const json& v, const std::string& variable) {
  if (variable == "sensing_error") {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError("sensing_error sweep values must be [epsilon, delta] pairs");
    return std::pair<double, double>{v[0].get<double>(), v[1].get<double>()};
  }
  if (!v.is_number()) throw ConfigError("sweep values for " + variable + " must be numbers");
  return v.get<double>();
}

int as_count(const SweepValue& value, const std::string& variable) {
  const double* x = std::get_if<double>(&value);
  if (!x || *x != std::floor(*x) || std::abs(*x) > 1e9)
    throw ConfigError("sweep values for " + variable + " must be integers");
  return static_cast<int>(*x);
}

double as_number(const SweepValue& value, const std::string& variable) {
  const double* x = std::get_if<double>(&value);
  if (!x) throw ConfigError("sweep values for " + variable + " must be numbers");
  return *x;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool probability(double x) { return x >= 0.0 && x <= 1.0; }

void validate_multicast(const MulticastParams& p, Scenario scenario) {
  require(p.num_users >= 1 && p.num_users <= 64, "multicast.num_users must lie in [1, 64]");
  require(p.levels >= 1 && p.levels <= 32, "multicast.levels must lie in [1, 32]");
  require(std::isfinite(p.total_bandwidth_hz) && p.total_bandwidth_hz > 0.0,
          "multicast.total_bandwidth_hz must be positive");
  if (scenario != Scenario::MulticastCase1) {
    require(p.mbs_bandwidth_hz > 0.0 && p.mbs_bandwidth_hz < p.total_bandwidth_hz,
            "multicast.mbs_bandwidth_hz must lie strictly between 0 and the total bandwidth");
  }
  if (scenario == Scenario::MulticastCase3)
    require(p.num_fbs >= 1 && p.num_fbs <= 16, "multicast.num_fbs must lie in [1, 16]");
  require(std::isfinite(p.target_rate_bps) && p.target_rate_bps >= 0.0,
          "multicast.target_rate_bps must be non-negative");
  require(std::isfinite(p.noise_w) && p.noise_w > 0.0, "multicast.noise_w must be positive");
  require(std::isfinite(p.mbs_gain_mean) && p.mbs_gain_mean > 0.0 && std::isfinite(p.fbs_gain_mean) &&
              p.fbs_gain_mean > 0.0,
          "multicast gain means must be positive");
  require(probability(p.coverage_probability), "multicast.coverage_probability must lie in [0, 1]");
  require(p.oracle_max_users >= 0 && p.oracle_max_users <= 20,
          "multicast.oracle_max_users must lie in [0, 20]");
  if (p.radius_per_watt)
    require(std::isfinite(*p.radius_per_watt) && *p.radius_per_watt > 0.0,
            "multicast.radius_per_watt must be positive");
}

void validate_stream(const StreamParams& p, Scenario scenario) {
  require(p.num_channels >= 1 && p.num_channels <= 64, "stream.num_channels must lie in [1, 64]");
  require(probability(p.p01) && probability(p.p10), "stream.p01 and stream.p10 must lie in [0, 1]");
  if (p.eta) require(*p.eta >= 0.0 && *p.eta < 1.0, "stream.eta must lie in [0, 1)");
  require(probability(p.gamma), "stream.gamma must lie in [0, 1]");
  require(p.epsilon >= 0.0 && p.epsilon < 1.0 && p.delta >= 0.0 && p.delta < 1.0 &&
              p.epsilon + p.delta < 1.0,
          "stream.epsilon and stream.delta must lie in [0, 1) with epsilon + delta < 1");
  require(p.window_slots >= 1 && p.window_slots <= 1000, "stream.window_slots must lie in [1, 1000]");
  require(p.windows >= 1 && p.windows <= 100000, "stream.windows must lie in [1, 100000]");
  require(std::isfinite(p.mbs_kbps) && p.mbs_kbps > 0.0 && std::isfinite(p.channel_kbps) &&
              p.channel_kbps > 0.0,
          "stream.mbs_kbps and stream.channel_kbps must be positive");
  require(p.num_fbs >= 1 && p.num_fbs <= 8, "stream.num_fbs must lie in [1, 8]");
  require(p.users_per_fbs >= 1 && p.users_per_fbs <= 16, "stream.users_per_fbs must lie in [1, 16]");
  if (scenario == Scenario::StreamSingle) require(p.num_fbs == 1, "stream-single needs num_fbs = 1");
  if (scenario != Scenario::StreamInterfering)
    require(p.edges.empty(), "only stream-interfering accepts interference edges");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : p.edges) {
    require(u >= 1 && v >= 1 && u <= p.num_fbs && v <= p.num_fbs, "stream.edges names an unknown FBS");
    require(u != v, "stream.edges cannot contain self loops");
    require(seen.insert({std::min(u, v), std::max(u, v)}).second, "stream.edges lists an edge twice");
  }
  if (p.fbs_antennas)
    require(*p.fbs_antennas >= 0 && *p.fbs_antennas <= p.num_channels,
            "stream.fbs_antennas must lie in [0, num_channels]");
  require(std::isfinite(p.decode_threshold) && p.decode_threshold > 0.0,
          "stream.decode_threshold must be positive");
  require(p.loss_min > 0.0 && p.loss_min <= p.loss_max && p.loss_max < 1.0,
          "stream loss range must satisfy 0 < loss_min <= loss_max < 1");
  require(!p.videos.empty(), "stream.videos must not be empty");
  for (const auto& v : p.videos)
    require(std::isfinite(v.alpha_db) && v.alpha_db > 0.0 && std::isfinite(v.beta_db_per_kbps) &&
                v.beta_db_per_kbps >= 0.0,
            "every video needs alpha_db > 0 and beta_db_per_kbps >= 0");
  const auto& s = p.solver;
  require(std::isfinite(s.step) && s.step > 0.0, "stream.solver.step must be positive");
  require(s.threshold >= 0.0, "stream.solver.threshold must be non-negative");
  require(s.max_iters >= 1 && s.max_iters <= 10000000, "stream.solver.max_iters must lie in [1, 1e7]");
  require(std::isfinite(s.initial_lambda) && s.initial_lambda >= 0.0,
          "stream.solver.initial_lambda must be non-negative");
  require(s.greedy_max_iters >= 1, "stream.solver.greedy_max_iters must be at least one");
  require(p.trace_slots >= 0, "stream.trace_slots must be non-negative");
}

}  // namespace

const char* to_string(Scenario scenario) {
  for (const auto& [s, name] : kScenarioNames)
    if (s == scenario) return name;
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  for (const auto& [s, n] : kScenarioNames)
    if (name == n) return s;
  throw ConfigError("unknown scenario \"" + name + "\"");
}

bool is_multicast(Scenario scenario) {
  return scenario == Scenario::MulticastCase1 || scenario == Scenario::MulticastCase2 ||
         scenario == Scenario::MulticastCase3;
}

std::vector<std::uint64_t> SeedRange::list() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = first; s <= last; ++s) out.push_back(s);
  return out;
}

SeedRange parse_seed_range(const std::string& text) {
  auto number = [&](std::string_view part) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || end != part.data() + part.size() || part.empty())
      throw ConfigError("bad seed range \"" + text + "\"; expected a..b");
    return v;
  };
  const std::string_view view(text);
  const auto dots = view.find("..");
  SeedRange r;
  if (dots == std::string_view::npos) {
    r.first = r.last = number(view);
  } else {
    r.first = number(view.substr(0, dots));
    r.last = number(view.substr(dots + 2));
  }
  if (r.last < r.first) throw ConfigError("seed range \"" + text + "\" is empty");
  if (r.last - r.first >= 100000) throw ConfigError("seed range \"" + text + "\" is too long");
  return r;
}

std::vector<VideoSequence> default_videos() {
  return {
      {"bus-synthetic", 26.0, 0.05},
      {"mobile-synthetic", 24.5, 0.06},
      {"harbour-synthetic", 27.0, 0.045},
  };
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  c.stream.videos = default_videos();
  Fields f(doc, "config");
  std::string scenario;
  f.read("scenario", scenario);
  if (scenario.empty()) throw ConfigError("config.scenario is required");
  c.scenario = parse_scenario(scenario);
  std::string seeds;
  f.read("seeds", seeds);
  if (!seeds.empty()) c.seeds = parse_seed_range(seeds);
  f.read("output", c.output);
  if (const json* m = f.find("multicast")) c.multicast = parse_multicast(*m);
  if (const json* s = f.find("stream")) c.stream = parse_stream(*s);
  if (const json* sw = f.find("sweep")) {
    Sweep sweep;
    Fields sf(*sw, "sweep");
    sf.read("variable", sweep.variable);
    const json* values = sf.find("values");
    sf.finish();
    if (!values || !values->is_array() || values->empty())
      throw ConfigError("sweep.values must be a non-empty array");
    for (const auto& v : *values) sweep.values.push_back(parse_sweep_value(v, sweep.variable));
    c.sweep = std::move(sweep);
  }
  f.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate(const ExperimentConfig& config) {
  if (is_multicast(config.scenario)) validate_multicast(config.multicast, config.scenario);
  else validate_stream(config.stream, config.scenario);
  if (config.sweep) {
    const auto& allowed = is_multicast(config.scenario) ? kMulticastSweeps : kStreamSweeps;
    if (!allowed.count(config.sweep->variable))
      throw ConfigError("sweep variable \"" + config.sweep->variable + "\" is not available for " +
                        to_string(config.scenario));
    // Every sweep point must itself be a valid configuration.
    for (const auto& v : config.sweep->values) {
      ExperimentConfig point = apply_sweep(config, config.sweep->variable, v);
      point.sweep.reset();
      validate(point);
    }
  }
}

ExperimentConfig apply_sweep(const ExperimentConfig& config, const std::string& variable,
                             const SweepValue& value) {
  ExperimentConfig c = config;
  if (variable == "levels") c.multicast.levels = as_count(value, variable);
  else if (variable == "mbs_bandwidth_hz") c.multicast.mbs_bandwidth_hz = as_number(value, variable);
  else if (variable == "num_users") c.multicast.num_users = as_count(value, variable);
  else if (variable == "num_channels") c.stream.num_channels = as_count(value, variable);
  else if (variable == "eta") c.stream.eta = as_number(value, variable);
  else if (variable == "common_bandwidth") c.stream.mbs_kbps = as_number(value, variable);
  else if (variable == "budget") c.stream.solver.max_iters = as_count(value, variable);
  else if (variable == "sensing_error") {
    const auto* pair = std::get_if<std::pair<double, double>>(&value);
    if (!pair) throw ConfigError("sensing_error sweep values must be [epsilon, delta] pairs");
    c.stream.epsilon = pair->first;
    c.stream.delta = pair->second;
  } else {
    throw ConfigError("unknown sweep variable \"" + variable + "\"");
  }
  return c;
}

std::string format_sweep_value(const SweepValue& value) {
  auto num = [](double x) {
    char buf[400];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
    return std::string(buf, end);
  };
  if (const auto* x = std::get_if<double>(&value)) return num(*x);
  const auto& p = std::get<std::pair<double, double>>(value);
  return num(p.first) + "/" + num(p.second);
}

}  // namespace femto
