#include "femto/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include "femto/cr_spectrum.hpp"
#include "femto/video_model.hpp"

namespace femto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDominanceTolerance = 1e-9;

double dbm_or_floor(double watts) { return watts > 0.0 ? to_dbm(watts) : -kInf; }

class RowSink {
public:
  RowSink(std::vector<ResultRow>& rows, std::string scenario, std::uint64_t seed, std::string sweep)
      : rows_(rows), scenario_(std::move(scenario)), seed_(seed), sweep_(std::move(sweep)) {}

  void operator()(const std::string& algorithm, const std::string& metric, double value) {
    rows_.push_back({scenario_, seed_, sweep_, algorithm, metric, value});
  }

private:
  std::vector<ResultRow>& rows_;
  std::string scenario_;
  std::uint64_t seed_;
  std::string sweep_;
};

Network build_network(const MulticastParams& p, Scenario scenario, std::vector<int> coverage) {
  switch (scenario) {
    case Scenario::MulticastCase1:
      return make_network(p.total_bandwidth_hz, {}, std::move(coverage));
    case Scenario::MulticastCase2: {
      const std::array<double, 1> fbs{p.fbs_bandwidth_hz()};
      return make_network(p.mbs_bandwidth_hz, fbs, std::move(coverage));
    }
    default: {
      const std::vector<double> fbs(static_cast<std::size_t>(p.num_fbs), p.fbs_bandwidth_hz());
      return make_network(p.mbs_bandwidth_hz, fbs, std::move(coverage));
    }
  }
}

double footprint(const MulticastProblem& problem, const PowerAllocation& allocation, double kappa) {
  double total = 0.0;
  for (int m = 0; m < problem.num_stations(); ++m) {
    const double q = allocation.cumulative(m, 0);
    if (q > 0.0)
      total += footprint_volume(q, problem.network.stations[static_cast<std::size_t>(m)].bandwidth_hz / 1e6,
                                kappa);
  }
  return total;
}

int choice_users(const MulticastProblem& problem) {
  return static_cast<int>(std::count_if(problem.network.coverage.begin(), problem.network.coverage.end(),
                                        [](int c) { return c != 0; }));
}

}  // namespace

MulticastProblem sample_multicast(const MulticastParams& params, Scenario scenario,
                                  std::uint64_t seed, std::uint64_t index) {
  if (!is_multicast(scenario)) throw ConfigError("sample_multicast needs a multicast scenario");
  const int k = params.num_users;
  RngStream topo(seed, index, StreamTag::Topology);
  LevelDemand demand{params.levels, std::vector<int>(static_cast<std::size_t>(k))};
  for (auto& l : demand.level_of_user) l = static_cast<int>(topo.index(static_cast<std::size_t>(params.levels)));

  std::vector<int> coverage(static_cast<std::size_t>(k), 0);
  if (scenario == Scenario::MulticastCase2) {
    std::fill(coverage.begin(), coverage.end(), 1);
  } else if (scenario == Scenario::MulticastCase3) {
    for (auto& c : coverage)
      if (topo.bernoulli(params.coverage_probability))
        c = 1 + static_cast<int>(topo.index(static_cast<std::size_t>(params.num_fbs)));
  }
  Network network = build_network(params, scenario, std::move(coverage));

  RngStream gain_seed(seed, index, StreamTag::Gains);
  const FadingSpec spec = coverage_fading(network, params.mbs_gain_mean, params.fbs_gain_mean,
                                          params.fbs_gain_mean, gain_seed.next());
  GainMatrix<double> gains = sample_gains(spec, network.num_stations(), k, 0);
  return make_multicast_problem(std::move(network), std::move(demand), std::move(gains),
                                params.target_rate_bps, params.noise_w);
}

MulticastProblem mbs_only(const MulticastProblem& problem, double bandwidth_hz,
                          double target_rate_bps) {
  Network network = make_network(bandwidth_hz, {}, std::vector<int>(static_cast<std::size_t>(problem.num_users()), 0));
  GainMatrix<double> gains = problem.gains.topRows(1);
  return make_multicast_problem(std::move(network), problem.demand, std::move(gains), target_rate_bps,
                                problem.noise_w);
}

SlotProblem sample_slot_problem(int num_users, int num_fbs, std::uint64_t seed, std::uint64_t index,
                                const SlotInstanceRanges& r) {
  if (num_users < 1 || num_fbs < 1) throw ConfigError("slot instance needs users and FBSs");
  RngStream rng(seed, index, StreamTag::Instance);
  SlotProblem p;
  p.num_fbs = num_fbs;
  p.fbs_of_user.resize(static_cast<std::size_t>(num_users));
  p.success_mbs.resize(num_users);
  p.success_fbs.resize(num_users);
  p.psnr_before.resize(num_users);
  p.rate_mbs.resize(num_users);
  p.rate_fbs.resize(num_users);
  for (int j = 0; j < num_users; ++j) {
    p.fbs_of_user[static_cast<std::size_t>(j)] = 1 + j % num_fbs;
    p.success_mbs(j) = rng.uniform(r.success_lo, r.success_hi);
    p.success_fbs(j) = rng.uniform(r.success_lo, r.success_hi);
    p.psnr_before(j) = rng.uniform(r.psnr_lo, r.psnr_hi);
    p.rate_mbs(j) = rng.uniform(r.rate_lo, r.rate_hi);
    p.rate_fbs(j) = rng.uniform(r.rate_lo, r.rate_hi);
  }
  p.expected_channels.resize(num_fbs);
  for (int i = 0; i < num_fbs; ++i) p.expected_channels(i) = rng.uniform(r.channels_lo, r.channels_hi);
  validate(p);
  return p;
}

// ---------------------------------------------------------------------------

std::vector<ResultRow> run_multicast(const ExperimentConfig& config,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& sweep_label) {
  validate(config);
  if (!is_multicast(config.scenario)) throw ConfigError("run_multicast needs a multicast scenario");
  const MulticastParams& p = config.multicast;
  const double kappa = p.radius_per_watt.value_or(default_radius_per_watt());
  std::vector<ResultRow> rows;

  for (std::uint64_t seed : seeds) {
    RowSink emit(rows, to_string(config.scenario), seed, sweep_label);
    const MulticastProblem problem = sample_multicast(p, config.scenario, seed);

    auto report = [&](const std::string& name, const MulticastSolution& s) {
      emit(name, "total_power_dbm", dbm_or_floor(s.allocation.total));
      emit(name, "footprint_mhz_m2", footprint(problem, s.allocation, kappa));
      emit(name, "feasible", verify_feasible(problem, s.assignment, s.allocation).feasible ? 1.0 : 0.0);
    };

    MulticastSolution proposed;
    switch (config.scenario) {
      case Scenario::MulticastCase1: proposed = solve_case1(problem); break;
      case Scenario::MulticastCase2: proposed = solve_case2(problem); break;
      default: proposed = solve_case3(problem); break;
    }
    const MulticastSolution heuristic =
        evaluate_assignment(problem, heuristic_assign(problem).station_of_user);
    report("proposed", proposed);
    report("heuristic", heuristic);
    emit("proposed", "saving_vs_heuristic_db",
         dbm_or_floor(heuristic.allocation.total) - dbm_or_floor(proposed.allocation.total));

    if (choice_users(problem) <= p.oracle_max_users) {
      const MulticastSolution oracle = brute_force_multicast(problem, p.oracle_max_users);
      report("oracle", oracle);
      emit("proposed", "optimality_gap_db",
           dbm_or_floor(proposed.allocation.total) - dbm_or_floor(oracle.allocation.total));
    }

    if (config.scenario == Scenario::MulticastCase2) {
      const MulticastProblem single = mbs_only(problem, p.total_bandwidth_hz, p.target_rate_bps);
      const MulticastSolution case1 = solve_case1(single);
      emit("case1", "total_power_dbm", dbm_or_floor(case1.allocation.total));
      emit("case1", "footprint_mhz_m2", footprint(single, case1.allocation, kappa));
      emit("proposed", "saving_vs_case1_db",
           dbm_or_floor(case1.allocation.total) - dbm_or_floor(proposed.allocation.total));
    }

    const PowerBounds b = bounds(problem, proposed.assignment);
    emit("bounds", "upper_tight_dbm", dbm_or_floor(b.upper_tight));
    emit("bounds", "upper_loose_dbm", dbm_or_floor(b.upper_loose));
    emit("bounds", "lower_tight_dbm", dbm_or_floor(b.lower_tight));
    emit("bounds", "lower_loose_dbm", dbm_or_floor(b.lower_loose));
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

struct AlgorithmRun {
  std::string name;
  StreamState state;
  double psnr_sum = 0.0;
  int windows = 0;
  double telescoping_error = 0.0;

  void close_window() {
    psnr_sum += state.psnr.mean();
    ++windows;
    telescoping_error = std::max(telescoping_error, (state.psnr - psnr_from_bits(state)).cwiseAbs().maxCoeff());
    reset_window(state);
  }
};

std::vector<PrimaryChannel> make_channels(const StreamParams& p) {
  const PrimaryChannel c = p.eta ? make_channel(p.p01, p.p10, *p.eta) : make_channel(p.p01, p.p10);
  return std::vector<PrimaryChannel>(static_cast<std::size_t>(p.num_channels), c);
}

SolverOptions solver_options(const SolverParams& s) {
  SolverOptions o;
  o.step = s.step;
  o.threshold = s.threshold;
  o.max_iters = s.max_iters;
  o.initial_lambda = s.initial_lambda;
  return o;
}

void append_trace(StreamTrace& trace, const std::string& prefix, std::int64_t slot,
                  const std::vector<TracePoint>& points) {
  std::string& out = trace.csv;
  for (const auto& tp : points)
    for (int t = 0; t < tp.lambda.size(); ++t) {
      out += prefix;
      out += std::to_string(slot) + "," + std::to_string(tp.iteration) + "," + std::to_string(t) + "," +
             format_number(tp.lambda(t)) + "," + format_number(tp.objective) + "\n";
    }
}

}  // namespace

std::vector<ResultRow> run_streaming(const ExperimentConfig& config,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& sweep_label, StreamTrace* trace) {
  validate(config);
  if (is_multicast(config.scenario)) throw ConfigError("run_streaming needs a streaming scenario");
  const StreamParams& p = config.stream;
  const int k = p.num_users();
  const int n = p.num_fbs;
  const std::string scenario = to_string(config.scenario);
  const bool interfering = config.scenario == Scenario::StreamInterfering;
  const bool single = config.scenario == Scenario::StreamSingle;
  const InterferenceGraph graph = make_interference_graph(n, p.edges);

  std::vector<VideoSequence> videos(static_cast<std::size_t>(k));
  std::vector<int> fbs_of_user(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    videos[static_cast<std::size_t>(j)] = p.videos[static_cast<std::size_t>(j) % p.videos.size()];
    fbs_of_user[static_cast<std::size_t>(j)] = 1 + j / p.users_per_fbs;
  }
  const SensingPlan plan{p.num_channels, k, n, p.fbs_antennas.value_or(p.num_channels)};
  const int slots = p.window_slots * p.windows;

  std::vector<ResultRow> rows;
  if (trace && trace->csv.empty()) trace->csv = "scenario,seed,sweep,slot,iteration,transmitter,lambda,objective\n";

  for (std::uint64_t seed : seeds) {
    RowSink emit(rows, scenario, seed, sweep_label);
    SpectrumSimulator spectrum(make_channels(p), {p.epsilon, p.delta}, p.gamma, plan, seed);
    std::array<AlgorithmRun, 3> runs{
        AlgorithmRun{"proposed", make_stream_state(videos, fbs_of_user, p.mbs_kbps, p.channel_kbps, p.window_slots)},
        AlgorithmRun{"heuristic_equal", make_stream_state(videos, fbs_of_user, p.mbs_kbps, p.channel_kbps, p.window_slots)},
        AlgorithmRun{"heuristic_diversity", make_stream_state(videos, fbs_of_user, p.mbs_kbps, p.channel_kbps, p.window_slots)}};

    std::vector<int> collisions(static_cast<std::size_t>(p.num_channels), 0);
    double expected_sum = 0.0;
    int converged = 0;
    long iterations = 0;
    double max_gap = 0.0;
    int dominance_violations = 0;
    double objective_sum = 0.0;
    double greedy_sum = 0.0;
    double bound_sum = 0.0;
    std::optional<Vector<double>> warm;
    const std::string trace_prefix = scenario + "," + std::to_string(seed) + "," + sweep_label + ",";

    for (int t = 0; t < slots; ++t) {
      const SpectrumSlot sp = spectrum.step();
      for (int m = 0; m < p.num_channels; ++m) collisions[static_cast<std::size_t>(m)] += sp.collided[static_cast<std::size_t>(m)];
      const SlotLinks links = draw_links(n + 1, k, p.decode_threshold, p.loss_min, p.loss_max, seed, t);

      Vector<double> g = Vector<double>::Constant(n, sp.decision.expected_channels);
      if (interfering) {
        std::vector<double> idle;
        for (int m : sp.decision.available) idle.push_back(sp.idle[static_cast<std::size_t>(m)]);
        SolverOptions inner = solver_options(p.solver);
        inner.max_iters = std::min(p.solver.max_iters, p.solver.greedy_max_iters);
        const SlotProblem base = make_slot_problem(runs[0].state, links.success, Vector<double>::Zero(n));
        AllocationValue value(base, inner);
        const GreedyResult greedy = greedy_alloc(base, sp.decision.available, idle, graph, value);
        g = greedy.allocation.expected_channels();
        greedy_sum += greedy.value;
        bound_sum += optbound_upper(greedy);
      }
      expected_sum += g.sum() / n;

      const SlotProblem problem = make_slot_problem(runs[0].state, links.success, g);
      SolverOptions options = solver_options(p.solver);
      if (p.solver.warm_start) options.warm_start = warm;
      std::vector<TracePoint> points;
      std::vector<TracePoint>* tp = trace && t < p.trace_slots ? &points : nullptr;
      const ScheduleSolution sol = single ? solve_single_fbs(problem, options, tp)
                                         : solve_noninterfering(problem, options, tp);
      if (tp) append_trace(*trace, trace_prefix, t, points);
      if (sol.converged) {
        ++converged;
        max_gap = std::max(max_gap, sol.duality_gap);
        warm = sol.lambda;
      }
      iterations += sol.iterations;
      objective_sum += sol.objective;
      const double slack = kDominanceTolerance * std::max(1.0, std::abs(sol.objective));
      for (const SlotSchedule& h : {heuristic_equal(problem), heuristic_diversity(problem)})
        if (objective_value(problem, h) > sol.objective + slack) ++dominance_violations;

      update_psnr(runs[0].state, sol.schedule, links.delivered, g);
      const SlotProblem eq = make_slot_problem(runs[1].state, links.success, g);
      update_psnr(runs[1].state, heuristic_equal(eq), links.delivered, g);
      const SlotProblem div = make_slot_problem(runs[2].state, links.success, g);
      update_psnr(runs[2].state, heuristic_diversity(div), links.delivered, g);

      if ((t + 1) % p.window_slots == 0)
        for (auto& r : runs) r.close_window();
    }

    for (const auto& r : runs) {
      emit(r.name, "psnr_db", r.psnr_sum / r.windows);
      emit(r.name, "telescoping_error_db", r.telescoping_error);
    }
    emit("proposed", "converged_fraction", static_cast<double>(converged) / slots);
    emit("proposed", "mean_iterations", static_cast<double>(iterations) / slots);
    emit("proposed", "max_duality_gap", max_gap);
    emit("proposed", "dominance_violations", dominance_violations);
    emit("proposed", "mean_slot_objective", objective_sum / slots);

    double worst = 0.0;
    double mean = 0.0;
    for (int c : collisions) {
      const double rate = static_cast<double>(c) / slots;
      worst = std::max(worst, rate);
      mean += rate / p.num_channels;
    }
    emit("spectrum", "collision_rate_max", worst);
    emit("spectrum", "collision_rate_mean", mean);
    emit("spectrum", "expected_channels_mean", expected_sum / slots);
    if (interfering) {
      emit("greedy", "q_value_mean", greedy_sum / slots);
      emit("greedy", "optbound_mean", bound_sum / slots);
    }
  }
  return rows;
}

std::vector<ResultRow> budget_run(const ExperimentConfig& config, int iteration_budget,
                                  const std::vector<std::uint64_t>& seeds,
                                  const std::string& sweep_label) {
  if (iteration_budget < 1) throw ConfigError("iteration budget must be at least 1");
  ExperimentConfig c = config;
  c.stream.solver.max_iters = iteration_budget;
  c.stream.solver.greedy_max_iters = std::min(c.stream.solver.greedy_max_iters, iteration_budget);
  return run_streaming(c, seeds, sweep_label);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::vector<std::uint64_t>& seeds,
                                      std::optional<int> budget, StreamTrace* trace) {
  validate(config);
  if (budget && is_multicast(config.scenario))
    throw ConfigError("--budget applies to streaming scenarios only");
  auto run_point = [&](const ExperimentConfig& c, const std::string& label) {
    if (is_multicast(c.scenario)) return run_multicast(c, seeds, label);
    if (budget) return budget_run(c, *budget, seeds, label);
    return run_streaming(c, seeds, label, trace);
  };
  if (!config.sweep) return run_point(config, "");
  std::vector<ResultRow> rows;
  for (const SweepValue& v : config.sweep->values) {
    auto part = run_point(apply_sweep(config, config.sweep->variable, v), format_sweep_value(v));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kRelTol = 1e-9;

OracleCheck check_sandwich(const std::vector<std::uint64_t>& seeds) {
  OracleCheck c{"multicast-sandwich", true, ""};
  int instances = 0;
  for (std::uint64_t seed : seeds)
    for (std::uint64_t i = 0; i < 20; ++i) {
      RngStream rng(seed, i, StreamTag::Instance);
      MulticastParams p;
      p.num_users = 1 + static_cast<int>(rng.index(8));
      p.num_fbs = 1 + static_cast<int>(rng.index(2));
      p.levels = 1 + static_cast<int>(rng.index(4));
      p.coverage_probability = 0.8;
      const Scenario s = p.num_fbs == 1 && rng.bernoulli(0.5) ? Scenario::MulticastCase2 : Scenario::MulticastCase3;
      const MulticastProblem problem = sample_multicast(p, s, seed, i);
      const MulticastSolution opt = brute_force_multicast(problem);
      const MulticastSolution mine = s == Scenario::MulticastCase2 ? solve_case2(problem) : solve_case3(problem);
      const PowerBounds b = bounds(problem, mine.assignment);
      const double q = opt.allocation.total;
      const bool ok = b.lower_tight <= q * (1 + kRelTol) && q <= b.upper_tight * (1 + kRelTol) &&
                      verify_feasible(problem, mine.assignment, mine.allocation).feasible &&
                      mine.allocation.total >= q * (1 - kRelTol);
      ++instances;
      if (!ok && c.passed) {
        c.passed = false;
        c.detail = "first failure at seed " + std::to_string(seed) + " instance " + std::to_string(i);
      }
    }
  if (c.passed) c.detail = std::to_string(instances) + " instances";
  return c;
}

OracleCheck check_case1(const std::vector<std::uint64_t>& seeds) {
  OracleCheck c{"case1-closed-form", true, ""};
  double worst = 0.0;
  for (std::uint64_t seed : seeds)
    for (std::uint64_t i = 0; i < 20; ++i) {
      MulticastParams p;
      p.num_users = 8;
      p.levels = 4;
      const MulticastProblem problem = sample_multicast(p, Scenario::MulticastCase1, seed, i);
      const MulticastSolution s = solve_case1(problem);
      const double recursion = total_power(problem, s.assignment).total;
      const double folded = folded_sum_power(problem, s.assignment).sum();
      worst = std::max({worst, std::abs(s.allocation.total - recursion) / recursion,
                        std::abs(folded - recursion) / recursion});
    }
  c.passed = worst <= kRelTol;
  c.detail = "max relative error " + format_number(worst);
  return c;
}

OracleCheck check_fusion() {
  OracleCheck c{"fusion-batch", true, ""};
  const std::vector<SensorProfile> profiles(6, SensorProfile{0.3, 0.3});
  double worst = 0.0;
  for (double eta : {0.1, 4.0 / 7.0, 0.9})
    for (int mask = 0; mask < 64; ++mask) {
      std::vector<int> obs(6);
      for (int b = 0; b < 6; ++b) obs[static_cast<std::size_t>(b)] = (mask >> b) & 1;
      worst = std::max(worst, std::abs(fuse_beliefs(eta, obs, profiles) - fuse_beliefs_batch(eta, obs, profiles)));
    }
  c.passed = worst <= 1e-12;
  c.detail = "max abs difference " + format_number(worst);
  return c;
}

OracleCheck check_dual(const std::vector<std::uint64_t>& seeds) {
  OracleCheck c{"dual-vs-enumeration", true, ""};
  double worst = 0.0;
  int unconverged = 0;
  for (std::uint64_t seed : seeds)
    for (std::uint64_t i = 0; i < 10; ++i) {
      const int k = 1 + static_cast<int>(i % 3);
      const SlotProblem problem = sample_slot_problem(k, 1, seed, i);
      const ScheduleSolution sol = solve_single_fbs(problem);
      const ScheduleSolution ref = exhaustive_schedule(problem);
      if (!sol.converged) ++unconverged;
      worst = std::max(worst, std::abs(sol.objective - ref.objective) / std::abs(ref.objective));
    }
  c.passed = worst <= 1e-4 && unconverged == 0;
  c.detail = "max relative error " + format_number(worst) + ", unconverged " + std::to_string(unconverged);
  return c;
}

OracleCheck check_greedy(const std::vector<std::uint64_t>& seeds) {
  OracleCheck c{"greedy-bound", true, ""};
  int violations = 0;
  int instances = 0;
  for (std::uint64_t seed : seeds)
    for (std::uint64_t i = 0; i < 4; ++i) {
      RngStream rng(seed, i, StreamTag::Topology);
      const int n = 1 + static_cast<int>(rng.index(3));
      const int m = 1 + static_cast<int>(rng.index(3));
      std::vector<std::pair<int, int>> edges;
      for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
          if (rng.bernoulli(0.5)) edges.emplace_back(a, b);
      const InterferenceGraph graph = make_interference_graph(n, edges);
      SlotProblem problem = sample_slot_problem(2 * n, n, seed, i);
      std::vector<int> channels(static_cast<std::size_t>(m));
      std::vector<double> idle(static_cast<std::size_t>(m));
      for (int ch = 0; ch < m; ++ch) {
        channels[static_cast<std::size_t>(ch)] = ch;
        idle[static_cast<std::size_t>(ch)] = rng.uniform(0.2, 1.0);
      }
      AllocationValue value(problem, {});
      const GreedyResult greedy = greedy_alloc(problem, channels, idle, graph, value);
      const BruteForceAllocation best = brute_force_alloc(problem, channels, idle, graph, value);
      const double slack = 1e-9 * std::max(1.0, std::abs(best.value));
      if (greedy.value < best.value / (1 + graph.max_degree()) - slack) ++violations;
      if (best.value > optbound_upper(greedy) + slack) ++violations;
      ++instances;
    }
  c.passed = violations == 0;
  c.detail = std::to_string(violations) + " violations in " + std::to_string(instances) + " instances";
  return c;
}

}  // namespace

std::vector<OracleCheck> run_oracle_checks(const std::vector<std::uint64_t>& seeds) {
  return {check_sandwich(seeds), check_case1(seeds), check_fusion(), check_dual(seeds), check_greedy(seeds)};
}

}  // namespace femto
