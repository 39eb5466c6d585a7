#include "femto/stream_sched.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace femto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Branch {
  double share = 0.0;
  double value = 0.0;
};

// Best share in [0, 1] of one branch at price lambda, and its Lagrangian value.
Branch best_branch(double success, double psnr, double rate, double lambda) {
  Branch b;
  if (rate > 0.0) {
    const double raw = lambda > 0.0 ? success / lambda - psnr / rate : kInf;
    b.share = std::clamp(raw, 0.0, 1.0);
  }
  b.value = success * std::log(psnr + b.share * rate) - lambda * b.share;
  return b;
}

SlotSchedule schedule_from(const std::vector<UserDecision>& decisions) {
  const int k = static_cast<int>(decisions.size());
  SlotSchedule s;
  s.on_mbs.resize(static_cast<std::size_t>(k));
  s.share_mbs = Vector<double>::Zero(k);
  s.share_fbs = Vector<double>::Zero(k);
  for (int j = 0; j < k; ++j) {
    const auto& d = decisions[static_cast<std::size_t>(j)];
    s.on_mbs[static_cast<std::size_t>(j)] = d.on_mbs ? 1 : 0;
    if (d.on_mbs) s.share_mbs(j) = d.share_mbs;
    else s.share_fbs(j) = d.share_fbs;
  }
  return s;
}

// Scales every overbooked transmitter back to a full slot.
void repair(const SlotProblem& problem, SlotSchedule& s) {
  const Vector<double> load = transmitter_load(problem, s);
  for (int j = 0; j < problem.num_users(); ++j) {
    if (load(0) > 1.0) s.share_mbs(j) /= load(0);
    const int i = problem.fbs(j);
    if (load(i) > 1.0) s.share_fbs(j) /= load(i);
  }
}

}  // namespace

void validate(const SlotProblem& problem) {
  const int k = problem.num_users();
  if (problem.num_fbs < 1) throw ConfigError("slot problem needs at least one FBS");
  const auto sized = [k](const Vector<double>& v) { return v.size() == k; };
  if (!sized(problem.success_mbs) || !sized(problem.success_fbs) || !sized(problem.psnr_before) ||
      !sized(problem.rate_mbs) || !sized(problem.rate_fbs))
    throw ConfigError("slot problem vectors must have one entry per user");
  if (problem.expected_channels.size() != problem.num_fbs)
    throw ConfigError("one expected channel count per FBS required");
  for (int j = 0; j < k; ++j) {
    const int i = problem.fbs(j);
    if (i < 1 || i > problem.num_fbs) throw ConfigError("user associated with an unknown FBS");
    for (double p : {problem.success_mbs(j), problem.success_fbs(j)})
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("success probabilities must lie in [0, 1]");
    if (!(problem.psnr_before(j) > 0.0)) throw ConfigError("entering PSNR must be positive");
    if (!(problem.rate_mbs(j) >= 0.0) || !(problem.rate_fbs(j) >= 0.0))
      throw ConfigError("rate constants must be non-negative");
  }
  if (!(problem.expected_channels.array() >= 0.0).all())
    throw ConfigError("expected channel counts must be non-negative");
}

SlotProblem make_slot_problem(const StreamState& state, const Matrix<double>& success,
                              const Vector<double>& expected_channels) {
  const int k = state.num_users();
  SlotProblem p;
  p.num_fbs = static_cast<int>(expected_channels.size());
  p.fbs_of_user = state.fbs_of_user;
  p.success_mbs.resize(k);
  p.success_fbs.resize(k);
  p.rate_mbs.resize(k);
  p.rate_fbs.resize(k);
  p.psnr_before = state.psnr;
  p.expected_channels = expected_channels;
  for (int j = 0; j < k; ++j) {
    p.success_mbs(j) = success(0, j);
    p.success_fbs(j) = success(p.fbs(j), j);
    p.rate_mbs(j) = state.rate_mbs(j);
    p.rate_fbs(j) = state.rate_fbs(j);
  }
  validate(p);
  return p;
}

double objective_value(const SlotProblem& problem, const SlotSchedule& schedule) {
  double sum = 0.0;
  for (int j = 0; j < problem.num_users(); ++j) {
    const bool mbs = schedule.on_mbs[static_cast<std::size_t>(j)] == 1;
    const double arg = mbs ? problem.psnr_before(j) + schedule.share_mbs(j) * problem.rate_mbs(j)
                           : problem.psnr_before(j) + schedule.share_fbs(j) * problem.fbs_rate(j);
    if (!(arg > 0.0)) throw ContractError("objective_value: log of a non-positive PSNR");
    sum += (mbs ? problem.success_mbs(j) : problem.success_fbs(j)) * std::log(arg);
  }
  return sum;
}

Vector<double> transmitter_load(const SlotProblem& problem, const SlotSchedule& schedule) {
  Vector<double> load = Vector<double>::Zero(problem.num_fbs + 1);
  for (int j = 0; j < problem.num_users(); ++j) {
    load(0) += schedule.share_mbs(j);
    load(problem.fbs(j)) += schedule.share_fbs(j);
  }
  return load;
}

double unconstrained_share(double success, double lambda, double psnr, double rate) {
  if (!(lambda > 0.0)) return kInf;
  if (!(rate > 0.0)) return 0.0;
  return std::max(success / lambda - psnr / rate, 0.0);
}

UserDecision user_subproblem(const SlotProblem& problem, int user, const Vector<double>& lambda) {
  const Branch mbs = best_branch(problem.success_mbs(user), problem.psnr_before(user),
                                 problem.rate_mbs(user), lambda(0));
  const Branch fbs = best_branch(problem.success_fbs(user), problem.psnr_before(user),
                                 problem.fbs_rate(user), lambda(problem.fbs(user)));
  UserDecision d;
  d.on_mbs = mbs.value >= fbs.value;
  d.share_mbs = d.on_mbs ? mbs.share : 0.0;
  d.share_fbs = d.on_mbs ? 0.0 : fbs.share;
  d.value = d.on_mbs ? mbs.value : fbs.value;
  return d;
}

Vector<double> dual_update(const Vector<double>& lambda, const Vector<double>& load, double step) {
  if (!(step > 0.0)) throw DomainError("dual_update: step size must be positive");
  return (lambda.array() - step * (1.0 - load.array())).max(0.0).matrix();
}

double dual_function(const SlotProblem& problem, const Vector<double>& lambda) {
  double sum = lambda.sum();
  for (int j = 0; j < problem.num_users(); ++j) sum += user_subproblem(problem, j, lambda).value;
  return sum;
}

double minimize_dual(const SlotProblem& problem, Vector<double> start, int rounds) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  Vector<double> lambda = std::move(start);
  double best = dual_function(problem, lambda);
  for (int r = 0; r < rounds; ++r)
    for (int t = 0; t < lambda.size(); ++t) {
      // Beyond this price every listener's share is zero and D only grows.
      double hi = lambda(t);
      for (int j = 0; j < problem.num_users(); ++j) {
        if (t == 0) hi = std::max(hi, problem.success_mbs(j) * problem.rate_mbs(j) / problem.psnr_before(j));
        else if (problem.fbs(j) == t)
          hi = std::max(hi, problem.success_fbs(j) * problem.fbs_rate(j) / problem.psnr_before(j));
      }
      auto along = [&](double x) {
        Vector<double> at = lambda;
        at(t) = x;
        return dual_function(problem, at);
      };
      double a = 0.0;
      double b = hi;
      double c = b - ratio * (b - a);
      double d = a + ratio * (b - a);
      double fc = along(c);
      double fd = along(d);
      for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - ratio * (b - a);
          fc = along(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + ratio * (b - a);
          fd = along(d);
        }
      }
      const double x = 0.5 * (a + b);
      const double fx = along(x);
      if (fx < best) {
        best = fx;
        lambda(t) = x;
      }
    }
  return best;
}

SlotSchedule water_fill(const SlotProblem& problem, const std::vector<int>& on_mbs,
                        Vector<double>* multipliers) {
  const int k = problem.num_users();
  const int n = problem.num_fbs;
  SlotSchedule s;
  s.on_mbs = on_mbs;
  s.share_mbs = Vector<double>::Zero(k);
  s.share_fbs = Vector<double>::Zero(k);
  if (multipliers) *multipliers = Vector<double>::Zero(n + 1);

  for (int t = 0; t <= n; ++t) {
    std::vector<int> listeners;
    for (int j = 0; j < k; ++j) {
      const bool mbs = on_mbs[static_cast<std::size_t>(j)] == 1;
      const double rate = mbs ? problem.rate_mbs(j) : problem.fbs_rate(j);
      if ((t == 0 ? mbs : (!mbs && problem.fbs(j) == t)) && rate > 0.0) listeners.push_back(j);
    }
    if (listeners.empty()) continue;

    auto weight = [&](int j) { return t == 0 ? problem.success_mbs(j) : problem.success_fbs(j); };
    auto offset = [&](int j) {
      return problem.psnr_before(j) / (t == 0 ? problem.rate_mbs(j) : problem.fbs_rate(j));
    };
    auto filled = [&](double level) {
      double total = 0.0;
      for (int j : listeners) total += std::clamp(weight(j) / level - offset(j), 0.0, 1.0);
      return total;
    };

    double lo = kInf;
    double hi = 0.0;
    for (int j : listeners) {
      lo = std::min(lo, weight(j) / (1.0 + offset(j)));
      hi = std::max(hi, weight(j) / offset(j));
    }
    double level = 0.0;
    if (hi > 0.0) {
      // Largest water level that still fills the slot.
      for (int it = 0; it < 200 && lo < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (filled(mid) >= 1.0) lo = mid;
        else hi = mid;
      }
      level = lo;
    }
    double total = 0.0;
    Vector<double>& shares = t == 0 ? s.share_mbs : s.share_fbs;
    for (int j : listeners) {
      shares(j) = level > 0.0 ? std::clamp(weight(j) / level - offset(j), 0.0, 1.0) : 0.0;
      total += shares(j);
    }
    if (total > 1.0)
      for (int j : listeners) shares(j) /= total;
    if (multipliers) (*multipliers)(t) = level;
  }
  return s;
}

ScheduleSolution solve_noninterfering(const SlotProblem& problem, const SolverOptions& options,
                                      std::vector<TracePoint>* trace) {
  validate(problem);
  if (!(options.step > 0.0)) throw ConfigError("step size must be positive");
  if (!(options.threshold >= 0.0)) throw ConfigError("convergence threshold must be non-negative");
  if (options.max_iters < 1) throw ConfigError("iteration budget must be at least one");

  const int k = problem.num_users();
  const int n = problem.num_fbs;
  Vector<double> lambda = Vector<double>::Constant(n + 1, options.initial_lambda);
  if (options.warm_start && options.warm_start->size() == n + 1) lambda = *options.warm_start;

  ScheduleSolution out;
  std::vector<UserDecision> decisions(static_cast<std::size_t>(k));
  double best_dual = kInf;
  double best_objective = -kInf;
  SlotSchedule best;

  auto decide = [&](const Vector<double>& at) {
    double dual = at.sum();
    for (int j = 0; j < k; ++j) {
      decisions[static_cast<std::size_t>(j)] = user_subproblem(problem, j, at);
      dual += decisions[static_cast<std::size_t>(j)].value;
    }
    best_dual = std::min(best_dual, dual);
  };

  for (int it = 0; it < options.max_iters; ++it) {
    decide(lambda);
    SlotSchedule s = schedule_from(decisions);
    const Vector<double> load = transmitter_load(problem, s);
    repair(problem, s);
    const double objective = objective_value(problem, s);
    if (objective > best_objective) {
      best_objective = objective;
      best = s;
    }
    if (trace) trace->push_back({it, lambda, objective});

    const Vector<double> next = dual_update(lambda, load, options.step);
    out.iterations = it + 1;
    const double moved = (next - lambda).squaredNorm();
    lambda = next;
    if (moved <= options.threshold) {
      out.converged = true;
      break;
    }
  }
  out.lambda = lambda;

  if (out.converged) {
    decide(lambda);
    Vector<double> level;
    out.schedule = water_fill(problem, schedule_from(decisions).on_mbs, &level);
    out.objective = objective_value(problem, out.schedule);
    best_dual = std::min(best_dual, dual_function(problem, level));
    if (options.refine_dual) best_dual = std::min(best_dual, minimize_dual(problem, level));
  } else {
    out.schedule = best;
    out.objective = best_objective;
  }
  out.dual_value = best_dual;
  out.duality_gap = std::abs(out.objective - best_dual) / std::abs(best_dual);
  return out;
}

ScheduleSolution solve_single_fbs(const SlotProblem& problem, const SolverOptions& options,
                                  std::vector<TracePoint>* trace) {
  if (problem.num_fbs != 1) throw ContractError("solve_single_fbs: problem has more than one FBS");
  return solve_noninterfering(problem, options, trace);
}

ScheduleSolution exhaustive_schedule(const SlotProblem& problem, int max_users) {
  validate(problem);
  const int k = problem.num_users();
  if (k > max_users)
    throw SizeLimitError("exhaustive_schedule: " + std::to_string(k) + " users exceed the limit of " +
                         std::to_string(max_users));
  ScheduleSolution out;
  out.objective = -kInf;
  std::vector<int> on_mbs(static_cast<std::size_t>(k));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    for (int j = 0; j < k; ++j) on_mbs[static_cast<std::size_t>(j)] = static_cast<int>((mask >> j) & 1U);
    Vector<double> level;
    SlotSchedule s = water_fill(problem, on_mbs, &level);
    const double objective = objective_value(problem, s);
    if (objective > out.objective) {
      out.objective = objective;
      out.schedule = std::move(s);
      out.lambda = level;
    }
  }
  out.dual_value = minimize_dual(problem, out.lambda);
  out.duality_gap = std::abs(out.objective - out.dual_value) / std::abs(out.dual_value);
  out.converged = true;
  return out;
}

namespace {

std::vector<int> associate(const SlotProblem& problem) {
  std::vector<int> on_mbs(static_cast<std::size_t>(problem.num_users()));
  for (int j = 0; j < problem.num_users(); ++j)
    on_mbs[static_cast<std::size_t>(j)] =
        problem.success_mbs(j) * problem.rate_mbs(j) >= problem.success_fbs(j) * problem.fbs_rate(j) ? 1 : 0;
  return on_mbs;
}

}  // namespace

SlotSchedule heuristic_equal(const SlotProblem& problem) {
  const int k = problem.num_users();
  SlotSchedule s;
  s.on_mbs = associate(problem);
  s.share_mbs = Vector<double>::Zero(k);
  s.share_fbs = Vector<double>::Zero(k);
  Vector<double> count = Vector<double>::Zero(problem.num_fbs + 1);
  for (int j = 0; j < k; ++j) count(s.on_mbs[static_cast<std::size_t>(j)] ? 0 : problem.fbs(j)) += 1.0;
  for (int j = 0; j < k; ++j) {
    if (s.on_mbs[static_cast<std::size_t>(j)]) s.share_mbs(j) = 1.0 / count(0);
    else s.share_fbs(j) = 1.0 / count(problem.fbs(j));
  }
  return s;
}

SlotSchedule heuristic_diversity(const SlotProblem& problem) {
  const int k = problem.num_users();
  SlotSchedule s;
  s.on_mbs = associate(problem);
  s.share_mbs = Vector<double>::Zero(k);
  s.share_fbs = Vector<double>::Zero(k);
  std::vector<int> pick(static_cast<std::size_t>(problem.num_fbs + 1), -1);
  std::vector<double> best(static_cast<std::size_t>(problem.num_fbs + 1), -kInf);
  for (int j = 0; j < k; ++j) {
    const bool mbs = s.on_mbs[static_cast<std::size_t>(j)] == 1;
    const int t = mbs ? 0 : problem.fbs(j);
    const double rate = mbs ? problem.success_mbs(j) * problem.rate_mbs(j)
                            : problem.success_fbs(j) * problem.fbs_rate(j);
    if (rate > best[static_cast<std::size_t>(t)]) {
      best[static_cast<std::size_t>(t)] = rate;
      pick[static_cast<std::size_t>(t)] = j;
    }
  }
  for (int t = 0; t <= problem.num_fbs; ++t) {
    const int j = pick[static_cast<std::size_t>(t)];
    if (j < 0) continue;
    if (t == 0) s.share_mbs(j) = 1.0;
    else s.share_fbs(j) = 1.0;
  }
  return s;
}

// ---------------------------------------------------------------------------

bool InterferenceGraph::adjacent(int a, int b) const {
  for (const auto& [u, v] : edges)
    if ((u == a && v == b) || (u == b && v == a)) return true;
  return false;
}

std::vector<int> InterferenceGraph::neighbors(int fbs) const {
  std::vector<int> out;
  for (const auto& [u, v] : edges) {
    if (u == fbs) out.push_back(v);
    if (v == fbs) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int InterferenceGraph::degree(int fbs) const { return static_cast<int>(neighbors(fbs).size()); }

int InterferenceGraph::max_degree() const {
  int d = 0;
  for (int i = 1; i <= num_fbs; ++i) d = std::max(d, degree(i));
  return d;
}

Eigen::MatrixXi InterferenceGraph::incidence() const {
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(num_fbs, static_cast<int>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    d(edges[e].first - 1, static_cast<int>(e)) = 1;
    d(edges[e].second - 1, static_cast<int>(e)) = 1;
  }
  return d;
}

InterferenceGraph make_interference_graph(int num_fbs, std::vector<std::pair<int, int>> edges) {
  if (num_fbs < 1) throw ConfigError("interference graph needs at least one FBS");
  InterferenceGraph g{num_fbs, {}};
  for (auto [u, v] : edges) {
    if (u < 1 || v < 1 || u > num_fbs || v > num_fbs) throw ConfigError("edge names an unknown FBS");
    if (u == v) throw ConfigError("interference graph cannot have self loops");
    if (g.adjacent(u, v)) throw ConfigError("interference graph edge listed twice");
    g.edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  return g;
}

Vector<double> ChannelAllocation::expected_channels() const {
  Vector<double> g = Vector<double>::Zero(assigned.rows());
  for (int i = 0; i < assigned.rows(); ++i)
    for (int c = 0; c < assigned.cols(); ++c)
      if (assigned(i, c)) g(i) += idle[static_cast<std::size_t>(c)];
  return g;
}

ChannelAllocation empty_allocation(int num_fbs, std::vector<int> channels, std::vector<double> idle) {
  if (channels.size() != idle.size()) throw ContractError("one availability per accessible channel");
  ChannelAllocation a;
  a.assigned = Eigen::MatrixXi::Zero(num_fbs, static_cast<int>(channels.size()));
  a.channels = std::move(channels);
  a.idle = std::move(idle);
  return a;
}

bool respects(const ChannelAllocation& allocation, const InterferenceGraph& graph) {
  for (const auto& [u, v] : graph.edges)
    for (int c = 0; c < allocation.assigned.cols(); ++c)
      if (allocation.assigned(u - 1, c) + allocation.assigned(v - 1, c) > 1) return false;
  return true;
}

AllocationValue::AllocationValue(SlotProblem problem, SolverOptions options)
    : problem_(std::move(problem)), options_(std::move(options)) {
  options_.refine_dual = false;
  problem_.expected_channels = Vector<double>::Zero(problem_.num_fbs);
  baseline_ = solve_noninterfering(problem_, options_).objective;
}

double AllocationValue::operator()(const ChannelAllocation& allocation) {
  std::vector<int> key(allocation.assigned.data(), allocation.assigned.data() + allocation.assigned.size());
  for (const auto& [k, v] : cache_)
    if (k == key) return v;
  problem_.expected_channels = allocation.expected_channels();
  const double q = solve_noninterfering(problem_, options_).objective - baseline_;
  ++evaluations_;
  cache_.emplace_back(std::move(key), q);
  return q;
}

GreedyResult greedy_alloc(const SlotProblem& problem, std::vector<int> channels,
                          std::vector<double> idle, const InterferenceGraph& graph,
                          AllocationValue& value) {
  if (graph.num_fbs != problem.num_fbs) throw ContractError("graph and problem disagree on N");
  GreedyResult out;
  out.allocation = empty_allocation(problem.num_fbs, std::move(channels), std::move(idle));
  const int cols = static_cast<int>(out.allocation.channels.size());

  Eigen::MatrixXi open = Eigen::MatrixXi::Ones(problem.num_fbs, cols);
  double current = value(out.allocation);
  while (open.any()) {
    int pick_i = -1;
    int pick_c = -1;
    double pick_q = -kInf;
    for (int i = 0; i < problem.num_fbs; ++i)
      for (int c = 0; c < cols; ++c) {
        if (!open(i, c)) continue;
        ChannelAllocation trial = out.allocation;
        trial.assigned(i, c) = 1;
        const double q = value(trial);
        if (q > pick_q) {
          pick_q = q;
          pick_i = i;
          pick_c = c;
        }
      }
    out.allocation.assigned(pick_i, pick_c) = 1;
    out.trace.push_back({pick_i + 1, pick_c, pick_q - current, graph.degree(pick_i + 1)});
    current = pick_q;
    open(pick_i, pick_c) = 0;
    for (int nb : graph.neighbors(pick_i + 1)) open(nb - 1, pick_c) = 0;
  }
  out.value = current;
  return out;
}

BruteForceAllocation brute_force_alloc(const SlotProblem& problem, std::vector<int> channels,
                                       std::vector<double> idle, const InterferenceGraph& graph,
                                       AllocationValue& value, int max_pairs) {
  const int n = problem.num_fbs;
  const int cols = static_cast<int>(channels.size());
  const int pairs = n * cols;
  if (pairs > max_pairs)
    throw SizeLimitError("brute_force_alloc: " + std::to_string(pairs) +
                         " FBS-channel pairs exceed the limit of " + std::to_string(max_pairs));

  ChannelAllocation trial = empty_allocation(n, std::move(channels), std::move(idle));
  BruteForceAllocation best{trial, -kInf};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) {
    for (int b = 0; b < pairs; ++b) trial.assigned(b / cols, b % cols) = static_cast<int>((mask >> b) & 1U);
    if (!respects(trial, graph)) continue;
    const double q = value(trial);
    if (q > best.value) best = {trial, q};
  }
  return best;
}

double optbound_upper(const GreedyResult& result) {
  double bound = result.value;
  for (const auto& step : result.trace) bound += step.degree * step.delta;
  return bound;
}

std::vector<std::vector<std::pair<int, int>>> conflict_partition(const GreedyResult& result,
                                                                 const ChannelAllocation& optimum,
                                                                 const InterferenceGraph& graph) {
  auto clash = [&](int i, int c, const GreedyStep& s) {
    return c == s.channel && (i == s.fbs || graph.adjacent(i, s.fbs));
  };
  std::vector<std::vector<std::pair<int, int>>> omega(result.trace.size());
  for (int i = 1; i <= optimum.assigned.rows(); ++i)
    for (int c = 0; c < optimum.assigned.cols(); ++c) {
      if (!optimum.assigned(i - 1, c)) continue;
      for (std::size_t l = 0; l < result.trace.size(); ++l)
        if (clash(i, c, result.trace[l])) {
          omega[l].emplace_back(i, c);
          break;
        }
    }
  return omega;
}

}  // namespace femto
