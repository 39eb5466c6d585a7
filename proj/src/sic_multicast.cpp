#include "femto/sic_multicast.hpp"

#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

namespace femto {

namespace {

// ((1 + g)^L - 1) / g, continuous at g = 0.
double geometric_factor(double gamma, int levels) {
  if (gamma == 0.0) return static_cast<double>(levels);
  return std::expm1(static_cast<double>(levels) * std::log1p(gamma)) / gamma;
}

double worst_inverse_gain(const MulticastProblem& problem, int station,
                          std::span<const int> users) {
  double worst = 0.0;
  for (int k : users) worst = std::max(worst, 1.0 / problem.gains(station, k));
  return worst;
}

}  // namespace

std::vector<std::vector<int>> LevelDemand::users_at_level() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_levels));
  for (std::size_t k = 0; k < level_of_user.size(); ++k)
    out[static_cast<std::size_t>(level_of_user[k])].push_back(static_cast<int>(k));
  return out;
}

MulticastProblem make_multicast_problem(Network network, LevelDemand demand,
                                        GainMatrix<double> gains, double target_rate_bps,
                                        double noise_w) {
  MulticastProblem problem;
  problem.network = std::move(network);
  problem.demand = std::move(demand);
  problem.gains = std::move(gains);
  problem.noise_w = noise_w;
  problem.thresholds.resize(problem.network.num_stations());
  for (int m = 0; m < problem.network.num_stations(); ++m)
    problem.thresholds(m) = snr_threshold(
        target_rate_bps, problem.network.stations[static_cast<std::size_t>(m)].bandwidth_hz);
  validate(problem);
  return problem;
}

void validate(const MulticastProblem& problem) {
  validate(problem.network);
  const int stations = problem.num_stations();
  const int users = problem.num_users();
  if (problem.demand.num_levels < 1) throw ConfigError("need at least one level");
  if (static_cast<int>(problem.demand.level_of_user.size()) != users)
    throw ConfigError("level demand must list every user");
  for (int l : problem.demand.level_of_user)
    if (l < 0 || l >= problem.demand.num_levels) throw ConfigError("requested level out of range");
  if (problem.gains.rows() != stations || problem.gains.cols() != users)
    throw ConfigError("gain matrix must be (M+1) x K");
  if (!problem.gains.allFinite() || !(problem.gains.array() > 0.0).all())
    throw ConfigError("gains must be positive and finite");
  if (problem.thresholds.size() != stations || !(problem.thresholds.array() >= 0.0).all())
    throw ConfigError("one non-negative SNR threshold per station required");
  if (!(problem.noise_w > 0.0)) throw ConfigError("noise power must be positive");
}

std::vector<int> eligible_users(const MulticastProblem& problem, int level, int station) {
  std::vector<int> out;
  for (int k = 0; k < problem.num_users(); ++k)
    if (problem.demand.level_of_user[static_cast<std::size_t>(k)] == level &&
        problem.eligible(station, k))
      out.push_back(k);
  return out;
}

Eigen::MatrixXi LevelAssignment::indicator(int num_stations) const {
  Eigen::MatrixXi out = Eigen::MatrixXi::Zero(num_stations, static_cast<int>(station_of_user.size()));
  for (std::size_t k = 0; k < station_of_user.size(); ++k) out(station_of_user[k], static_cast<int>(k)) = 1;
  return out;
}

LevelAssignment make_assignment(const MulticastProblem& problem,
                                std::vector<int> station_of_user) {
  const int stations = problem.num_stations();
  const int levels = problem.num_levels();
  if (static_cast<int>(station_of_user.size()) != problem.num_users())
    throw ContractError("assignment must connect every user exactly once");

  LevelAssignment a;
  a.members.assign(static_cast<std::size_t>(levels),
                   std::vector<std::vector<int>>(static_cast<std::size_t>(stations)));
  for (int k = 0; k < problem.num_users(); ++k) {
    const int m = station_of_user[static_cast<std::size_t>(k)];
    if (m < 0 || m >= stations || !problem.eligible(m, k))
      throw ContractError("user " + std::to_string(k) + " cannot connect to station " +
                          std::to_string(m));
    const int l = problem.demand.level_of_user[static_cast<std::size_t>(k)];
    a.members[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)].push_back(k);
  }
  a.station_of_user = std::move(station_of_user);

  a.exponents = Eigen::MatrixXi::Zero(stations, levels);
  for (int m = 0; m < stations; ++m)
    for (int l = 1; l < levels; ++l)
      a.exponents(m, l) = a.exponents(m, l - 1) +
                          (a.members[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(m)].empty() ? 0 : 1);
  return a;
}

PowerAllocation total_power(const MulticastProblem& problem, const LevelAssignment& assignment) {
  const int stations = problem.num_stations();
  const int levels = problem.num_levels();
  if (static_cast<int>(assignment.members.size()) != levels)
    throw ContractError("assignment does not match the level count");

  PowerAllocation out;
  out.noise = problem.noise_w;
  out.cumulative = Matrix<double>::Zero(stations, levels + 1);
  out.per_level = Matrix<double>::Zero(stations, levels);
  for (int m = 0; m < stations; ++m) {
    const auto row = problem.gains.row(m);
    for (int l = levels - 1; l >= 0; --l) {
      const auto& users = assignment.members[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
      out.cumulative(m, l) = f_step(out.cumulative(m, l + 1), std::span<const int>(users), row,
                                    problem.thresholds(m), problem.noise_w);
      out.per_level(m, l) = out.cumulative(m, l) - out.cumulative(m, l + 1);
    }
  }
  out.total = out.cumulative.col(0).sum();
  return out;
}

Vector<double> folded_sum_power(const MulticastProblem& problem,
                                const LevelAssignment& assignment) {
  const int stations = problem.num_stations();
  Vector<double> q0 = Vector<double>::Zero(stations);
  for (int m = 0; m < stations; ++m) {
    const double gamma = problem.thresholds(m);
    double sum = 0.0;
    for (int l = 0; l < problem.num_levels(); ++l) {
      const auto& users = assignment.members[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
      sum += std::pow(1.0 + gamma, assignment.exponents(m, l)) *
             worst_inverse_gain(problem, m, users);
    }
    q0(m) = problem.noise_w * gamma * sum;
  }
  return q0;
}

FeasibilityReport verify_feasible(const MulticastProblem& problem,
                                  const LevelAssignment& assignment,
                                  const PowerAllocation& allocation, double tolerance) {
  FeasibilityReport report;
  const int users = problem.num_users();
  report.slack.assign(static_cast<std::size_t>(users), 0.0);
  report.worst_slack = std::numeric_limits<double>::infinity();

  const Eigen::MatrixXi ind = assignment.indicator(problem.num_stations());
  for (int k = 0; k < users; ++k)
    if (ind.col(k).sum() != 1) report.one_transceiver = false;

  for (int k = 0; k < users; ++k) {
    const int m = assignment.station_of_user[static_cast<std::size_t>(k)];
    const int l = problem.demand.level_of_user[static_cast<std::size_t>(k)];
    const double h = problem.gains(m, k);
    const double snr = h * allocation.per_level(m, l) /
                       (allocation.noise + h * allocation.cumulative(m, l + 1));
    const double gamma = problem.thresholds(m);
    const double slack = gamma > 0.0 ? (snr - gamma) / gamma : snr;
    report.slack[static_cast<std::size_t>(k)] = slack;
    report.worst_slack = std::min(report.worst_slack, slack);
  }
  if (users == 0) report.worst_slack = 0.0;
  report.feasible = report.one_transceiver && report.worst_slack >= -tolerance;
  return report;
}

PowerBounds bounds(const MulticastProblem& problem,
                   const std::optional<LevelAssignment>& assignment) {
  const int stations = problem.num_stations();
  const int levels = problem.num_levels();
  const LevelAssignment a = assignment ? *assignment : heuristic_assign(problem);
  const double n0 = problem.noise_w;

  PowerBounds b;
  double g_bar = 0.0;
  for (int m = 0; m < stations; ++m) {
    const double gamma = problem.thresholds(m);
    double g_m = 0.0;
    for (int l = 0; l < levels; ++l)
      g_m = std::max(g_m, gamma * worst_inverse_gain(problem, m,
                                                     a.members[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)]));
    b.upper_tight += n0 * g_m * geometric_factor(gamma, levels);
    g_bar = std::max(g_bar, g_m);
  }
  const double gamma_max = problem.thresholds.maxCoeff();
  b.upper_loose = n0 * g_bar * stations * geometric_factor(gamma_max, levels);

  // Per-level floor: the worst user of the level pays at least its cheapest
  // station's Gamma / H. Each (station, exponent) pair can be the serving
  // pair of at most one level, so at most `active` levels share an exponent.
  std::vector<bool> station_used(static_cast<std::size_t>(stations), false);
  std::vector<double> floors;
  const auto by_level = problem.demand.users_at_level();
  for (const auto& users : by_level) {
    if (users.empty()) continue;
    double floor = 0.0;
    for (int k : users) {
      double cheapest = std::numeric_limits<double>::infinity();
      for (int m = 0; m < stations; ++m)
        if (problem.eligible(m, k)) {
          cheapest = std::min(cheapest, problem.thresholds(m) / problem.gains(m, k));
          station_used[static_cast<std::size_t>(m)] = true;
        }
      floor = std::max(floor, cheapest);
    }
    floors.push_back(floor);
  }
  if (floors.empty()) return b;

  int active = 0;
  double gamma_min = std::numeric_limits<double>::infinity();
  for (int m = 0; m < stations; ++m)
    if (station_used[static_cast<std::size_t>(m)]) {
      ++active;
      gamma_min = std::min(gamma_min, problem.thresholds(m));
    }
  std::sort(floors.begin(), floors.end(), std::greater<>());
  const double floor_min = floors.back();
  for (std::size_t i = 0; i < floors.size(); ++i) {
    const double weight = std::pow(1.0 + gamma_min, static_cast<double>(static_cast<int>(i) / active));
    b.lower_tight += n0 * floors[i] * weight;
    b.lower_loose += n0 * floor_min * weight;
  }
  return b;
}

double jensen_lower_bound(const MulticastProblem& problem, const LevelAssignment& assignment) {
  const int stations = problem.num_stations();
  const double gamma_min = problem.thresholds.minCoeff();
  double sum = 0.0;
  int nonempty_below = 0;
  for (int l = 0; l < problem.num_levels(); ++l) {
    double g_level = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int m = 0; m < stations; ++m) {
      const auto& users = assignment.members[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
      any = any || !users.empty();
      g_level = std::min(g_level, problem.thresholds(m) * worst_inverse_gain(problem, m, users));
    }
    sum += g_level * std::pow(1.0 + gamma_min, static_cast<double>(nonempty_below) / stations);
    if (any) ++nonempty_below;
  }
  return problem.noise_w * stations * sum;
}

MulticastSolution evaluate_assignment(const MulticastProblem& problem,
                                      std::vector<int> station_of_user) {
  MulticastSolution s{make_assignment(problem, std::move(station_of_user)), {}};
  s.allocation = total_power(problem, s.assignment);
  return s;
}

LevelAssignment heuristic_assign(const MulticastProblem& problem) {
  std::vector<int> choice(static_cast<std::size_t>(problem.num_users()), 0);
  for (int k = 0; k < problem.num_users(); ++k) {
    const int cov = problem.network.coverage[static_cast<std::size_t>(k)];
    if (cov > 0 && problem.gains(cov, k) > problem.gains(0, k)) choice[static_cast<std::size_t>(k)] = cov;
  }
  return make_assignment(problem, std::move(choice));
}

MulticastSolution solve_case1(const MulticastProblem& problem, int station) {
  if (station < 0 || station >= problem.num_stations())
    throw ContractError("solve_case1: unknown station");
  for (int k = 0; k < problem.num_users(); ++k)
    if (!problem.eligible(station, k))
      throw ContractError("solve_case1: station does not reach every user");

  MulticastSolution s;
  s.assignment = make_assignment(problem, std::vector<int>(static_cast<std::size_t>(problem.num_users()), station));

  const int stations = problem.num_stations();
  const int levels = problem.num_levels();
  const double gamma = problem.thresholds(station);
  auto& alloc = s.allocation;
  alloc.noise = problem.noise_w;
  alloc.cumulative = Matrix<double>::Zero(stations, levels + 1);
  alloc.per_level = Matrix<double>::Zero(stations, levels);

  // Q_l = N0 Gamma sum_{i >= l} (1 + Gamma)^{c_i - c_l} W_i, with c counting
  // non-empty levels; equals the textbook (1 + Gamma)^{i - l} when none is empty.
  const auto by_level = problem.demand.users_at_level();
  std::vector<double> worst(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l)
    worst[static_cast<std::size_t>(l)] = worst_inverse_gain(problem, station, by_level[static_cast<std::size_t>(l)]);
  for (int l = 0; l < levels; ++l) {
    double sum = 0.0;
    for (int i = l; i < levels; ++i)
      sum += std::pow(1.0 + gamma, s.assignment.exponents(station, i) - s.assignment.exponents(station, l)) *
             worst[static_cast<std::size_t>(i)];
    alloc.cumulative(station, l) = problem.noise_w * gamma * sum;
  }
  for (int l = 0; l < levels; ++l)
    alloc.per_level(station, l) = alloc.cumulative(station, l) - alloc.cumulative(station, l + 1);
  alloc.total = alloc.cumulative.col(0).sum();
  return s;
}

MulticastSolution solve_case2(const MulticastProblem& problem) {
  if (problem.num_stations() != 2) throw ContractError("solve_case2: needs exactly one MBS and one FBS");
  for (int k = 0; k < problem.num_users(); ++k)
    if (problem.network.coverage[static_cast<std::size_t>(k)] != 1)
      throw ContractError("solve_case2: the FBS must cover every user");

  const double g0 = problem.thresholds(0);
  const double g1 = problem.thresholds(1);
  int c0 = 0;
  int c1 = 0;
  std::vector<int> choice(static_cast<std::size_t>(problem.num_users()), 0);
  const auto by_level = problem.demand.users_at_level();
  for (const auto& users : by_level) {
    if (users.empty()) continue;
    const double mbs_increment = g0 * std::pow(1.0 + g0, c0) * worst_inverse_gain(problem, 0, users);
    const double fbs_increment = g1 * std::pow(1.0 + g1, c1) * worst_inverse_gain(problem, 1, users);
    const int pick = mbs_increment <= fbs_increment ? 0 : 1;
    (pick == 0 ? c0 : c1) += 1;
    for (int k : users) choice[static_cast<std::size_t>(k)] = pick;
  }
  return evaluate_assignment(problem, std::move(choice));
}

MulticastSolution solve_case3(const MulticastProblem& problem) {
  const int stations = problem.num_stations();
  const int fbs_count = stations - 1;
  const Vector<double>& gamma = problem.thresholds;

  std::vector<int> exponent(static_cast<std::size_t>(stations), 0);
  std::vector<int> choice(static_cast<std::size_t>(problem.num_users()), 0);
  const auto by_level = problem.demand.users_at_level();

  auto increment = [&](int m, std::span<const int> users) {
    return gamma(m) * std::pow(1.0 + gamma(m), exponent[static_cast<std::size_t>(m)]) *
           worst_inverse_gain(problem, m, users);
  };

  for (const auto& users : by_level) {
    if (users.empty()) continue;
    // Eligible sets per FBS; users outside every femtocell stay with the MBS.
    std::vector<std::vector<int>> cell(static_cast<std::size_t>(stations));
    for (int k : users) cell[static_cast<std::size_t>(problem.network.coverage[static_cast<std::size_t>(k)])].push_back(k);

    std::vector<double> delta(static_cast<std::size_t>(stations), 0.0);
    for (int m = 1; m < stations; ++m) delta[static_cast<std::size_t>(m)] = increment(m, cell[static_cast<std::size_t>(m)]);

    std::vector<int> order(static_cast<std::size_t>(fbs_count));
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return delta[static_cast<std::size_t>(a)] < delta[static_cast<std::size_t>(b)]; });

    std::vector<bool> in_psi(static_cast<std::size_t>(stations), false);
    double best = increment(0, users);
    double psi_sum = 0.0;
    for (int candidate : order) {
      std::vector<int> rest = cell[0];
      for (int m = 1; m < stations; ++m)
        if (!in_psi[static_cast<std::size_t>(m)] && m != candidate)
          rest.insert(rest.end(), cell[static_cast<std::size_t>(m)].begin(), cell[static_cast<std::size_t>(m)].end());
      const double with_candidate = psi_sum + delta[static_cast<std::size_t>(candidate)] + increment(0, rest);
      if (with_candidate < best) {
        in_psi[static_cast<std::size_t>(candidate)] = true;
        psi_sum += delta[static_cast<std::size_t>(candidate)];
        best = with_candidate;
      }
    }

    bool mbs_active = false;
    for (int m = 0; m < stations; ++m) {
      const bool to_fbs = m > 0 && in_psi[static_cast<std::size_t>(m)];
      for (int k : cell[static_cast<std::size_t>(m)]) choice[static_cast<std::size_t>(k)] = to_fbs ? m : 0;
      if (to_fbs && !cell[static_cast<std::size_t>(m)].empty()) ++exponent[static_cast<std::size_t>(m)];
      if (!to_fbs && !cell[static_cast<std::size_t>(m)].empty()) mbs_active = true;
    }
    if (mbs_active) ++exponent[0];
  }
  return evaluate_assignment(problem, std::move(choice));
}

MulticastSolution brute_force_multicast(const MulticastProblem& problem, int max_choice_users) {
  std::vector<int> choosers;
  for (int k = 0; k < problem.num_users(); ++k)
    if (problem.network.coverage[static_cast<std::size_t>(k)] > 0) choosers.push_back(k);
  if (static_cast<int>(choosers.size()) > max_choice_users)
    throw SizeLimitError("brute_force_multicast: " + std::to_string(choosers.size()) +
                         " users with a choice exceeds the limit of " +
                         std::to_string(max_choice_users));

  const std::uint64_t combos = std::uint64_t{1} << choosers.size();
  std::vector<int> choice(static_cast<std::size_t>(problem.num_users()), 0);
  std::optional<MulticastSolution> best;
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    for (std::size_t i = 0; i < choosers.size(); ++i) {
      const int k = choosers[i];
      choice[static_cast<std::size_t>(k)] = (mask >> i) & 1U ? problem.network.coverage[static_cast<std::size_t>(k)] : 0;
    }
    MulticastSolution candidate = evaluate_assignment(problem, choice);
    if (!best || candidate.allocation.total < best->allocation.total) best = std::move(candidate);
  }
  return std::move(*best);
}

}  // namespace femto
