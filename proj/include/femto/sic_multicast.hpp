#ifndef FEMTO_SIC_MULTICAST_HPP
#define FEMTO_SIC_MULTICAST_HPP

// Minimum-total-power layered multicast with superposition coding and
// successive interference cancellation over one MBS and M FBSs.
//
// Level l (0-based here) is the l-th packet of the layered stream. A user that
// requests level l has already cancelled levels < l and treats levels > l as
// noise, so with cumulative power Q_l = P_l + ... + P_{L-1} its SNR is
//
//     H P_l / (N0 + H Q_{l+1}).
//
// For a fixed user-to-station assignment the smallest cumulative powers follow
// from the backward recursion Q_l = F(Q_{l+1}, U_l), which unfolds into
//
//     Q_0 = N0 Gamma sum_l (1 + Gamma)^{c_l} max_{k in U_l} 1 / H_k,
//
// where c_l counts the non-empty levels below l. Everything in this header is
// built on those two identities.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "femto/errors.hpp"
#include "femto/net_model.hpp"

namespace femto {

/// Minimum SNR 2^(R/B) - 1 that sustains rate R over bandwidth B.
template <typename Scalar>
Scalar snr_threshold(Scalar rate_bps, Scalar bandwidth_hz) {
  if (!(bandwidth_hz > Scalar(0))) throw DomainError("snr_threshold: bandwidth must be positive");
  if (rate_bps < Scalar(0)) throw DomainError("snr_threshold: rate must be non-negative");
  using std::exp2;
  return exp2(rate_bps / bandwidth_hz) - Scalar(1);
}

/// One step of the backward power recursion: the least cumulative power at a
/// level given the cumulative power of the levels above it.
///
/// `gains` is any indexable row of channel gains from the serving station.
template <typename Scalar, typename GainRow>
Scalar f_step(Scalar q_next, std::span<const int> users, const GainRow& gains, Scalar threshold,
              Scalar noise) {
  if (users.empty()) return q_next;
  Scalar worst = Scalar(0);
  for (int k : users) worst = std::max(worst, Scalar(1) / Scalar(gains(k)));
  return noise * threshold * worst + (Scalar(1) + threshold) * q_next;
}

/// Which level each user requests. Levels are 0-based; a level may be empty.
struct LevelDemand {
  int num_levels = 0;
  std::vector<int> level_of_user;

  std::vector<std::vector<int>> users_at_level() const;
};

struct MulticastProblem {
  Network network;
  LevelDemand demand;
  GainMatrix<double> gains;  // (M+1) x K
  Vector<double> thresholds;  // Gamma_m per station
  double noise_w = 1.0;

  int num_stations() const { return network.num_stations(); }
  int num_users() const { return network.num_users(); }
  int num_levels() const { return demand.num_levels; }

  /// Stations user k may connect to: the MBS and its covering FBS, if any.
  bool eligible(int station, int user) const {
    return station == 0 || network.coverage[static_cast<std::size_t>(user)] == station;
  }
};

/// Builds a problem with thresholds derived from the target rate and each
/// station's bandwidth. Throws ConfigError on inconsistent sizes.
MulticastProblem make_multicast_problem(Network network, LevelDemand demand,
                                        GainMatrix<double> gains, double target_rate_bps,
                                        double noise_w);

void validate(const MulticastProblem& problem);

/// Users of `level` that `station` can reach (S_l^m).
std::vector<int> eligible_users(const MulticastProblem& problem, int level, int station);

/// A connection decision for every user together with the derived per-level,
/// per-station member sets and SIC exponents.
struct LevelAssignment {
  std::vector<int> station_of_user;
  /// members[l][m]: users of level l connected to station m.
  std::vector<std::vector<std::vector<int>>> members;
  /// exponents(m, l): number of non-empty levels below l at station m.
  Eigen::MatrixXi exponents;

  /// Binary connect indicator I(m, k).
  Eigen::MatrixXi indicator(int num_stations) const;
};

/// Throws ContractError if a user is sent to a station that does not cover it.
LevelAssignment make_assignment(const MulticastProblem& problem,
                                std::vector<int> station_of_user);

struct PowerAllocation {
  Matrix<double> cumulative;  // Q, (M+1) x (L+1); last column is zero
  Matrix<double> per_level;   // P, (M+1) x L
  double total = 0.0;
  double noise = 0.0;
};

/// Backward recursion of f_step from the top level down, per station.
PowerAllocation total_power(const MulticastProblem& problem, const LevelAssignment& assignment);

/// Q_0 per station from the unfolded closed form; an independent route to
/// total_power(...).cumulative.col(0).
Vector<double> folded_sum_power(const MulticastProblem& problem,
                                const LevelAssignment& assignment);

struct FeasibilityReport {
  bool feasible = true;
  bool one_transceiver = true;
  /// Relative SNR margin (SNR - Gamma) / Gamma per user; absolute SNR when Gamma = 0.
  std::vector<double> slack;
  double worst_slack = 0.0;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

FeasibilityReport verify_feasible(const MulticastProblem& problem,
                                  const LevelAssignment& assignment,
                                  const PowerAllocation& allocation,
                                  double tolerance = kFeasibilityTolerance);

struct PowerBounds {
  double upper_tight = 0.0;
  double upper_loose = 0.0;
  double lower_tight = 0.0;
  double lower_loose = 0.0;
};

/// Upper bounds are evaluated on `assignment` (the heuristic assignment when
/// none is given) and bound the optimum from above. Lower bounds depend only on
/// the demand and gains and hold for every feasible assignment.
PowerBounds bounds(const MulticastProblem& problem,
                   const std::optional<LevelAssignment>& assignment = std::nullopt);

/// Jensen-type bound N0 (M+1) sum_l G^l (1 + Gamma_min)^{n_l / (M+1)} where G^l
/// is the smallest per-station worst term at level l (zero when a station is
/// idle there) and n_l the number of non-empty levels below l. It bounds the
/// power of the given assignment from below, not the optimum.
double jensen_lower_bound(const MulticastProblem& problem, const LevelAssignment& assignment);

struct MulticastSolution {
  LevelAssignment assignment;
  PowerAllocation allocation;
};

MulticastSolution evaluate_assignment(const MulticastProblem& problem,
                                      std::vector<int> station_of_user);

/// Every user joins the eligible station with the largest gain; ties go to the MBS.
LevelAssignment heuristic_assign(const MulticastProblem& problem);

/// All users on one station (closed form). `station` must reach every user.
MulticastSolution solve_case1(const MulticastProblem& problem, int station = 0);

/// One MBS and one FBS covering every user; whole levels move between them.
MulticastSolution solve_case2(const MulticastProblem& problem);

/// One MBS and M FBSs with disjoint coverage.
MulticastSolution solve_case3(const MulticastProblem& problem);

inline constexpr int kBruteForceUserLimit = 16;

/// Exact optimum by enumerating every MBS/FBS choice of the FBS-covered users.
/// Throws SizeLimitError above `max_choice_users` such users.
MulticastSolution brute_force_multicast(const MulticastProblem& problem,
                                        int max_choice_users = kBruteForceUserLimit);

}  // namespace femto

#endif  // FEMTO_SIC_MULTICAST_HPP
