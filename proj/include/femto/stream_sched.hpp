#ifndef FEMTO_STREAM_SCHED_HPP
#define FEMTO_STREAM_SCHED_HPP

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "femto/errors.hpp"
#include "femto/net_model.hpp"
#include "femto/video_model.hpp"

namespace femto {

/// One slot of the streaming problem
///
///     max  sum_j p_j P0_j log(W_j + rho0_j R0_j) + (1 - p_j) Pi_j log(W_j + rhoi_j G_i Ri_j)
///     s.t. sum_j rho0_j <= 1,  sum_{j in U_i} rhoi_j <= 1,  0 <= rho <= 1,
///
/// with transmitter 0 the MBS and i = 1..N the FBSs.
struct SlotProblem {
  int num_fbs = 1;
  std::vector<int> fbs_of_user;  // 1..N
  Vector<double> success_mbs;    // P0_j
  Vector<double> success_fbs;    // Pi_j towards the user's FBS
  Vector<double> psnr_before;    // W_j^-
  Vector<double> rate_mbs;       // R0_j
  Vector<double> rate_fbs;       // Ri_j per expected channel
  Vector<double> expected_channels;  // G_i, size N

  int num_users() const { return static_cast<int>(fbs_of_user.size()); }
  int fbs(int user) const { return fbs_of_user[static_cast<std::size_t>(user)]; }
  /// G_i Ri_j for the user's FBS.
  double fbs_rate(int user) const { return rate_fbs(user) * expected_channels(fbs(user) - 1); }
};

/// Throws ConfigError on inconsistent sizes, probabilities outside [0, 1],
/// non-positive PSNR or negative rates.
void validate(const SlotProblem& problem);

SlotProblem make_slot_problem(const StreamState& state, const Matrix<double>& success,
                              const Vector<double>& expected_channels);

double objective_value(const SlotProblem& problem, const SlotSchedule& schedule);

/// Time used on each transmitter (index 0 is the MBS).
Vector<double> transmitter_load(const SlotProblem& problem, const SlotSchedule& schedule);

// ---------------------------------------------------------------------------
// Dual decomposition

/// [P/lambda - W/R]^+, the stationary point of one branch before the slot
/// ceiling is applied. lambda = 0 gives +infinity.
double unconstrained_share(double success, double lambda, double psnr, double rate);

struct UserDecision {
  bool on_mbs = true;
  double share_mbs = 0.0;
  double share_fbs = 0.0;
  double value = 0.0;  // per-user Lagrangian at the decision
};

/// Maximizes the per-user Lagrangian over p in {0, 1} and rho in [0, 1]^2.
/// Ties go to the MBS.
UserDecision user_subproblem(const SlotProblem& problem, int user, const Vector<double>& lambda);

/// lambda_i <- [lambda_i - s (1 - load_i)]^+.
Vector<double> dual_update(const Vector<double>& lambda, const Vector<double>& load, double step);

/// Dual function: the Lagrangian maximized over the primal box plus sum lambda.
double dual_function(const SlotProblem& problem, const Vector<double>& lambda);

/// Smallest dual value found by golden-section search along each multiplier in
/// turn, starting from `start`. Any result is a valid upper bound on the slot
/// optimum.
double minimize_dual(const SlotProblem& problem, Vector<double> start, int rounds = 20);

struct SolverOptions {
  double step = 0.01;
  double threshold = 1e-6;  // phi
  int max_iters = 10000;
  double initial_lambda = 1.0;
  std::optional<Vector<double>> warm_start;
  /// Tighten the reported dual bound by a coordinate search after convergence.
  bool refine_dual = true;
};

struct TracePoint {
  int iteration = 0;
  Vector<double> lambda;
  double objective = 0.0;
};

struct ScheduleSolution {
  SlotSchedule schedule;
  Vector<double> lambda;
  double objective = 0.0;
  double dual_value = 0.0;
  double duality_gap = 0.0;  // |primal - dual| / |dual|
  int iterations = 0;
  bool converged = false;
};

/// Exact time shares for a fixed branch choice: every transmitter water-fills
/// its slot over the users listening to it. `multipliers`, when given, receives
/// the water level of each transmitter.
SlotSchedule water_fill(const SlotProblem& problem, const std::vector<int>& on_mbs,
                        Vector<double>* multipliers = nullptr);

/// Subgradient iteration on the duals until sum (delta lambda)^2 <= phi. On
/// convergence the final branch choice is water-filled; otherwise the best
/// iterate (rows scaled back to a full slot) is returned.
ScheduleSolution solve_noninterfering(const SlotProblem& problem, const SolverOptions& options = {},
                                      std::vector<TracePoint>* trace = nullptr);

/// Same loop for N = 1. Throws ContractError for more FBSs.
ScheduleSolution solve_single_fbs(const SlotProblem& problem, const SolverOptions& options = {},
                                  std::vector<TracePoint>* trace = nullptr);

inline constexpr int kExhaustiveUserLimit = 16;

/// Best branch choice by enumerating all 2^K of them, each water-filled.
/// Throws SizeLimitError above `max_users`.
ScheduleSolution exhaustive_schedule(const SlotProblem& problem,
                                     int max_users = kExhaustiveUserLimit);

// ---------------------------------------------------------------------------
// Baselines

/// Each user listens to the transmitter with the larger expected rate P R
/// (ties to the MBS); every transmitter splits its slot equally.
SlotSchedule heuristic_equal(const SlotProblem& problem);

/// Same association; every transmitter gives its whole slot to the listener
/// with the largest expected rate.
SlotSchedule heuristic_diversity(const SlotProblem& problem);

// ---------------------------------------------------------------------------
// Interfering FBSs

/// Vertices are FBS ids 1..N; an edge forbids reusing a channel on both ends.
struct InterferenceGraph {
  int num_fbs = 0;
  std::vector<std::pair<int, int>> edges;

  bool adjacent(int a, int b) const;
  std::vector<int> neighbors(int fbs) const;
  int degree(int fbs) const;
  int max_degree() const;
  /// d(i, k): 1 when FBS i is an endpoint of edge k.
  Eigen::MatrixXi incidence() const;
};

/// Throws ConfigError on self loops, repeated edges or unknown vertices.
InterferenceGraph make_interference_graph(int num_fbs, std::vector<std::pair<int, int>> edges);

/// Assignment of the accessible channels to FBSs.
struct ChannelAllocation {
  std::vector<int> channels;  // accessible channel ids
  std::vector<double> idle;   // P^A per accessible channel
  Eigen::MatrixXi assigned;   // N x |channels|

  /// G_i = sum_m c(i, m) P^A_m.
  Vector<double> expected_channels() const;
};

ChannelAllocation empty_allocation(int num_fbs, std::vector<int> channels, std::vector<double> idle);

/// True when no edge has both ends on the same channel.
bool respects(const ChannelAllocation& allocation, const InterferenceGraph& graph);

/// Q(c): slot objective for the allocation, minus its value with no licensed
/// channels so that Q(empty) = 0. Results are cached per allocation.
class AllocationValue {
public:
  AllocationValue(SlotProblem problem, SolverOptions options);

  double operator()(const ChannelAllocation& allocation);
  std::size_t evaluations() const { return evaluations_; }

private:
  SlotProblem problem_;
  SolverOptions options_;
  double baseline_ = 0.0;
  std::vector<std::pair<std::vector<int>, double>> cache_;
  std::size_t evaluations_ = 0;
};

struct GreedyStep {
  int fbs = 0;
  int channel = 0;  // column in the allocation
  double delta = 0.0;
  int degree = 0;   // D(l)
};

struct GreedyResult {
  ChannelAllocation allocation;
  std::vector<GreedyStep> trace;
  double value = 0.0;  // Q(pi_L)
};

/// Adds the FBS-channel pair with the largest increase of Q until no pair is
/// left, dropping each chosen pair and its interfering neighbours on that channel.
GreedyResult greedy_alloc(const SlotProblem& problem, std::vector<int> channels,
                          std::vector<double> idle, const InterferenceGraph& graph,
                          AllocationValue& value);

struct BruteForceAllocation {
  ChannelAllocation allocation;
  double value = 0.0;
};

inline constexpr int kBruteForcePairLimit = 12;

/// Best conflict-free allocation by enumeration. Throws SizeLimitError when
/// N |A| exceeds `max_pairs`.
BruteForceAllocation brute_force_alloc(const SlotProblem& problem, std::vector<int> channels,
                                       std::vector<double> idle, const InterferenceGraph& graph,
                                       AllocationValue& value, int max_pairs = kBruteForcePairLimit);

/// Q(pi_L) + sum_l D(l) Delta_l.
double optbound_upper(const GreedyResult& result);

/// omega_l: pairs of `optimum` that clash with the l-th greedy pick (same
/// channel, same or adjacent FBS) but with none of the earlier picks.
std::vector<std::vector<std::pair<int, int>>> conflict_partition(const GreedyResult& result,
                                                                 const ChannelAllocation& optimum,
                                                                 const InterferenceGraph& graph);

}  // namespace femto

#endif  // FEMTO_STREAM_SCHED_HPP
