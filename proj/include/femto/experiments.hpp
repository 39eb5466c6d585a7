#ifndef FEMTO_EXPERIMENTS_HPP
#define FEMTO_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "femto/config.hpp"
#include "femto/results.hpp"
#include "femto/sic_multicast.hpp"
#include "femto/stream_sched.hpp"

namespace femto {

// ---------------------------------------------------------------------------
// Instance generators

/// Multicast instance of `params.num_users` users drawn from (seed, index).
/// Case I uses the MBS alone with the total bandwidth; Case II one FBS that
/// covers everyone; Case III `params.num_fbs` FBSs with disjoint coverage.
MulticastProblem sample_multicast(const MulticastParams& params, Scenario scenario,
                                  std::uint64_t seed, std::uint64_t index = 0);

/// The Case I problem on the same users, demand and MBS gains as `problem`,
/// with the MBS owning `bandwidth_hz`.
MulticastProblem mbs_only(const MulticastProblem& problem, double bandwidth_hz,
                          double target_rate_bps);

struct SlotInstanceRanges {
  double success_lo = 0.97;
  double success_hi = 0.996;
  double psnr_lo = 24.0;
  double psnr_hi = 34.0;
  double rate_lo = 0.5;
  double rate_hi = 2.0;
  double channels_lo = 0.5;
  double channels_hi = 4.0;
};

/// Random slot problem with users spread round-robin over `num_fbs` FBSs.
SlotProblem sample_slot_problem(int num_users, int num_fbs, std::uint64_t seed,
                                std::uint64_t index = 0, const SlotInstanceRanges& ranges = {});

// ---------------------------------------------------------------------------
// Runners

/// Per-seed rows of one multicast configuration (no sweep applied).
std::vector<ResultRow> run_multicast(const ExperimentConfig& config,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& sweep_label = "");

struct StreamTrace {
  std::string csv;  // scenario,seed,sweep,slot,iteration,transmitter,lambda,objective
};

/// Per-seed rows of one streaming configuration (no sweep applied).
std::vector<ResultRow> run_streaming(const ExperimentConfig& config,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& sweep_label = "",
                                     StreamTrace* trace = nullptr);

/// run_streaming with every solver truncated at `iteration_budget`.
std::vector<ResultRow> budget_run(const ExperimentConfig& config, int iteration_budget,
                                  const std::vector<std::uint64_t>& seeds,
                                  const std::string& sweep_label = "");

/// Runs the configured scenario at every sweep point (or once without a sweep).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::vector<std::uint64_t>& seeds,
                                      std::optional<int> budget = std::nullopt,
                                      StreamTrace* trace = nullptr);

// ---------------------------------------------------------------------------
// Oracle checks

struct OracleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick randomized comparisons of every solver with its brute-force oracle.
std::vector<OracleCheck> run_oracle_checks(const std::vector<std::uint64_t>& seeds);

}  // namespace femto

#endif  // FEMTO_EXPERIMENTS_HPP
