#ifndef FEMTO_CR_SPECTRUM_HPP
#define FEMTO_CR_SPECTRUM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "femto/errors.hpp"
#include "femto/net_model.hpp"

namespace femto {

/// Two-state occupancy chain of one licensed channel. State 1 is busy.
struct PrimaryChannel {
  double p01 = 0.0;  // idle -> busy
  double p10 = 0.0;  // busy -> idle
  double eta = 0.0;  // stationary busy probability, used as the sensing prior

  /// Throws ConfigError unless both transition probabilities lie in [0, 1] and
  /// eta in [0, 1).
  void validate() const;
};

/// Channel whose prior is the stationary busy probability p01 / (p01 + p10);
/// a frozen chain (p01 = p10 = 0) gets prior 0.
PrimaryChannel make_channel(double p01, double p10);

/// Channel with busy fraction `eta`. The transition sum p01 + p10 is kept (and
/// shrunk only as far as needed to stay a valid chain) while the split is moved
/// so that eta is the stationary busy probability.
PrimaryChannel make_channel(double p01, double p10, double eta);

/// A state drawn from the stationary law.
int initial_state(const PrimaryChannel& channel, RngStream& rng);

int step_primary(const PrimaryChannel& channel, int state, RngStream& rng);

/// epsilon = P(report busy | idle), delta = P(report idle | busy).
struct SensorProfile {
  double epsilon = 0.0;
  double delta = 0.0;

  /// Throws ConfigError unless both lie in [0, 1) and epsilon + delta < 1.
  void validate() const;
};

/// One sensing report: 1 means "sensed busy".
int sense(int true_state, const SensorProfile& profile, RngStream& rng);

/// P(report | busy) / P(report | idle). Infinite when the report is impossible
/// for an idle channel.
double likelihood_ratio(int observation, const SensorProfile& profile);

/// Posterior probability that the channel is idle given the reports, computed
/// one report at a time. Throws DomainError for epsilon or delta equal to one,
/// eta outside [0, 1), or reports that contradict each other with certainty.
double fuse_beliefs(double eta, std::span<const int> observations,
                    std::span<const SensorProfile> profiles);

/// Same posterior from the product form (1 - eta) prod P(x | idle) / evidence.
double fuse_beliefs_batch(double eta, std::span<const int> observations,
                          std::span<const SensorProfile> profiles);

/// Largest access probability that keeps the collision probability at gamma.
double access_probability(double idle_probability, double gamma);

struct AccessDecision {
  std::vector<int> available;  // channels with D_m = 0, ascending
  double expected_channels = 0.0;  // G
};

AccessDecision decide_access(std::span<const double> idle_probability,
                             std::span<const double> access_prob, RngStream& rng);

/// Who senses what in a slot. CR users sense one channel each, round-robin
/// shifted by the slot index; each FBS senses `fbs_antennas` channels starting
/// at the same shift.
struct SensingPlan {
  int num_channels = 0;
  int num_users = 0;
  int num_fbs = 0;
  int fbs_antennas = 0;

  /// Sensors (users 0..K-1, then FBS antennas) that observe `channel` this slot.
  std::vector<int> observers(int channel, std::int64_t slot) const;
  int observations_per_slot() const { return num_users + num_fbs * fbs_antennas; }
};

struct SpectrumSlot {
  std::vector<int> state;                // true occupancy per channel
  std::vector<std::vector<int>> reports;  // per channel
  std::vector<double> idle;              // P^A per channel
  std::vector<double> access;            // P^D per channel
  AccessDecision decision;
  std::vector<int> collided;             // 1 where an accessed channel was busy
};

/// Licensed-band simulation: occupancy, cooperative sensing, fusion and access.
class SpectrumSimulator {
public:
  SpectrumSimulator(std::vector<PrimaryChannel> channels, SensorProfile sensor, double gamma,
                    SensingPlan plan, std::uint64_t seed);

  /// Advances every channel by one slot (the first call draws the stationary
  /// start) and runs the sensing phase.
  SpectrumSlot step();

  std::int64_t slot() const { return slot_; }
  int num_channels() const { return static_cast<int>(channels_.size()); }

private:
  std::vector<PrimaryChannel> channels_;
  SensorProfile sensor_;
  double gamma_;
  SensingPlan plan_;
  std::uint64_t seed_;
  std::vector<int> state_;
  std::int64_t slot_ = 0;
};

}  // namespace femto

#endif  // FEMTO_CR_SPECTRUM_HPP
