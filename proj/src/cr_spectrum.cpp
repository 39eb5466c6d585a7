#include "femto/cr_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace femto {

void PrimaryChannel::validate() const {
  auto prob = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!prob(p01) || !prob(p10)) throw ConfigError("transition probabilities must lie in [0, 1]");
  if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("channel utilization must lie in [0, 1)");
}

PrimaryChannel make_channel(double p01, double p10) {
  PrimaryChannel ch{p01, p10, 0.0};
  const double sum = p01 + p10;
  ch.eta = sum > 0.0 ? p01 / sum : 0.0;
  ch.validate();
  return ch;
}

PrimaryChannel make_channel(double p01, double p10, double eta) {
  PrimaryChannel base{p01, p10, eta};
  base.validate();
  double sum = p01 + p10;
  if (eta > 0.0) sum = std::min(sum, 1.0 / eta);
  sum = std::min(sum, 1.0 / (1.0 - eta));
  return PrimaryChannel{eta * sum, (1.0 - eta) * sum, eta};
}

int initial_state(const PrimaryChannel& channel, RngStream& rng) {
  return rng.bernoulli(channel.eta) ? 1 : 0;
}

int step_primary(const PrimaryChannel& channel, int state, RngStream& rng) {
  const double u = rng.uniform();
  if (state == 0) return u < channel.p01 ? 1 : 0;
  return u < channel.p10 ? 0 : 1;
}

void SensorProfile::validate() const {
  if (!(epsilon >= 0.0 && epsilon < 1.0) || !(delta >= 0.0 && delta < 1.0))
    throw ConfigError("sensing error probabilities must lie in [0, 1)");
  if (!(epsilon + delta < 1.0)) throw ConfigError("sensor must be informative: epsilon + delta < 1");
}

int sense(int true_state, const SensorProfile& profile, RngStream& rng) {
  if (true_state == 0) return rng.bernoulli(profile.epsilon) ? 1 : 0;
  return rng.bernoulli(profile.delta) ? 0 : 1;
}

double likelihood_ratio(int observation, const SensorProfile& profile) {
  const double busy = observation == 1 ? 1.0 - profile.delta : profile.delta;
  const double idle = observation == 1 ? profile.epsilon : 1.0 - profile.epsilon;
  if (idle == 0.0) return std::numeric_limits<double>::infinity();
  return busy / idle;
}

namespace {

void check_inputs(double eta, std::span<const int> observations,
                  std::span<const SensorProfile> profiles) {
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("fusion prior must lie in [0, 1)");
  if (observations.empty()) throw DomainError("fusion needs at least one report");
  if (observations.size() != profiles.size())
    throw DomainError("one sensor profile per report required");
  for (std::size_t l = 0; l < observations.size(); ++l) {
    const auto& p = profiles[l];
    if (!(p.epsilon >= 0.0 && p.epsilon < 1.0) || !(p.delta >= 0.0 && p.delta < 1.0))
      throw DomainError("sensor " + std::to_string(l) + " is degenerate");
    if (observations[l] != 0 && observations[l] != 1)
      throw DomainError("reports must be 0 or 1");
  }
}

// Odds of busy after multiplying by one more likelihood ratio.
double update_odds(double odds, double ratio) {
  if ((std::isinf(odds) && ratio == 0.0) || (odds == 0.0 && std::isinf(ratio)))
    throw DomainError("reports contradict each other with certainty");
  return odds * ratio;
}

}  // namespace

double fuse_beliefs(double eta, std::span<const int> observations,
                    std::span<const SensorProfile> profiles) {
  check_inputs(eta, observations, profiles);
  double odds = update_odds(eta / (1.0 - eta), likelihood_ratio(observations[0], profiles[0]));
  double idle = 1.0 / (1.0 + odds);
  for (std::size_t l = 1; l < observations.size(); ++l) {
    const double previous = idle == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / idle - 1.0;
    odds = update_odds(previous, likelihood_ratio(observations[l], profiles[l]));
    idle = 1.0 / (1.0 + odds);
  }
  return idle;
}

double fuse_beliefs_batch(double eta, std::span<const int> observations,
                          std::span<const SensorProfile> profiles) {
  check_inputs(eta, observations, profiles);
  double given_idle = 1.0 - eta;
  double given_busy = eta;
  for (std::size_t l = 0; l < observations.size(); ++l) {
    const auto& p = profiles[l];
    given_idle *= observations[l] == 1 ? p.epsilon : 1.0 - p.epsilon;
    given_busy *= observations[l] == 1 ? 1.0 - p.delta : p.delta;
  }
  const double evidence = given_idle + given_busy;
  if (evidence == 0.0) throw DomainError("reports contradict each other with certainty");
  return given_idle / evidence;
}

double access_probability(double idle_probability, double gamma) {
  if (idle_probability >= 1.0) return 1.0;
  return std::min(gamma / (1.0 - idle_probability), 1.0);
}

AccessDecision decide_access(std::span<const double> idle_probability,
                             std::span<const double> access_prob, RngStream& rng) {
  if (idle_probability.size() != access_prob.size())
    throw ContractError("decide_access: one access probability per channel");
  AccessDecision out;
  for (std::size_t m = 0; m < access_prob.size(); ++m) {
    // Draw for every channel so the stream position does not depend on outcomes.
    const bool access = rng.uniform() < access_prob[m];
    if (access) {
      out.available.push_back(static_cast<int>(m));
      out.expected_channels += idle_probability[m];
    }
  }
  return out;
}

std::vector<int> SensingPlan::observers(int channel, std::int64_t slot) const {
  std::vector<int> out;
  const auto shift = static_cast<int>(slot % num_channels);
  for (int j = 0; j < num_users; ++j)
    if ((j + shift) % num_channels == channel) out.push_back(j);
  const int offset = ((channel - shift) % num_channels + num_channels) % num_channels;
  if (offset < fbs_antennas)
    for (int f = 0; f < num_fbs; ++f) out.push_back(num_users + f);
  return out;
}

SpectrumSimulator::SpectrumSimulator(std::vector<PrimaryChannel> channels, SensorProfile sensor,
                                     double gamma, SensingPlan plan, std::uint64_t seed)
    : channels_(std::move(channels)), sensor_(sensor), gamma_(gamma), plan_(plan), seed_(seed) {
  for (const auto& ch : channels_) ch.validate();
  sensor_.validate();
  if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw ConfigError("collision tolerance must lie in [0, 1]");
  if (plan_.num_channels != num_channels()) throw ConfigError("sensing plan channel count mismatch");
  if (plan_.fbs_antennas < 0 || plan_.fbs_antennas > plan_.num_channels)
    throw ConfigError("FBS antennas must lie in [0, M]");
}

SpectrumSlot SpectrumSimulator::step() {
  const int channels = num_channels();
  SpectrumSlot out;

  RngStream primary(seed_, static_cast<std::uint64_t>(slot_), StreamTag::Primary);
  if (slot_ == 0) {
    state_.resize(static_cast<std::size_t>(channels));
    for (int m = 0; m < channels; ++m)
      state_[static_cast<std::size_t>(m)] = initial_state(channels_[static_cast<std::size_t>(m)], primary);
  } else {
    for (int m = 0; m < channels; ++m)
      state_[static_cast<std::size_t>(m)] =
          step_primary(channels_[static_cast<std::size_t>(m)], state_[static_cast<std::size_t>(m)], primary);
  }
  out.state = state_;

  RngStream sensing(seed_, static_cast<std::uint64_t>(slot_), StreamTag::Sensing);
  out.reports.resize(static_cast<std::size_t>(channels));
  out.idle.resize(static_cast<std::size_t>(channels));
  out.access.resize(static_cast<std::size_t>(channels));
  for (int m = 0; m < channels; ++m) {
    const auto& ch = channels_[static_cast<std::size_t>(m)];
    auto& reports = out.reports[static_cast<std::size_t>(m)];
    for (std::size_t n = plan_.observers(m, slot_).size(); n > 0; --n)
      reports.push_back(sense(state_[static_cast<std::size_t>(m)], sensor_, sensing));
    double idle = 1.0 - ch.eta;
    if (!reports.empty()) {
      const std::vector<SensorProfile> profiles(reports.size(), sensor_);
      idle = fuse_beliefs(ch.eta, reports, profiles);
    }
    out.idle[static_cast<std::size_t>(m)] = idle;
    out.access[static_cast<std::size_t>(m)] = access_probability(idle, gamma_);
  }

  RngStream access(seed_, static_cast<std::uint64_t>(slot_), StreamTag::Access);
  out.decision = decide_access(out.idle, out.access, access);
  out.collided.assign(static_cast<std::size_t>(channels), 0);
  for (int m : out.decision.available)
    if (state_[static_cast<std::size_t>(m)] == 1) out.collided[static_cast<std::size_t>(m)] = 1;

  ++slot_;
  return out;
}

}  // namespace femto
