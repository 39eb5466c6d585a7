#include "femto/net_model.hpp"

#include <numbers>
#include <string>

namespace femto {

Network make_network(double mbs_bandwidth_hz, std::span<const double> fbs_bandwidth_hz,
                     std::vector<int> coverage) {
  Network network;
  network.stations.push_back({0, StationKind::Macro, mbs_bandwidth_hz});
  int id = 1;
  for (double bw : fbs_bandwidth_hz) network.stations.push_back({id++, StationKind::Femto, bw});
  network.coverage = std::move(coverage);
  validate(network);
  return network;
}

void validate(const Network& network) {
  if (network.stations.empty()) throw ConfigError("network needs an MBS");
  for (int m = 0; m < network.num_stations(); ++m) {
    const auto& bs = network.stations[static_cast<std::size_t>(m)];
    if (bs.id != m) throw ConfigError("station ids must be 0..M in order");
    if ((m == 0) != (bs.kind == StationKind::Macro))
      throw ConfigError("exactly station 0 must be the MBS");
    if (!(bs.bandwidth_hz > 0.0) || !std::isfinite(bs.bandwidth_hz))
      throw ConfigError("station " + std::to_string(m) + " needs a positive bandwidth");
  }
  for (int k = 0; k < network.num_users(); ++k) {
    const int cov = network.coverage[static_cast<std::size_t>(k)];
    if (cov < 0 || cov > network.num_fbs())
      throw ConfigError("user " + std::to_string(k) + " covered by unknown FBS " +
                        std::to_string(cov));
  }
}

FadingSpec coverage_fading(const Network& network, double mbs_mean, double fbs_mean,
                           double other_mean, std::uint64_t seed) {
  FadingSpec spec;
  spec.seed = seed;
  spec.mean = Matrix<double>::Constant(network.num_stations(), network.num_users(), other_mean);
  spec.mean.row(0).setConstant(mbs_mean);
  for (int k = 0; k < network.num_users(); ++k) {
    const int cov = network.coverage[static_cast<std::size_t>(k)];
    if (cov > 0) spec.mean(cov, k) = fbs_mean;
  }
  return spec;
}

GainMatrix<double> sample_gains(const FadingSpec& spec, int num_stations, int num_users,
                                std::int64_t slot_index) {
  if (slot_index < 0) throw ContractError("sample_gains: slot index must be non-negative");
  if (spec.mean.rows() != num_stations || spec.mean.cols() != num_users)
    throw ConfigError("fading mean matrix does not match the network size");
  if (!(spec.mean.array() > 0.0).all() || !spec.mean.allFinite())
    throw ConfigError("fading means must be positive and finite");

  RngStream rng(spec.seed, static_cast<std::uint64_t>(slot_index), StreamTag::Gains);
  GainMatrix<double> gains(num_stations, num_users);
  // Column-major fill: user k's gains are drawn together.
  for (int k = 0; k < num_users; ++k)
    for (int m = 0; m < num_stations; ++m) {
      double g = rng.exponential(spec.mean(m, k));
      // Exponential draws are positive with probability one; guard the u == 0 corner.
      if (!(g > 0.0)) g = spec.mean(m, k) * 0x1.0p-53;
      gains(m, k) = g;
    }
  return gains;
}

double footprint_volume(double power_w, double bandwidth_mhz, double radius_per_watt) {
  const double r = radius_per_watt * power_w;
  return std::numbers::pi * r * r * bandwidth_mhz;
}

double default_radius_per_watt() {
  const double radius = std::sqrt(18841.0 / (std::numbers::pi * 2.0));
  return radius / from_dbm(45.71);
}

}  // namespace femto
