#ifndef FEMTO_NET_MODEL_HPP
#define FEMTO_NET_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "femto/errors.hpp"

namespace femto {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Row m holds the gains from base station m (0 = MBS) to every user.
template <typename Scalar>
using GainMatrix = Matrix<Scalar>;

enum class StationKind { Macro, Femto };

struct BaseStation {
  int id = 0;
  StationKind kind = StationKind::Macro;
  double bandwidth_hz = 0.0;
};

/// One MBS (id 0) and M FBSs (ids 1..M). Every user is covered by the MBS and
/// by at most one FBS; coverage[k] == 0 means only the MBS reaches user k.
struct Network {
  std::vector<BaseStation> stations;
  std::vector<int> coverage;

  int num_stations() const { return static_cast<int>(stations.size()); }
  int num_fbs() const { return num_stations() - 1; }
  int num_users() const { return static_cast<int>(coverage.size()); }
};

Network make_network(double mbs_bandwidth_hz, std::span<const double> fbs_bandwidth_hz,
                     std::vector<int> coverage);

/// Throws ConfigError when an invariant of Network does not hold.
void validate(const Network& network);

// ---------------------------------------------------------------------------
// Random streams

/// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Well-known stream tags so that different consumers of one (seed, slot)
/// pair never share draws.
enum class StreamTag : std::uint64_t {
  Gains = 1,
  Topology = 2,
  Primary = 3,
  Sensing = 4,
  Access = 5,
  Loss = 6,
  Instance = 7,
};

/// Deterministic random stream keyed by (seed, slot, tag). The variate
/// transforms are written out here rather than taken from <random> so that
/// draws do not depend on the standard library implementation.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t slot, StreamTag tag = StreamTag::Instance)
      : engine_(mix64(mix64(mix64(seed) ^ slot) ^ static_cast<std::uint64_t>(tag))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Fading

/// I.i.d. exponential block fading; mean(m, k) is the mean gain from station m
/// to user k and encodes distance directly.
struct FadingSpec {
  Matrix<double> mean;
  std::uint64_t seed = 0;
};

/// Means of `mbs_mean` towards every user, `fbs_mean` from a user's covering
/// FBS and `other_mean` for every other FBS-user pair.
FadingSpec coverage_fading(const Network& network, double mbs_mean, double fbs_mean,
                           double other_mean, std::uint64_t seed);

/// Gains for one time slot; a pure function of (spec, slot_index).
GainMatrix<double> sample_gains(const FadingSpec& spec, int num_stations, int num_users,
                                std::int64_t slot_index);

// ---------------------------------------------------------------------------
// Units

template <typename Scalar>
Scalar to_dbm(Scalar watts) {
  if (!(watts > Scalar(0))) throw DomainError("to_dbm: power must be positive");
  using std::log10;
  return Scalar(10) * log10(watts / Scalar(1e-3));
}

template <typename Scalar>
Scalar from_dbm(Scalar dbm) {
  using std::pow;
  return Scalar(1e-3) * pow(Scalar(10), dbm / Scalar(10));
}

/// Cylinder volume pi r^2 B of an interference footprint whose radius grows
/// linearly with transmit power. Bandwidth in MHz, radius in metres.
double footprint_volume(double power_w, double bandwidth_mhz, double radius_per_watt);

/// Radius constant implied by a 45.71 dBm transmitter occupying 2 MHz with an
/// 18,841 MHz m^2 footprint.
double default_radius_per_watt();

}  // namespace femto

#endif  // FEMTO_NET_MODEL_HPP
