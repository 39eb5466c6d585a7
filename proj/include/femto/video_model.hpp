#ifndef FEMTO_VIDEO_MODEL_HPP
#define FEMTO_VIDEO_MODEL_HPP

#include <string>
#include <vector>

#include "femto/errors.hpp"
#include "femto/net_model.hpp"

namespace femto {

/// Linear rate-quality model W(R) = alpha + beta R of a medium-grain scalable
/// stream. Rates are in kbit per second, so beta is in dB per kbit/s.
struct VideoSequence {
  std::string name;
  double alpha_db = 0.0;
  double beta_db_per_kbps = 0.0;
};

template <typename Scalar>
Scalar psnr_of_rate(const VideoSequence& seq, Scalar rate_kbps) {
  if (rate_kbps < Scalar(0)) throw DomainError("psnr_of_rate: rate must be non-negative");
  return Scalar(seq.alpha_db) + Scalar(seq.beta_db_per_kbps) * rate_kbps;
}

/// PSNR gained per slot from a full slot on a link of `bandwidth_kbps` when the
/// window spans `window_slots` slots.
double rate_constant(const VideoSequence& seq, double bandwidth_kbps, int window_slots);

/// Outage probability F(H) of an exponentially distributed SINR with mean `mean_sinr`.
double loss_probability(double decode_threshold, double mean_sinr);

/// Mean SINR whose outage probability at `decode_threshold` equals `loss`.
double mean_sinr_for_loss(double decode_threshold, double loss);

/// Per-slot link-level inputs of the streaming model. Transmitter 0 is the MBS,
/// 1..N the FBSs; every user talks to the MBS and to its own FBS only.
struct SlotLinks {
  Matrix<double> success;  // P-bar, (N+1) x K
  Matrix<int> delivered;   // xi realizations, (N+1) x K
};

/// Loss probabilities drawn per slot from the mean SINR of each link, with the
/// mean picked so that losses are uniform in [loss_min, loss_max].
SlotLinks draw_links(int num_transmitters, int num_users, double decode_threshold,
                     double loss_min, double loss_max, std::uint64_t seed, std::int64_t slot);

/// Decisions of one slot for every user: the transmitter it listens to and its
/// share of that transmitter's slot.
struct SlotSchedule {
  std::vector<int> on_mbs;     // p_j in {0, 1}
  Vector<double> share_mbs;    // rho_{0,j}
  Vector<double> share_fbs;    // rho_{i,j} on the user's own FBS
};

inline constexpr double kShareTolerance = 1e-6;

/// Per-user PSNR state within a window of T slots, plus an independent tally
/// of delivered bits.
struct StreamState {
  std::vector<VideoSequence> video;
  std::vector<int> fbs_of_user;  // 1..N
  double mbs_kbps = 0.0;         // B_0
  double channel_kbps = 0.0;     // B_1 per licensed channel
  int window_slots = 1;          // T

  Vector<double> psnr;            // W_j
  Vector<double> delivered_kbit;  // bits delivered in the current window
  int slot_in_window = 0;

  int num_users() const { return static_cast<int>(video.size()); }
  double rate_mbs(int user) const;
  double rate_fbs(int user) const;
};

StreamState make_stream_state(std::vector<VideoSequence> video, std::vector<int> fbs_of_user,
                              double mbs_kbps, double channel_kbps, int window_slots);

/// W_j <- W_j + xi_0 rho_0 R_0 + xi_i rho_i G_i R_i for the user's single
/// connection. `expected_channels` holds G_i per FBS. Throws ContractError when
/// a transmitter's shares exceed one.
void update_psnr(StreamState& state, const SlotSchedule& schedule, const Matrix<int>& delivered,
                 const Vector<double>& expected_channels);

/// alpha_j + beta_j * delivered / T: the PSNR the bit tally predicts.
Vector<double> psnr_from_bits(const StreamState& state);

/// Starts a new window: PSNR back to alpha, tally cleared.
void reset_window(StreamState& state);

}  // namespace femto

#endif  // FEMTO_VIDEO_MODEL_HPP
