#include "femto/video_model.hpp"

#include <cmath>
#include <limits>

namespace femto {

double rate_constant(const VideoSequence& seq, double bandwidth_kbps, int window_slots) {
  if (window_slots < 1) throw ConfigError("window must span at least one slot");
  return seq.beta_db_per_kbps * bandwidth_kbps / window_slots;
}

double loss_probability(double decode_threshold, double mean_sinr) {
  if (!(decode_threshold >= 0.0)) throw DomainError("decode threshold must be non-negative");
  if (!(mean_sinr > 0.0)) throw DomainError("mean SINR must be positive");
  if (std::isinf(mean_sinr)) return 0.0;
  return -std::expm1(-decode_threshold / mean_sinr);
}

double mean_sinr_for_loss(double decode_threshold, double loss) {
  if (!(loss > 0.0 && loss < 1.0)) throw DomainError("loss must lie in (0, 1)");
  if (!(decode_threshold > 0.0)) throw DomainError("decode threshold must be positive");
  return -decode_threshold / std::log1p(-loss);
}

SlotLinks draw_links(int num_transmitters, int num_users, double decode_threshold,
                     double loss_min, double loss_max, std::uint64_t seed, std::int64_t slot) {
  if (!(loss_min > 0.0 && loss_min <= loss_max && loss_max < 1.0))
    throw ConfigError("loss range must satisfy 0 < min <= max < 1");
  RngStream rng(seed, static_cast<std::uint64_t>(slot), StreamTag::Loss);
  SlotLinks links;
  links.success.resize(num_transmitters, num_users);
  links.delivered.resize(num_transmitters, num_users);
  for (int j = 0; j < num_users; ++j)
    for (int i = 0; i < num_transmitters; ++i) {
      const double mean = mean_sinr_for_loss(decode_threshold, rng.uniform(loss_min, loss_max));
      const double success = 1.0 - loss_probability(decode_threshold, mean);
      links.success(i, j) = success;
      links.delivered(i, j) = rng.bernoulli(success) ? 1 : 0;
    }
  return links;
}

double StreamState::rate_mbs(int user) const {
  return rate_constant(video[static_cast<std::size_t>(user)], mbs_kbps, window_slots);
}

double StreamState::rate_fbs(int user) const {
  return rate_constant(video[static_cast<std::size_t>(user)], channel_kbps, window_slots);
}

StreamState make_stream_state(std::vector<VideoSequence> video, std::vector<int> fbs_of_user,
                              double mbs_kbps, double channel_kbps, int window_slots) {
  if (video.size() != fbs_of_user.size()) throw ConfigError("one FBS association per user");
  if (!(mbs_kbps > 0.0) || !(channel_kbps > 0.0)) throw ConfigError("link bandwidths must be positive");
  if (window_slots < 1) throw ConfigError("window must span at least one slot");
  for (const auto& v : video)
    if (!(v.alpha_db > 0.0) || !(v.beta_db_per_kbps >= 0.0))
      throw ConfigError("video " + v.name + " needs alpha > 0 and beta >= 0");
  StreamState s;
  s.video = std::move(video);
  s.fbs_of_user = std::move(fbs_of_user);
  s.mbs_kbps = mbs_kbps;
  s.channel_kbps = channel_kbps;
  s.window_slots = window_slots;
  reset_window(s);
  return s;
}

void reset_window(StreamState& state) {
  const int k = state.num_users();
  state.psnr.resize(k);
  for (int j = 0; j < k; ++j) state.psnr(j) = state.video[static_cast<std::size_t>(j)].alpha_db;
  state.delivered_kbit = Vector<double>::Zero(k);
  state.slot_in_window = 0;
}

void update_psnr(StreamState& state, const SlotSchedule& schedule, const Matrix<int>& delivered,
                 const Vector<double>& expected_channels) {
  const int k = state.num_users();
  const int n = static_cast<int>(expected_channels.size());
  if (schedule.share_mbs.size() != k || schedule.share_fbs.size() != k ||
      static_cast<int>(schedule.on_mbs.size()) != k)
    throw ContractError("update_psnr: schedule does not match the user count");

  Vector<double> used = Vector<double>::Zero(n + 1);
  for (int j = 0; j < k; ++j) {
    const int i = state.fbs_of_user[static_cast<std::size_t>(j)];
    if (schedule.share_mbs(j) < 0.0 || schedule.share_fbs(j) < 0.0)
      throw ContractError("update_psnr: negative time share");
    used(0) += schedule.share_mbs(j);
    used(i) += schedule.share_fbs(j);
  }
  for (int i = 0; i <= n; ++i)
    if (used(i) > 1.0 + kShareTolerance)
      throw ContractError("update_psnr: transmitter " + std::to_string(i) + " overbooked");

  for (int j = 0; j < k; ++j) {
    const int i = state.fbs_of_user[static_cast<std::size_t>(j)];
    if (schedule.on_mbs[static_cast<std::size_t>(j)] == 1) {
      const double rho = delivered(0, j) * schedule.share_mbs(j);
      state.psnr(j) += rho * state.rate_mbs(j);
      state.delivered_kbit(j) += rho * state.mbs_kbps;
    } else {
      const double rho = delivered(i, j) * schedule.share_fbs(j) * expected_channels(i - 1);
      state.psnr(j) += rho * state.rate_fbs(j);
      state.delivered_kbit(j) += rho * state.channel_kbps;
    }
  }
  ++state.slot_in_window;
}

Vector<double> psnr_from_bits(const StreamState& state) {
  Vector<double> out(state.num_users());
  for (int j = 0; j < state.num_users(); ++j) {
    const auto& v = state.video[static_cast<std::size_t>(j)];
    out(j) = v.alpha_db + v.beta_db_per_kbps * state.delivered_kbit(j) / state.window_slots;
  }
  return out;
}

}  // namespace femto
