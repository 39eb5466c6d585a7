#include <doctest.h>

#include <cmath>
#include <vector>

#include "femto/video_model.hpp"

using namespace femto;

namespace {

const VideoSequence kClip{"clip", 30.0, 0.05};

SlotSchedule schedule(std::vector<int> on_mbs, std::vector<double> mbs, std::vector<double> fbs) {
  SlotSchedule s;
  s.on_mbs = std::move(on_mbs);
  s.share_mbs = Eigen::Map<Vector<double>>(mbs.data(), static_cast<Eigen::Index>(mbs.size()));
  s.share_fbs = Eigen::Map<Vector<double>>(fbs.data(), static_cast<Eigen::Index>(fbs.size()));
  return s;
}

}  // namespace

TEST_CASE("rate-quality line") {
  CHECK(psnr_of_rate(kClip, 200.0) == doctest::Approx(40.0));
  CHECK(psnr_of_rate(kClip, 0.0) == 30.0);
  CHECK(psnr_of_rate(kClip, 300.0) - psnr_of_rate(kClip, 100.0) ==
        doctest::Approx(2 * (psnr_of_rate(kClip, 200.0) - psnr_of_rate(kClip, 100.0))));
  CHECK_THROWS_AS(psnr_of_rate(kClip, -1.0), DomainError);
  CHECK(rate_constant(kClip, 300.0, 10) == doctest::Approx(1.5));
  CHECK_THROWS_AS(rate_constant(kClip, 300.0, 0), ConfigError);
}

TEST_CASE("outage probability") {
  CHECK(loss_probability(0.0, 2.0) == 0.0);
  CHECK(loss_probability(1.0, INFINITY) == 0.0);
  CHECK(loss_probability(1.0, 1.0) == doctest::Approx(1 - std::exp(-1.0)));
  for (double loss : {0.004, 0.01, 0.028})
    CHECK(loss_probability(1.0, mean_sinr_for_loss(1.0, loss)) == doctest::Approx(loss).epsilon(1e-12));
  CHECK_THROWS_AS(loss_probability(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(mean_sinr_for_loss(1.0, 1.0), DomainError);
}

TEST_CASE("drawn links stay in the loss range") {
  for (std::int64_t slot = 0; slot < 20; ++slot) {
    const SlotLinks l = draw_links(3, 5, 1.0, 0.004, 0.028, 42, slot);
    CHECK(l.success.minCoeff() >= 1 - 0.028 - 1e-12);
    CHECK(l.success.maxCoeff() <= 1 - 0.004 + 1e-12);
    CHECK(l.delivered.minCoeff() >= 0);
    CHECK(l.delivered.maxCoeff() <= 1);
    const SlotLinks again = draw_links(3, 5, 1.0, 0.004, 0.028, 42, slot);
    CHECK(l.success == again.success);
    CHECK(l.delivered == again.delivered);
  }
  CHECK_THROWS_AS(draw_links(2, 2, 1.0, 0.03, 0.02, 1, 0), ConfigError);
}

TEST_CASE("psnr update by hand") {
  StreamState st = make_stream_state({kClip, kClip, kClip}, {1, 1, 2}, 300.0, 200.0, 10);
  const Vector<double> g = (Vector<double>(2) << 2.0, 0.5).finished();
  Matrix<int> xi = Matrix<int>::Ones(3, 3);
  xi(1, 1) = 0;
  update_psnr(st, schedule({1, 0, 0}, {0.6, 0.0, 0.0}, {0.0, 1.0, 1.0}), xi, g);
  // 0.6 * 0.05 * 300 / 10; lost packet; 1 * 0.5 * 0.05 * 200 / 10.
  CHECK(st.psnr(0) == doctest::Approx(30.9));
  CHECK(st.psnr(1) == doctest::Approx(30.0));
  CHECK(st.psnr(2) == doctest::Approx(30.5));
  CHECK(st.slot_in_window == 1);
  reset_window(st);
  CHECK(st.psnr(0) == 30.0);
  CHECK(st.delivered_kbit.sum() == 0.0);
}

TEST_CASE("overbooking is a contract violation") {
  StreamState st = make_stream_state({kClip, kClip}, {1, 1}, 300.0, 200.0, 10);
  const Vector<double> g = Vector<double>::Ones(1);
  const Matrix<int> xi = Matrix<int>::Ones(2, 2);
  CHECK_THROWS_AS(update_psnr(st, schedule({1, 1}, {0.7, 0.7}, {0, 0}), xi, g), ContractError);
  CHECK_THROWS_AS(update_psnr(st, schedule({1, 1}, {-0.1, 0.5}, {0, 0}), xi, g), ContractError);
  CHECK_THROWS_AS(update_psnr(st, schedule({1}, {0.5}, {0}), xi, g), ContractError);
  CHECK_NOTHROW(update_psnr(st, schedule({0, 0}, {0, 0}, {0.5, 0.5 + 1e-7}), xi, g));
}

TEST_CASE("per-slot increments telescope to the rate-quality line") {
  RngStream rng(8, 0);
  const std::vector<VideoSequence> videos{{"a", 26, 0.05}, {"b", 24.5, 0.06}, {"c", 27, 0.045}, {"a", 26, 0.05}};
  StreamState st = make_stream_state(videos, {1, 1, 2, 2}, 300.0, 300.0, 10);
  std::vector<double> kbit(4, 0.0);
  for (int t = 0; t < 10; ++t) {
    const Vector<double> g = (Vector<double>(2) << rng.uniform(0, 4), rng.uniform(0, 4)).finished();
    Matrix<int> xi(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) xi(i, j) = rng.bernoulli(0.9) ? 1 : 0;
    const SlotSchedule s = schedule({1, 0, 1, 0}, {0.3, 0, 0.7, 0}, {0, 1.0, 0, 1.0});
    update_psnr(st, s, xi, g);
    // Bits delivered this slot, counted from the link rates directly.
    for (int j = 0; j < 4; ++j) {
      const int fbs = j < 2 ? 1 : 2;
      if (s.on_mbs[static_cast<std::size_t>(j)] == 1) kbit[static_cast<std::size_t>(j)] += xi(0, j) * s.share_mbs(j) * 300.0;
      else kbit[static_cast<std::size_t>(j)] += xi(fbs, j) * s.share_fbs(j) * g(fbs - 1) * 300.0;
    }
  }
  for (int j = 0; j < 4; ++j) {
    const double oracle = psnr_of_rate(videos[static_cast<std::size_t>(j)], kbit[static_cast<std::size_t>(j)] / 10.0);
    CHECK(std::abs(st.psnr(j) - oracle) <= 1e-9);
    CHECK(std::abs(psnr_from_bits(st)(j) - oracle) <= 1e-9);
  }
}

TEST_CASE("stream state validation") {
  CHECK_THROWS_AS(make_stream_state({kClip}, {1, 1}, 300, 300, 10), ConfigError);
  CHECK_THROWS_AS(make_stream_state({kClip}, {1}, 0, 300, 10), ConfigError);
  CHECK_THROWS_AS(make_stream_state({{"x", 0.0, 0.1}}, {1}, 300, 300, 10), ConfigError);
}
