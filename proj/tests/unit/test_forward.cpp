#include <doctest.h>

#include <cmath>
#include <vector>

#include "boomerang/errors.hpp"
#include "boomerang/forward.hpp"

using namespace bmk;

TEST_CASE("zero-variance limit keeps the signal") {
    // beta -> 0: output -> x
    const NoiseSchedule s = build_linear(1, 1e-12, 1e-12);
    PinnedNoise zero({0.0});
    const Sample out = forward_step(Sample{{2.0, -1.0}, 0}, s, zero);
    CHECK(out.t == 1);
    CHECK(out.x[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(out.x[1] == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("forward_step hand value with pinned noise") {
    // d=1, x=2, beta=0.19, eps pinned to 0 -> 2*sqrt(0.81) = 1.8
    const NoiseSchedule s = build_linear(1, 0.19, 0.19);
    PinnedNoise zero({0.0});
    const Sample out = forward_step(Sample{{2.0}, 0}, s, zero);
    CHECK(out.x[0] == doctest::Approx(1.8).epsilon(1e-15));
}

TEST_CASE("forward_step from zero has variance beta_t") {
    const NoiseSchedule s = build_linear(1, 0.3, 0.3);
    RngStream rng(7);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const Sample out = forward_step(Sample{{0.0}, 0}, s, rng);
        sum += out.x[0];
        sum2 += out.x[0] * out.x[0];
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double se_mean = std::sqrt(0.3 / n);
    const double se_var = 0.3 * std::sqrt(2.0 / n);
    CHECK(std::abs(mean) < 3.0 * se_mean);
    CHECK(std::abs(var - 0.3) < 3.0 * se_var);
}

TEST_CASE("forward_step rejects stepping past T") {
    const NoiseSchedule s = build_linear(2, 0.1, 0.1);
    PinnedNoise zero({0.0});
    CHECK_THROWS_AS(forward_step(Sample{{1.0}, 2}, s, zero), ValidationError);
}

TEST_CASE("forward_jump: t_target = 0 is the identity") {
    const NoiseSchedule s = build_linear(10, 1e-4, 0.02);
    RngStream rng(1);
    const Sample x0{{1.0, 2.0, 3.0}, 0};
    const Sample out = forward_jump(x0, 0, s, rng);
    CHECK(out.x == x0.x);
    CHECK(out.t == 0);
}

TEST_CASE("forward_jump hand value with pinned noise") {
    // x0=1, T=2, beta=[0.5,0.5], t=2, eps=0 -> sqrt(0.25) = 0.5
    const NoiseSchedule s = build_linear(2, 0.5, 0.5);
    PinnedNoise zero({0.0});
    const Sample out = forward_jump(Sample{{1.0}, 0}, 2, s, zero);
    CHECK(out.x[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out.t == 2);
}

TEST_CASE("forward_jump at full depth is near standard normal") {
    const NoiseSchedule s = build_linear(1000, 1e-4, 0.02);
    RngStream rng(99);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const Sample out = forward_jump(Sample{{0.0}, 0}, 1000, s, rng);
        sum += out.x[0];
        sum2 += out.x[0] * out.x[0];
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("forward_jump rejects bad inputs") {
    const NoiseSchedule s = build_linear(5, 0.1, 0.1);
    RngStream rng(2);
    CHECK_THROWS_AS(forward_jump(Sample{{1.0}, 1}, 3, s, rng), ValidationError);
    CHECK_THROWS_AS(forward_jump(Sample{{1.0}, 0}, 6, s, rng), ValidationError);
    CHECK_THROWS_AS(forward_jump(Sample{{1.0}, 0}, -1, s, rng), ValidationError);
}

TEST_CASE("iterated steps match the closed-form jump in distribution") {
    // Eq.1 vs Eq.2 at modest size; the acceptance suite runs the full version.
    const NoiseSchedule s = build_linear(50, 1e-3, 0.05);
    const std::vector<double> x0{0.7, -1.2};
    const int n = 20000;
    const int t = 25;

    double m_step[2] = {0, 0}, m_jump[2] = {0, 0};
    double v_step[2] = {0, 0}, v_jump[2] = {0, 0};
    RngStream rng_a(11), rng_b(12);
    for (int i = 0; i < n; ++i) {
        Sample a{x0, 0};
        for (int j = 0; j < t; ++j) a = forward_step(a, s, rng_a);
        const Sample b = forward_jump(Sample{x0, 0}, t, s, rng_b);
        for (int c = 0; c < 2; ++c) {
            m_step[c] += a.x[c];
            m_jump[c] += b.x[c];
            v_step[c] += a.x[c] * a.x[c];
            v_jump[c] += b.x[c] * b.x[c];
        }
    }
    for (int c = 0; c < 2; ++c) {
        m_step[c] /= n;
        m_jump[c] /= n;
        v_step[c] = v_step[c] / n - m_step[c] * m_step[c];
        v_jump[c] = v_jump[c] / n - m_jump[c] * m_jump[c];
        const double se_mean = std::sqrt(2.0 * (1.0 - s.alpha(t)) / n);
        const double se_var = (1.0 - s.alpha(t)) * std::sqrt(2.0 / n) * std::sqrt(2.0);
        CHECK(std::abs(m_step[c] - m_jump[c]) < 4.0 * se_mean);
        CHECK(std::abs(v_step[c] - v_jump[c]) < 4.0 * se_var);
    }
}

TEST_CASE("deterministic replay: same seed, same bits") {
    const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
    RngStream a(555), b(555);
    const Sample x0{{0.1, 0.2, 0.3}, 0};
    const Sample ra = forward_jump(x0, 60, s, a);
    const Sample rb = forward_jump(x0, 60, s, b);
    CHECK(ra.x == rb.x);
}
