#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "boomerang/datasets.hpp"
#include "boomerang/errors.hpp"
#include "boomerang/mlp.hpp"
#include "boomerang/rng.hpp"

using namespace bmk;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("zero network predicts zero noise and f = x / sqrt(1 - beta)") {
    const NoiseSchedule s = build_linear(10, 0.01, 0.1);
    const MlpDenoiser den = MlpDenoiser::zeros(2, s, {});
    const std::vector<double> x{0.4, -1.1};
    for (int t : {1, 5, 10}) {
        const auto [eps, f] = den.forward(x, t);
        CHECK(eps[0] == 0.0);
        CHECK(eps[1] == 0.0);
        const double inv = 1.0 / std::sqrt(1.0 - s.beta(t));
        CHECK(f[0] == doctest::Approx(x[0] * inv).epsilon(1e-15));
        CHECK(f[1] == doctest::Approx(x[1] * inv).epsilon(1e-15));
    }
}

TEST_CASE("forward evaluation is deterministic") {
    const NoiseSchedule s = build_linear(20, 1e-3, 0.05);
    const MlpDenoiser den(3, s, {}, 77);
    const std::vector<double> x{0.1, 0.2, 0.3};
    const auto a = den.forward(x, 7);
    const auto b = den.forward(x, 7);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("conversion identity holds exactly as implemented") {
    const NoiseSchedule s = build_linear(15, 1e-3, 0.08);
    const MlpDenoiser den(2, s, {32, 1, 8}, 5);
    const std::vector<double> x{1.0, -0.5};
    for (int t : {1, 8, 15}) {
        const auto [eps, f] = den.forward(x, t);
        const double c = s.beta(t) / std::sqrt(1.0 - s.alpha(t));
        const double inv = 1.0 / std::sqrt(1.0 - s.beta(t));
        for (int i = 0; i < 2; ++i)
            CHECK(f[i] == doctest::Approx(inv * (x[i] - c * eps[i])).epsilon(1e-15));
    }
}

TEST_CASE("gradient check: random configurations stay below 1e-4") {
    const NoiseSchedule s = build_linear(10, 0.01, 0.1);
    RngStream rng(404);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 1 + static_cast<int>(rng.uniform_below(4));
        MlpDenoiserConfig cfg;
        cfg.hidden_width = 8 + static_cast<int>(rng.uniform_below(24));
        cfg.n_hidden = 1 + static_cast<int>(rng.uniform_below(2));
        cfg.time_features = 8;
        const MlpDenoiser den(d, s, cfg, rng.next_u64());
        std::vector<double> x(d), target(d);
        rng.standard_normal(x);
        rng.standard_normal(target);
        const int t = 1 + static_cast<int>(rng.uniform_below(10));
        const double err = gradient_check(den, x, t, target, rep);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("gradient check near the linear regime and determinism") {
    const NoiseSchedule s = build_linear(5, 0.05, 0.2);
    const MlpDenoiser zero = MlpDenoiser::zeros(2, s, {16, 1, 8});
    const std::vector<double> x{0.0, 0.0};
    const std::vector<double> target{0.3, -0.2};
    const double e1 = gradient_check(zero, x, 2, target, 9);
    const double e2 = gradient_check(zero, x, 2, target, 9);
    CHECK(e1 == e2);
    CHECK(e1 < 1e-6);
}

TEST_CASE("zero epochs returns the network unchanged") {
    const NoiseSchedule s = build_linear(10, 0.01, 0.1);
    MlpDenoiser den(2, s, {}, 11);
    const std::vector<double> before(den.net().params().begin(), den.net().params().end());
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto trace = train_mlp(den, {{0.0, 0.0}}, cfg);
    CHECK(trace.empty());
    const std::vector<double> after(den.net().params().begin(), den.net().params().end());
    CHECK(before == after);
}

TEST_CASE("single-point dataset: eps_hat approaches x_t / sqrt(1 - alpha_t)") {
    // with x0 = 0, x_t = sqrt(1 - alpha_t) * eps exactly
    const NoiseSchedule s = build_linear(100, 0.01, 0.05);
    MlpDenoiser den(2, s, {64, 2, 16}, 3);
    TrainConfig cfg;
    cfg.epochs = 4000;
    cfg.batch_size = 32;
    cfg.learning_rate = 0.05;
    cfg.seed = 12;
    std::vector<std::vector<double>> data(32, std::vector<double>{0.0, 0.0});
    train_mlp(den, data, cfg);

    RngStream rng(2025);
    double se = 0.0;
    int count = 0;
    for (int rep = 0; rep < 400; ++rep) {
        const int t = 80 + static_cast<int>(rng.uniform_below(21));  // large t
        std::vector<double> eps(2);
        rng.standard_normal(eps);
        const double sn = std::sqrt(1.0 - s.alpha(t));
        std::vector<double> x_t{sn * eps[0], sn * eps[1]};
        const auto eps_hat = den.epsilon(x_t, t);
        for (int i = 0; i < 2; ++i) {
            const double want = x_t[i] / sn;
            se += (eps_hat[i] - want) * (eps_hat[i] - want);
            ++count;
        }
    }
    CHECK(std::sqrt(se / count) < 0.1);
}

TEST_CASE("two-moons training: smoothed loss decreases start to finish") {
    const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
    MlpDenoiser den(2, s, {}, 21);
    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.batch_size = 64;
    cfg.learning_rate = 1e-3;
    cfg.seed = 22;
    const auto data = make_moons(2000, 23).x;
    const std::vector<double> trace = train_mlp(den, data, cfg);
    REQUIRE(trace.size() == 120);
    // 10-epoch windows at both ends
    double head = 0.0, tail = 0.0;
    for (int i = 0; i < 10; ++i) {
        head += trace[i];
        tail += trace[trace.size() - 1 - i];
    }
    CHECK(tail < head);
    CHECK(tail / 10.0 < trace.front());
}

TEST_CASE("training diverges loudly") {
    const NoiseSchedule s = build_linear(10, 0.01, 0.1);
    MlpDenoiser den(2, s, {}, 1);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 1e6;  // guaranteed blow-up
    std::vector<std::vector<double>> data(8, std::vector<double>{1.0, 1.0});
    CHECK_THROWS_AS(train_mlp(den, data, cfg), NumericalError);
}

TEST_CASE("train_mlp input validation") {
    const NoiseSchedule s = build_linear(10, 0.01, 0.1);
    MlpDenoiser den(2, s, {}, 1);
    CHECK_THROWS_AS(train_mlp(den, {}, {}), ValidationError);
    CHECK_THROWS_AS(train_mlp(den, {{1.0}}, {}), ValidationError);
}

TEST_CASE("checkpoint round trip is bit exact") {
    const NoiseSchedule s = build_linear(25, 1e-3, 0.04);
    const MlpDenoiser den(3, s, {24, 2, 8}, 5150);
    const auto path = temp_file("bmk_ckpt_roundtrip.bin");
    den.save(path);
    const MlpDenoiser loaded = MlpDenoiser::load(path, s);
    CHECK(std::vector<double>(den.net().params().begin(), den.net().params().end()) ==
          std::vector<double>(loaded.net().params().begin(), loaded.net().params().end()));
    CHECK(loaded.dim() == 3);
    CHECK(loaded.config().time_features == 8);
    CHECK(loaded.config().hidden_width == 24);
    const std::vector<double> x{0.5, -0.5, 1.0};
    CHECK(den.forward(x, 13).second == loaded.forward(x, 13).second);
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects garbage") {
    const NoiseSchedule s = build_linear(5, 0.01, 0.1);
    const auto path = temp_file("bmk_ckpt_bad.bin");
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOTAMAGIC and then some";
    }
    CHECK_THROWS_AS(MlpDenoiser::load(path, s), ValidationError);
    {
        // right magic, truncated header
        std::ofstream os(path, std::ios::binary);
        os << "BMRK1";
    }
    CHECK_THROWS_AS(MlpDenoiser::load(path, s), ValidationError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(MlpDenoiser::load(path, s), ValidationError);
}

TEST_CASE("time features are injective over the step grid") {
    const int T = 64;
    std::vector<std::vector<double>> feats;
    for (int t = 0; t <= T; ++t) feats.push_back(time_features(t, T, 16));
    for (std::size_t a = 0; a < feats.size(); ++a)
        for (std::size_t b = a + 1; b < feats.size(); ++b) CHECK(feats[a] != feats[b]);
    CHECK_THROWS_AS(time_features(1, 10, 3), ValidationError);
}
