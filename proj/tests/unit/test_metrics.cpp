#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "boomerang/datasets.hpp"
#include "boomerang/denoiser.hpp"
#include "boomerang/errors.hpp"
#include "boomerang/metrics.hpp"
#include "boomerang/rng.hpp"

using namespace bmk;

namespace {

std::vector<std::vector<double>> gaussian_cloud(int n, int d, std::uint64_t seed,
                                                double shift = 0.0) {
    RngStream rng(seed);
    std::vector<std::vector<double>> out(n, std::vector<double>(d));
    for (auto& row : out) {
        rng.standard_normal(row);
        for (double& v : row) v += shift;
    }
    return out;
}

}  // namespace

TEST_CASE("identical sets: biased MMD^2 is zero to cancellation") {
    const auto a = gaussian_cloud(300, 3, 1);
    const TwoSampleReport rep = two_sample(a, a);
    CHECK(std::abs(rep.mmd2_biased) < 1e-10);
    CHECK(rep.mean_diff_norm == 0.0);
    CHECK(rep.cov_frobenius_diff == 0.0);
    CHECK(rep.bandwidth > 0.0);
}

TEST_CASE("same distribution: MMD^2 within 4 permutation SEs of zero") {
    const auto a = gaussian_cloud(2000, 2, 11);
    const auto b = gaussian_cloud(2000, 2, 12);
    const TwoSampleReport rep = two_sample(a, b);
    const auto null = mmd_permutation_null(a, b, 60, 5, rep.bandwidth);
    double mu = 0.0;
    for (double v : null) mu += v;
    mu /= null.size();
    double sd = 0.0;
    for (double v : null) sd += (v - mu) * (v - mu);
    sd = std::sqrt(sd / (null.size() - 1));
    CHECK(std::abs(rep.mmd2_unbiased) < 4.0 * sd);
}

TEST_CASE("separated distributions: MMD^2 far above the permutation null") {
    const auto a = gaussian_cloud(500, 2, 21);
    const auto b = gaussian_cloud(500, 2, 22, 3.0);
    const TwoSampleReport rep = two_sample(a, b);
    auto null = mmd_permutation_null(a, b, 100, 6, rep.bandwidth);
    std::sort(null.begin(), null.end());
    const double q95 = null[static_cast<std::size_t>(0.95 * null.size())];
    CHECK(rep.mmd2_unbiased > 10.0 * std::max(q95, 1e-12));
    CHECK(rep.mean_diff_norm > 3.0);
}

TEST_CASE("two_sample rejects dimension mismatches and empties") {
    const auto a = gaussian_cloud(10, 2, 1);
    const auto b = gaussian_cloud(10, 3, 2);
    CHECK_THROWS_AS(two_sample(a, b), ValidationError);
    CHECK_THROWS_AS(two_sample({}, b), ValidationError);
}

TEST_CASE("locality sweep: ratio 0 is the identity") {
    const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
    const GaussianMixture g = gmm2_mixture();
    const OracleDenoiser den(g, s);
    const auto data = sample_mixture(g, 50, 9);
    const auto reports = locality_sweep(data, den, s, {0.0}, 0.5, 123);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].mean_distance == 0.0);
    CHECK(reports[0].frac_over_threshold == 0.0);
    CHECK(reports[0].std_error == 0.0);
}

TEST_CASE("locality sweep: mean distance strictly increases on gmm2") {
    const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
    const GaussianMixture g = gmm2_mixture();
    const OracleDenoiser den(g, s);
    const auto data = sample_mixture(g, 600, 10);
    const std::vector<double> ratios{0.1, 0.3, 0.5, 0.7, 0.9};
    const auto reports = locality_sweep(data, den, s, ratios, 0.0, 77, nullptr, 4);
    REQUIRE(reports.size() == ratios.size());
    for (std::size_t i = 1; i < reports.size(); ++i) {
        const double gap = reports[i].mean_distance - reports[i - 1].mean_distance;
        const double se = std::hypot(reports[i].std_error, reports[i - 1].std_error);
        CHECK(gap > 2.0 * se);
    }
}

TEST_CASE("documented threshold rule reaches > 0.9 coverage at ratio 0.9") {
    const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
    const GaussianMixture g = gmm2_mixture();
    const OracleDenoiser den(g, s);
    const auto data = sample_mixture(g, 500, 14);
    // threshold: 5th percentile of the distances at the smallest ratio
    const auto d01 = boomerang_distances(data, den, s, 0.1, 99);
    const double threshold = auto_threshold(d01, 5.0);
    const auto reports = locality_sweep(data, den, s, {0.9}, threshold, 99);
    CHECK(reports[0].frac_over_threshold > 0.9);
}

TEST_CASE("standard error shrinks like 1/sqrt(n)") {
    const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
    const GaussianMixture g = gmm2_mixture();
    const OracleDenoiser den(g, s);
    const auto small = sample_mixture(g, 400, 3);
    const auto large = sample_mixture(g, 1600, 3);
    const auto r_small = locality_sweep(small, den, s, {0.5}, 0.0, 5);
    const auto r_large = locality_sweep(large, den, s, {0.5}, 0.0, 5);
    const double ratio = r_small[0].std_error / r_large[0].std_error;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("embedding separates well-separated blobs") {
    LabeledDataset ds;
    ds.n_classes = 2;
    RngStream rng(42);
    for (int i = 0; i < 400; ++i) {
        std::vector<double> x(2);
        rng.standard_normal(x);
        const int label = i % 2;
        x[0] += label == 0 ? -4.0 : 4.0;
        ds.x.push_back(x);
        ds.y.push_back(label);
    }
    ClassifierConfig cfg;
    cfg.seed = 5;
    double acc = 0.0;
    const Embedding emb = train_embedding(ds, cfg, &acc);
    CHECK(acc > 0.95);

    // embedding distance of a point to itself is zero
    const auto e = emb.embed(ds.x[0]);
    double self = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) self += (e[i] - e[i]) * (e[i] - e[i]);
    CHECK(self == 0.0);
    CHECK(emb.dim() == cfg.hidden_width);
}

TEST_CASE("locality sweep can run in embedding space") {
    const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
    const GaussianMixture g = gmm2_mixture();
    const OracleDenoiser den(g, s);
    const LabeledDataset labeled = sample_mixture_labeled(g, 300, 61);
    ClassifierConfig cfg;
    cfg.seed = 62;
    const Embedding emb = train_embedding(labeled, cfg);

    const auto reports =
        locality_sweep(labeled.x, den, s, {0.0, 0.5}, 0.0, 63, &emb);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].mean_distance == 0.0);  // identity maps to zero embedding distance
    CHECK(reports[1].mean_distance > 0.0);
}

TEST_CASE("shuffled labels give chance accuracy") {
    LabeledDataset ds;
    ds.n_classes = 2;
    RngStream rng(52);
    for (int i = 0; i < 400; ++i) {
        std::vector<double> x(2);
        rng.standard_normal(x);
        x[0] += (i % 2 == 0) ? -4.0 : 4.0;
        ds.x.push_back(x);
        ds.y.push_back(static_cast<int>(rng.uniform_below(2)));  // labels carry no signal
    }
    ClassifierConfig cfg;
    cfg.seed = 6;
    const TrainedClassifier clf = train_classifier(ds, cfg);
    CHECK(clf.holdout_accuracy > 0.4 - 0.1);
    CHECK(clf.holdout_accuracy < 0.6 + 0.1);
}

TEST_CASE("classifier training is deterministic per seed") {
    const LabeledDataset ds = make_moons(200, 8);
    ClassifierConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 99;
    const TrainedClassifier a = train_classifier(ds, cfg);
    const TrainedClassifier b = train_classifier(ds, cfg);
    CHECK(std::vector<double>(a.net.params().begin(), a.net.params().end()) ==
          std::vector<double>(b.net.params().begin(), b.net.params().end()));
    CHECK(a.holdout_accuracy == b.holdout_accuracy);
}

TEST_CASE("classifier rejects degenerate inputs") {
    LabeledDataset ds;
    ds.n_classes = 1;
    ds.x = {{0.0}};
    ds.y = {0};
    CHECK_THROWS_AS(train_classifier(ds, {}), ValidationError);
}
