#include "boomerang/datasets.hpp"

#include <cmath>
#include <numbers>

#include "boomerang/errors.hpp"
#include "boomerang/rng.hpp"

namespace bmk {

GaussianMixture gauss1_mixture(int d) {
    if (d < 1) throw ValidationError("gauss1_mixture: d must be >= 1");
    GaussianMixture g;
    g.weights = {1.0};
    g.means = {std::vector<double>(d, 0.0)};
    g.variances = {1.0};
    return g;
}

GaussianMixture gmm2_mixture(double mean_scale, double variance, int d) {
    if (d < 1) throw ValidationError("gmm2_mixture: d must be >= 1");
    if (variance <= 0.0) throw ValidationError("gmm2_mixture: variance must be > 0");
    GaussianMixture g;
    g.weights = {0.5, 0.5};
    std::vector<double> mu_pos(d, 0.0), mu_neg(d, 0.0);
    mu_pos[0] = mean_scale;
    mu_neg[0] = -mean_scale;
    g.means = {mu_pos, mu_neg};
    g.variances = {variance, variance};
    return g;
}

GaussianMixture bumps16_mixture(double pixel_noise_sd) {
    if (pixel_noise_sd <= 0.0)
        throw ValidationError("bumps16_mixture: pixel noise must be > 0");
    const int side = kBumps16Side;
    // prototype grid: 4x4 centers x 3 widths = 48 components
    const double centers[] = {3.5, 6.0, 8.5, 11.5};
    const double widths[] = {1.2, 2.0, 3.0};
    const double amplitude = 0.85;
    const double background = 0.05;

    GaussianMixture g;
    for (double cy : centers) {
        for (double cx : centers) {
            for (double w : widths) {
                std::vector<double> img(side * side);
                for (int y = 0; y < side; ++y) {
                    for (int x = 0; x < side; ++x) {
                        const double dy = y - cy, dx = x - cx;
                        img[y * side + x] =
                            background +
                            amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
                    }
                }
                g.means.push_back(std::move(img));
                g.variances.push_back(pixel_noise_sd * pixel_noise_sd);
            }
        }
    }
    g.weights.assign(g.means.size(), 1.0 / static_cast<double>(g.means.size()));
    return g;
}

std::vector<std::vector<double>> sample_mixture(const GaussianMixture& gmm, int n,
                                                std::uint64_t seed) {
    gmm.validate();
    std::vector<std::vector<double>> out;
    out.reserve(n);
    RngStream rng = derive_stream(seed, "dataset/mixture");
    for (int i = 0; i < n; ++i) out.push_back(gmm.sample(rng));
    return out;
}

LabeledDataset sample_mixture_labeled(const GaussianMixture& gmm, int n, std::uint64_t seed) {
    gmm.validate();
    LabeledDataset ds;
    ds.n_classes = gmm.components();
    ds.x.reserve(n);
    ds.y.reserve(n);
    RngStream rng = derive_stream(seed, "dataset/mixture");
    for (int i = 0; i < n; ++i) {
        int k = 0;
        ds.x.push_back(gmm.sample(rng, &k));
        ds.y.push_back(k);
    }
    return ds;
}

LabeledDataset make_moons(int n, std::uint64_t seed, double noise) {
    if (n < 1) throw ValidationError("make_moons: n must be >= 1");
    LabeledDataset ds;
    ds.n_classes = 2;
    ds.x.reserve(n);
    ds.y.reserve(n);
    RngStream rng = derive_stream(seed, "dataset/moons");
    for (int i = 0; i < n; ++i) {
        const int label = (i % 2 == 0) ? 0 : 1;
        const double theta = rng.uniform01() * std::numbers::pi;
        double px, py;
        if (label == 0) {
            px = std::cos(theta);
            py = std::sin(theta);
        } else {
            px = 1.0 - std::cos(theta);
            py = 0.5 - std::sin(theta);
        }
        double jitter[2];
        rng.standard_normal(jitter);
        ds.x.push_back({px + noise * jitter[0], py + noise * jitter[1]});
        ds.y.push_back(label);
    }
    return ds;
}

std::vector<std::vector<double>> make_builtin(const std::string& name, int n,
                                              std::uint64_t seed) {
    if (name == "gauss1") return sample_mixture(gauss1_mixture(), n, seed);
    if (name == "gmm2") return sample_mixture(gmm2_mixture(), n, seed);
    if (name == "bumps16") return sample_mixture(bumps16_mixture(), n, seed);
    if (name == "moons") return make_moons(n, seed).x;
    throw ValidationError("unknown builtin dataset: " + name);
}

}  // namespace bmk
