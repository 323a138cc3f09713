#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boomerang/gmm.hpp"

namespace bmk {

struct LabeledDataset {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    int n_classes = 0;

    std::size_t size() const { return x.size(); }
};

// Builtin targets. Parameter defaults are configuration choices, picked for
// clear multimodality at desk scale.

// Standard Gaussian N(0, I_d).
GaussianMixture gauss1_mixture(int d = 2);

// Two components at +-mean_scale * e1, isotropic variance, equal weights.
GaussianMixture gmm2_mixture(double mean_scale = 3.0, double variance = 0.5, int d = 2);

// 16x16 grayscale Gaussian-bump patterns: one mixture component per
// (center, width) prototype on a fixed grid, with isotropic pixel noise.
// The clean image distribution is therefore known in closed form.
GaussianMixture bumps16_mixture(double pixel_noise_sd = 0.05);
constexpr int kBumps16Side = 16;

// i.i.d. draws from a mixture; labels (when requested) are component ids.
std::vector<std::vector<double>> sample_mixture(const GaussianMixture& gmm, int n,
                                                std::uint64_t seed);
LabeledDataset sample_mixture_labeled(const GaussianMixture& gmm, int n, std::uint64_t seed);

// Two interleaved half-circles with Gaussian jitter; labels are moon ids.
LabeledDataset make_moons(int n, std::uint64_t seed, double noise = 0.1);

// Resolves a builtin unsupervised dataset by name: "gauss1", "gmm2",
// "moons", "bumps16". Throws ValidationError for unknown names.
std::vector<std::vector<double>> make_builtin(const std::string& name, int n,
                                              std::uint64_t seed);

}  // namespace bmk
