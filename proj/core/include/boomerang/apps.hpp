#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boomerang/datasets.hpp"
#include "boomerang/denoiser.hpp"
#include "boomerang/metrics.hpp"
#include "boomerang/sampler.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// ---- resampling operators -------------------------------------------------

// Decimation by averaging: groups of k consecutive entries (1-d) or k x k
// blocks (images). Lengths must be divisible by k; anything else is
// rejected rather than padded. k >= 2.
std::vector<double> downsample(const std::vector<double>& x, int k);
std::vector<double> downsample_image(const std::vector<double>& img, int width, int height,
                                     int k);

// Linear interpolation back to the ambient size, separable for images.
// Convention: input sample i sits at the center of its block, output j is
// interpolated at position (j + 0.5)/k - 0.5 with linear extrapolation past
// the first/last center. Block-averaging an upsampled linear ramp recovers
// the input exactly.
std::vector<double> upsample_linear(const std::vector<double>& x_ds, int k);
std::vector<double> upsample_linear_image(const std::vector<double>& img, int ds_width,
                                          int ds_height, int k);

// ---- application 1: anonymization ------------------------------------------

struct AnonymizeResult {
    std::vector<std::vector<double>> data;  // record i replaced by its Boomerang output
    LocalityReport report;                  // distances to the originals
};

AnonymizeResult anonymize_dataset(const std::vector<std::vector<double>>& data, int t_boom,
                                  const Denoiser& den, const NoiseSchedule& sched,
                                  std::uint64_t seed, double threshold = 0.0,
                                  int n_threads = 1);

// ---- application 2: data augmentation ---------------------------------------

// Per-epoch mixing protocol: each training example is independently
// replaced by its pregenerated Boomerang copy with mix_probability. Copies
// are generated once before training (pregenerated must stay true).
struct AugmentationProtocol {
    double mix_probability = 0.5;
    int t_boom = 0;
    bool pregenerated = true;
};

struct AccuracyCell {
    std::string condition;  // "baseline" | "boomerang" | "synthetic"
    int seed_index = 0;
    double accuracy = 0.0;
};

struct ConditionSummary {
    double mean = 0.0;
    double std_error = 0.0;
};

struct AugmentationResult {
    std::vector<AccuracyCell> cells;
    ConditionSummary baseline;
    ConditionSummary boomerang_augmented;
    ConditionSummary synthetic_only;
};

// Trains, per seed, three classifiers sharing initialization and shuffle
// streams: (a) on the raw training set, (b) with 0.5-style Boomerang
// mixing, (c) purely on t_boom = T outputs that keep the original labels.
// Test accuracy is evaluated on `test`.
AugmentationResult augmentation_eval(const LabeledDataset& train, const LabeledDataset& test,
                                     const AugmentationProtocol& protocol,
                                     const ClassifierConfig& clf_cfg, int n_seeds,
                                     const Denoiser& den, const NoiseSchedule& sched,
                                     std::uint64_t seed, int n_threads = 1);

// ---- application 3: perceptual resolution enhancement ----------------------

// One enhancement task. x_ds / x_up may be left empty; they are then
// derived from x_true by downsampling / linear interpolation. width and
// height describe image-shaped data; both zero means a flat vector.
struct PreTask {
    std::vector<double> x_true;
    std::vector<double> x_ds;
    std::vector<double> x_up;
    int k = 2;
    int t_boom = 0;
    int n_cascade = 1;
    int width = 0;
    int height = 0;
};

struct PreResult {
    std::vector<double> enhanced;
    std::vector<double> x_up;
    double mse_to_true = 0.0;
    double interp_mse = 0.0;
};

PreResult pre_enhance(const PreTask& task, const Denoiser& den, const NoiseSchedule& sched,
                      std::uint64_t seed, std::uint64_t chain_index = 0);

struct PreBatchResult {
    std::vector<std::vector<double>> enhanced;
    std::vector<std::vector<double>> interpolated;
    double mean_mse_enhanced = 0.0;
    double mean_mse_interp = 0.0;
    TwoSampleReport enhanced_vs_clean;
    TwoSampleReport interp_vs_clean;
};

// Runs pre_enhance over a batch and scores it distributionally against a
// clean reference batch.
PreBatchResult pre_enhance_batch(const std::vector<std::vector<double>>& x_true_batch, int k,
                                 int t_boom, int n_cascade, const Denoiser& den,
                                 const NoiseSchedule& sched, std::uint64_t seed,
                                 const std::vector<std::vector<double>>& clean_reference,
                                 int image_side = 0, int n_threads = 1);

double mean_squared_error(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace bmk
