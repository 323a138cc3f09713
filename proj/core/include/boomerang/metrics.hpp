#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boomerang/datasets.hpp"
#include "boomerang/denoiser.hpp"
#include "boomerang/mlp.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// One row of a locality sweep (the embedding-distance-vs-t_boom curve).
struct LocalityReport {
    double t_boom_ratio = 0.0;
    double mean_distance = 0.0;
    double std_error = 0.0;
    double frac_over_threshold = 0.0;
};

// Moment and kernel two-sample summary; the desk-scale stand-in for
// learned perceptual distances. mmd2_unbiased is the U-statistic (used for
// permutation tests); mmd2_biased the V-statistic (exactly 0 for identical
// sets).
struct TwoSampleReport {
    double mean_diff_norm = 0.0;
    double cov_frobenius_diff = 0.0;
    double mmd2_unbiased = 0.0;
    double mmd2_biased = 0.0;
    double bandwidth = 0.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

// RBF-kernel two-sample report, k(u, v) = exp(-|u-v|^2 / (2 bw^2)).
// bandwidth <= 0 selects the median pairwise distance over the pooled data.
TwoSampleReport two_sample(const std::vector<std::vector<double>>& a,
                           const std::vector<std::vector<double>>& b,
                           double bandwidth = 0.0);

// Null distribution of the unbiased MMD^2 under label permutations of the
// pooled sample (fixed bandwidth across permutations).
std::vector<double> mmd_permutation_null(const std::vector<std::vector<double>>& a,
                                         const std::vector<std::vector<double>>& b,
                                         int n_permutations, std::uint64_t seed,
                                         double bandwidth = 0.0);

double median_pairwise_distance(const std::vector<std::vector<double>>& pooled);

// Learned feature map: the penultimate layer of a small classifier. The
// desk-scale stand-in for pretrained face-recognition embeddings.
class Embedding {
public:
    Embedding() = default;
    explicit Embedding(Mlp net) : net_(std::move(net)) {}

    int input_dim() const { return net_.input_dim(); }
    int dim() const { return net_.widths()[net_.n_layers() - 1]; }
    std::vector<double> embed(std::span<const double> x) const;

    const Mlp& net() const { return net_; }

private:
    Mlp net_;
};

struct ClassifierConfig {
    int hidden_width = 32;
    int n_hidden = 2;
    int epochs = 200;
    int batch_size = 16;
    double learning_rate = 0.05;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct TrainedClassifier {
    Mlp net;
    int n_classes = 0;
    double holdout_accuracy = 0.0;

    int predict(std::span<const double> x) const;
    Embedding embedding() const { return Embedding(net); }
};

// Softmax cross-entropy MLP classifier on the labeled dataset, trained with
// the same hand-rolled machinery as the denoiser. Holdout split and all
// shuffles derive from cfg.seed. Throws NumericalError on divergence.
TrainedClassifier train_classifier(const LabeledDataset& data, const ClassifierConfig& cfg);

// train_classifier wrapper returning the penultimate-layer feature map;
// holdout accuracy reported through *holdout_accuracy when non-null.
Embedding train_embedding(const LabeledDataset& data, const ClassifierConfig& cfg,
                          double* holdout_accuracy = nullptr);

// Runs Boomerang at every ratio (t_boom = round(ratio * T)) over the whole
// dataset and summarizes distances between originals and outputs, in
// embedding space when embed is given, else Euclidean in data space.
std::vector<LocalityReport> locality_sweep(const std::vector<std::vector<double>>& data,
                                           const Denoiser& den, const NoiseSchedule& sched,
                                           const std::vector<double>& ratios,
                                           double threshold, std::uint64_t seed,
                                           const Embedding* embed = nullptr,
                                           int n_threads = 1);

// Documented threshold rule for sweeps without an explicit threshold: the
// 5th percentile of the distances observed at the smallest positive ratio.
double auto_threshold(std::vector<double> distances, double percentile = 5.0);

// Distances between originals and their Boomerang outputs at one ratio;
// building block of locality_sweep, exposed for threshold calibration.
std::vector<double> boomerang_distances(const std::vector<std::vector<double>>& data,
                                        const Denoiser& den, const NoiseSchedule& sched,
                                        double ratio, std::uint64_t seed,
                                        const Embedding* embed = nullptr, int n_threads = 1);

}  // namespace bmk
