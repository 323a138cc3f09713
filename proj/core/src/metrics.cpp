#include "boomerang/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "boomerang/errors.hpp"
#include "boomerang/parallel.hpp"
#include "boomerang/rng.hpp"
#include "boomerang/sampler.hpp"

namespace bmk {

namespace {

using Mat = std::vector<std::vector<double>>;

void check_matrix(const Mat& m, const char* who) {
    if (m.empty()) throw ValidationError(std::string(who) + ": empty sample set");
    const std::size_t d = m[0].size();
    for (const auto& row : m)
        if (row.size() != d)
            throw ValidationError(std::string(who) + ": ragged sample set");
}

double sq_dist(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    return s;
}

std::vector<double> column_means(const Mat& m) {
    const std::size_t d = m[0].size();
    std::vector<double> mu(d, 0.0);
    for (const auto& row : m)
        for (std::size_t i = 0; i < d; ++i) mu[i] += row[i];
    for (double& v : mu) v /= static_cast<double>(m.size());
    return mu;
}

// covariance (denominator n) flattened row-major
std::vector<double> covariance(const Mat& m, const std::vector<double>& mu) {
    const std::size_t d = m[0].size();
    std::vector<double> cov(d * d, 0.0);
    for (const auto& row : m) {
        for (std::size_t i = 0; i < d; ++i) {
            const double ci = row[i] - mu[i];
            for (std::size_t j = i; j < d; ++j) cov[i * d + j] += ci * (row[j] - mu[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            cov[i * d + j] /= static_cast<double>(m.size());
            cov[j * d + i] = cov[i * d + j];
        }
    return cov;
}

// Gram matrix over the pooled rows [a; b].
std::vector<double> rbf_gram(const Mat& a, const Mat& b, double bandwidth) {
    const std::size_t n = a.size() + b.size();
    const double inv = -1.0 / (2.0 * bandwidth * bandwidth);
    auto row_at = [&](std::size_t i) -> std::span<const double> {
        return i < a.size() ? a[i] : b[i - a.size()];
    };
    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        K[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = std::exp(inv * sq_dist(row_at(i), row_at(j)));
            K[i * n + j] = k;
            K[j * n + i] = k;
        }
    }
    return K;
}

// Unbiased and biased MMD^2 from a pooled Gram matrix and an index split.
std::pair<double, double> mmd_from_gram(const std::vector<double>& K, std::size_t n_total,
                                        const std::vector<std::size_t>& idx_a,
                                        const std::vector<std::size_t>& idx_b) {
    const double m = static_cast<double>(idx_a.size());
    const double n = static_cast<double>(idx_b.size());
    double saa = 0.0, sbb = 0.0, sab = 0.0;  // off-diagonal self sums, full cross sum
    for (std::size_t p = 0; p < idx_a.size(); ++p)
        for (std::size_t q = p + 1; q < idx_a.size(); ++q)
            saa += K[idx_a[p] * n_total + idx_a[q]];
    for (std::size_t p = 0; p < idx_b.size(); ++p)
        for (std::size_t q = p + 1; q < idx_b.size(); ++q)
            sbb += K[idx_b[p] * n_total + idx_b[q]];
    for (std::size_t p = 0; p < idx_a.size(); ++p)
        for (std::size_t q = 0; q < idx_b.size(); ++q)
            sab += K[idx_a[p] * n_total + idx_b[q]];
    saa *= 2.0;
    sbb *= 2.0;
    // U-statistic; the self term of a singleton set contributes 0
    double unbiased = -2.0 * sab / (m * n);
    if (m > 1) unbiased += saa / (m * (m - 1.0));
    if (n > 1) unbiased += sbb / (n * (n - 1.0));
    const double biased =
        (saa + m) / (m * m) + (sbb + n) / (n * n) - 2.0 * sab / (m * n);
    return {unbiased, biased};
}

}  // namespace

double median_pairwise_distance(const Mat& pooled) {
    check_matrix(pooled, "median_pairwise_distance");
    const std::size_t n = pooled.size();
    if (n < 2) return 1.0;
    std::vector<double> d2;
    d2.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d2.push_back(sq_dist(pooled[i], pooled[j]));
    std::nth_element(d2.begin(), d2.begin() + d2.size() / 2, d2.end());
    const double med = std::sqrt(d2[d2.size() / 2]);
    return med > 0.0 ? med : 1.0;
}

TwoSampleReport two_sample(const Mat& a, const Mat& b, double bandwidth) {
    check_matrix(a, "two_sample");
    check_matrix(b, "two_sample");
    if (a[0].size() != b[0].size())
        throw ValidationError("two_sample: sample sets have different dimensions");

    TwoSampleReport rep;
    rep.n_a = a.size();
    rep.n_b = b.size();

    const std::vector<double> mu_a = column_means(a);
    const std::vector<double> mu_b = column_means(b);
    rep.mean_diff_norm = std::sqrt(sq_dist(mu_a, mu_b));

    const std::vector<double> cov_a = covariance(a, mu_a);
    const std::vector<double> cov_b = covariance(b, mu_b);
    double fro = 0.0;
    for (std::size_t i = 0; i < cov_a.size(); ++i) {
        const double d = cov_a[i] - cov_b[i];
        fro += d * d;
    }
    rep.cov_frobenius_diff = std::sqrt(fro);

    if (bandwidth <= 0.0) {
        Mat pooled = a;
        pooled.insert(pooled.end(), b.begin(), b.end());
        bandwidth = median_pairwise_distance(pooled);
    }
    rep.bandwidth = bandwidth;

    const std::size_t n_total = a.size() + b.size();
    const std::vector<double> K = rbf_gram(a, b, bandwidth);
    std::vector<std::size_t> idx_a(a.size()), idx_b(b.size());
    std::iota(idx_a.begin(), idx_a.end(), 0);
    std::iota(idx_b.begin(), idx_b.end(), a.size());
    const auto [unbiased, biased] = mmd_from_gram(K, n_total, idx_a, idx_b);
    rep.mmd2_unbiased = unbiased;
    rep.mmd2_biased = biased;
    return rep;
}

std::vector<double> mmd_permutation_null(const Mat& a, const Mat& b, int n_permutations,
                                         std::uint64_t seed, double bandwidth) {
    check_matrix(a, "mmd_permutation_null");
    check_matrix(b, "mmd_permutation_null");
    if (n_permutations < 1)
        throw ValidationError("mmd_permutation_null: need >= 1 permutation");
    if (bandwidth <= 0.0) {
        Mat pooled = a;
        pooled.insert(pooled.end(), b.begin(), b.end());
        bandwidth = median_pairwise_distance(pooled);
    }
    const std::size_t n_total = a.size() + b.size();
    const std::vector<double> K = rbf_gram(a, b, bandwidth);

    std::vector<double> null(n_permutations);
    RngStream rng = derive_stream(seed, "mmd/permutation");
    std::vector<std::size_t> perm(n_total);
    std::iota(perm.begin(), perm.end(), 0);
    for (int p = 0; p < n_permutations; ++p) {
        rng.shuffle(perm);
        std::vector<std::size_t> idx_a(perm.begin(), perm.begin() + a.size());
        std::vector<std::size_t> idx_b(perm.begin() + a.size(), perm.end());
        null[p] = mmd_from_gram(K, n_total, idx_a, idx_b).first;
    }
    return null;
}

std::vector<double> Embedding::embed(std::span<const double> x) const {
    Mlp::Workspace ws;
    net_.forward_cached(x, ws);
    return ws.acts[net_.n_layers() - 1];
}

int TrainedClassifier::predict(std::span<const double> x) const {
    const std::vector<double> logits = net.forward(x);
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                            logits.begin());
}

TrainedClassifier train_classifier(const LabeledDataset& data, const ClassifierConfig& cfg) {
    if (data.size() == 0) throw ValidationError("train_classifier: empty dataset");
    if (data.x.size() != data.y.size())
        throw ValidationError("train_classifier: feature/label count mismatch");
    if (data.n_classes < 2) throw ValidationError("train_classifier: need >= 2 classes");
    const int d = static_cast<int>(data.x[0].size());

    // holdout split
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream split_rng = derive_stream(cfg.seed, "classifier/split");
    split_rng.shuffle(order);
    const std::size_t n_hold =
        static_cast<std::size_t>(cfg.holdout_fraction * static_cast<double>(data.size()));
    const std::size_t n_train = data.size() - n_hold;
    if (n_train == 0) throw ValidationError("train_classifier: holdout leaves no data");

    std::vector<int> widths;
    widths.push_back(d);
    for (int i = 0; i < cfg.n_hidden; ++i) widths.push_back(cfg.hidden_width);
    widths.push_back(data.n_classes);
    Mlp net(widths, derive_seed(cfg.seed, "classifier/init"));

    std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
    std::vector<double> grad(net.n_params());
    Mlp::Workspace ws;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        RngStream shuffle_rng = derive_stream(cfg.seed, "classifier/shuffle", epoch);
        shuffle_rng.shuffle(train_idx);
        double epoch_loss = 0.0;
        std::size_t processed = 0;
        while (processed < train_idx.size()) {
            const std::size_t batch =
                std::min<std::size_t>(cfg.batch_size, train_idx.size() - processed);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t i = train_idx[processed + b];
                const std::vector<double>& logits = net.forward_cached(data.x[i], ws);
                // softmax cross-entropy
                const double mx = *std::max_element(logits.begin(), logits.end());
                double z = 0.0;
                for (double v : logits) z += std::exp(v - mx);
                const double logz = mx + std::log(z);
                epoch_loss += logz - logits[data.y[i]];
                std::vector<double> delta(logits.size());
                for (std::size_t c = 0; c < logits.size(); ++c) {
                    const double p = std::exp(logits[c] - logz);
                    delta[c] = (p - (static_cast<int>(c) == data.y[i] ? 1.0 : 0.0)) /
                               static_cast<double>(batch);
                }
                net.backward(ws, delta, grad);
            }
            net.add_scaled(grad, -cfg.learning_rate);
            processed += batch;
        }
        if (!std::isfinite(epoch_loss) || !net.params_finite())
            throw NumericalError("train_classifier: diverged at epoch " +
                                 std::to_string(epoch));
    }

    TrainedClassifier out{std::move(net), data.n_classes, 0.0};
    if (n_hold > 0) {
        std::size_t correct = 0;
        for (std::size_t i = n_train; i < data.size(); ++i) {
            const std::size_t idx = order[i];
            if (out.predict(data.x[idx]) == data.y[idx]) ++correct;
        }
        out.holdout_accuracy = static_cast<double>(correct) / static_cast<double>(n_hold);
    }
    return out;
}

Embedding train_embedding(const LabeledDataset& data, const ClassifierConfig& cfg,
                          double* holdout_accuracy) {
    TrainedClassifier clf = train_classifier(data, cfg);
    if (holdout_accuracy) *holdout_accuracy = clf.holdout_accuracy;
    return clf.embedding();
}

std::vector<double> boomerang_distances(const Mat& data, const Denoiser& den,
                                        const NoiseSchedule& sched, double ratio,
                                        std::uint64_t seed, const Embedding* embed,
                                        int n_threads) {
    check_matrix(data, "boomerang_distances");
    if (ratio < 0.0 || ratio > 1.0)
        throw ValidationError("boomerang_distances: ratio outside [0, 1]");
    BoomerangConfig cfg;
    cfg.t_boom = static_cast<int>(std::lround(ratio * sched.T()));
    cfg.seed = seed;
    std::vector<double> dist(data.size());
    parallel_for(data.size(), n_threads, [&](std::size_t i) {
        Sample x0{data[i], 0};
        const Sample out = boomerang(x0, cfg, den, sched, i);
        if (embed) {
            dist[i] = std::sqrt(sq_dist(embed->embed(data[i]), embed->embed(out.x)));
        } else {
            dist[i] = std::sqrt(sq_dist(data[i], out.x));
        }
    });
    return dist;
}

double auto_threshold(std::vector<double> distances, double percentile) {
    if (distances.empty()) throw ValidationError("auto_threshold: no distances");
    const double f = std::clamp(percentile, 0.0, 100.0) / 100.0;
    const std::size_t k = std::min(
        distances.size() - 1,
        static_cast<std::size_t>(f * static_cast<double>(distances.size())));
    std::nth_element(distances.begin(), distances.begin() + k, distances.end());
    return distances[k];
}

std::vector<LocalityReport> locality_sweep(const Mat& data, const Denoiser& den,
                                           const NoiseSchedule& sched,
                                           const std::vector<double>& ratios,
                                           double threshold, std::uint64_t seed,
                                           const Embedding* embed, int n_threads) {
    check_matrix(data, "locality_sweep");
    std::vector<LocalityReport> reports;
    reports.reserve(ratios.size());
    for (double ratio : ratios) {
        const std::vector<double> dist =
            boomerang_distances(data, den, sched, ratio, seed, embed, n_threads);
        LocalityReport rep;
        rep.t_boom_ratio = ratio;
        const double n = static_cast<double>(dist.size());
        double mean = 0.0;
        for (double v : dist) mean += v;
        mean /= n;
        double var = 0.0;
        std::size_t over = 0;
        for (double v : dist) {
            var += (v - mean) * (v - mean);
            if (v > threshold) ++over;
        }
        var = (dist.size() > 1) ? var / (n - 1.0) : 0.0;
        rep.mean_distance = mean;
        rep.std_error = std::sqrt(var / n);
        rep.frac_over_threshold = static_cast<double>(over) / n;
        reports.push_back(rep);
    }
    return reports;
}

}  // namespace bmk
