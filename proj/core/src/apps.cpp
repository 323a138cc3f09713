#include "boomerang/apps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "boomerang/errors.hpp"
#include "boomerang/forward.hpp"
#include "boomerang/parallel.hpp"
#include "boomerang/rng.hpp"

namespace bmk {

namespace {

void check_factor(std::size_t n, int k, const char* who) {
    if (k < 2) throw ValidationError(std::string(who) + ": factor k must be >= 2");
    if (n == 0 || n % static_cast<std::size_t>(k) != 0)
        throw ValidationError(std::string(who) + ": length " + std::to_string(n) +
                              " not divisible by k = " + std::to_string(k));
}

}  // namespace

std::vector<double> downsample(const std::vector<double>& x, int k) {
    check_factor(x.size(), k, "downsample");
    std::vector<double> out(x.size() / k);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += x[i * k + j];
        out[i] = s / k;
    }
    return out;
}

std::vector<double> downsample_image(const std::vector<double>& img, int width, int height,
                                     int k) {
    if (width < 1 || height < 1 ||
        img.size() != static_cast<std::size_t>(width) * height)
        throw ValidationError("downsample_image: pixel count does not match dimensions");
    check_factor(width, k, "downsample_image");
    check_factor(height, k, "downsample_image");
    const int ow = width / k, oh = height / k;
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int dy = 0; dy < k; ++dy)
                for (int dx = 0; dx < k; ++dx) s += img[(y * k + dy) * width + (x * k + dx)];
            out[y * ow + x] = s / (k * k);
        }
    }
    return out;
}

std::vector<double> upsample_linear(const std::vector<double>& x_ds, int k) {
    if (k < 2) throw ValidationError("upsample_linear: factor k must be >= 2");
    if (x_ds.empty()) throw ValidationError("upsample_linear: empty input");
    const int n = static_cast<int>(x_ds.size());
    std::vector<double> out(static_cast<std::size_t>(n) * k);
    for (int j = 0; j < n * k; ++j) {
        if (n == 1) {
            out[j] = x_ds[0];
            continue;
        }
        const double p = (j + 0.5) / k - 0.5;
        // segment index clamped so edge positions extrapolate linearly
        int i0 = static_cast<int>(std::floor(p));
        i0 = std::clamp(i0, 0, n - 2);
        const double f = p - i0;
        out[j] = x_ds[i0] * (1.0 - f) + x_ds[i0 + 1] * f;
    }
    return out;
}

std::vector<double> upsample_linear_image(const std::vector<double>& img, int ds_width,
                                          int ds_height, int k) {
    if (ds_width < 1 || ds_height < 1 ||
        img.size() != static_cast<std::size_t>(ds_width) * ds_height)
        throw ValidationError("upsample_linear_image: pixel count does not match dimensions");
    // rows, then columns
    const int ow = ds_width * k;
    std::vector<double> rows(static_cast<std::size_t>(ow) * ds_height);
    std::vector<double> line(ds_width);
    for (int y = 0; y < ds_height; ++y) {
        for (int x = 0; x < ds_width; ++x) line[x] = img[y * ds_width + x];
        const std::vector<double> up = upsample_linear(line, k);
        std::copy(up.begin(), up.end(), rows.begin() + static_cast<std::size_t>(y) * ow);
    }
    const int oh = ds_height * k;
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    std::vector<double> col(ds_height);
    for (int x = 0; x < ow; ++x) {
        for (int y = 0; y < ds_height; ++y) col[y] = rows[static_cast<std::size_t>(y) * ow + x];
        const std::vector<double> up = upsample_linear(col, k);
        for (int y = 0; y < oh; ++y) out[static_cast<std::size_t>(y) * ow + x] = up[y];
    }
    return out;
}

double mean_squared_error(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw ValidationError("mean_squared_error: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

AnonymizeResult anonymize_dataset(const std::vector<std::vector<double>>& data, int t_boom,
                                  const Denoiser& den, const NoiseSchedule& sched,
                                  std::uint64_t seed, double threshold, int n_threads) {
    if (data.empty()) throw ValidationError("anonymize_dataset: empty dataset");
    if (t_boom < 0 || t_boom > sched.T())
        throw ValidationError("anonymize_dataset: t_boom outside [0, T]");

    BoomerangConfig cfg;
    cfg.t_boom = t_boom;
    cfg.seed = seed;

    AnonymizeResult res;
    res.data.resize(data.size());
    std::vector<double> dist(data.size());
    parallel_for(data.size(), n_threads, [&](std::size_t i) {
        const Sample out = boomerang(Sample{data[i], 0}, cfg, den, sched, i);
        double s = 0.0;
        for (std::size_t j = 0; j < out.x.size(); ++j) {
            const double d = out.x[j] - data[i][j];
            s += d * d;
        }
        dist[i] = std::sqrt(s);
        res.data[i] = out.x;
    });

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
    res.report.t_boom_ratio = static_cast<double>(t_boom) / sched.T();
    res.report.mean_distance = mean;
    res.report.std_error = dist.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    res.report.frac_over_threshold = static_cast<double>(over) / n;
    return res;
}

namespace {

double accuracy_on(const TrainedClassifier& clf, const LabeledDataset& test) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i)
        if (clf.predict(test.x[i]) == test.y[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

// Cross-entropy training over per-epoch views of the training inputs; the
// shared path for all three augmentation conditions so that condition
// differences come only from the data.
TrainedClassifier train_epochwise(
    const LabeledDataset& train, int n_classes, const ClassifierConfig& cfg,
    const std::function<const std::vector<double>&(int epoch, std::size_t idx)>& view) {
    const int d = static_cast<int>(train.x[0].size());
    std::vector<int> widths;
    widths.push_back(d);
    for (int i = 0; i < cfg.n_hidden; ++i) widths.push_back(cfg.hidden_width);
    widths.push_back(n_classes);
    Mlp net(widths, derive_seed(cfg.seed, "classifier/init"));

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(net.n_params());
    Mlp::Workspace ws;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        RngStream shuffle_rng = derive_stream(cfg.seed, "classifier/shuffle", epoch);
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t processed = 0;
        while (processed < order.size()) {
            const std::size_t batch =
                std::min<std::size_t>(cfg.batch_size, order.size() - processed);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t i = order[processed + b];
                const std::vector<double>& x = view(epoch, i);
                const std::vector<double>& logits = net.forward_cached(x, ws);
                const double mx = *std::max_element(logits.begin(), logits.end());
                double z = 0.0;
                for (double v : logits) z += std::exp(v - mx);
                const double logz = mx + std::log(z);
                epoch_loss += logz - logits[train.y[i]];
                std::vector<double> delta(logits.size());
                for (std::size_t c = 0; c < logits.size(); ++c) {
                    const double p = std::exp(logits[c] - logz);
                    delta[c] = (p - (static_cast<int>(c) == train.y[i] ? 1.0 : 0.0)) /
                               static_cast<double>(batch);
                }
                net.backward(ws, delta, grad);
            }
            net.add_scaled(grad, -cfg.learning_rate);
            processed += batch;
        }
        if (!std::isfinite(epoch_loss) || !net.params_finite())
            throw NumericalError("augmentation_eval: classifier diverged at epoch " +
                                 std::to_string(epoch));
    }
    return TrainedClassifier{std::move(net), n_classes, 0.0};
}

ConditionSummary summarize(const std::vector<double>& v) {
    ConditionSummary s;
    const double n = static_cast<double>(v.size());
    for (double x : v) s.mean += x;
    s.mean /= n;
    if (v.size() > 1) {
        double var = 0.0;
        for (double x : v) var += (x - s.mean) * (x - s.mean);
        s.std_error = std::sqrt(var / (n - 1.0) / n);
    }
    return s;
}

}  // namespace

AugmentationResult augmentation_eval(const LabeledDataset& train, const LabeledDataset& test,
                                     const AugmentationProtocol& protocol,
                                     const ClassifierConfig& clf_cfg, int n_seeds,
                                     const Denoiser& den, const NoiseSchedule& sched,
                                     std::uint64_t seed, int n_threads) {
    if (train.size() == 0 || test.size() == 0)
        throw ValidationError("augmentation_eval: empty train or test set");
    if (protocol.mix_probability < 0.0 || protocol.mix_probability > 1.0)
        throw ValidationError("augmentation_eval: mix_probability outside [0, 1]");
    if (!protocol.pregenerated)
        throw ValidationError("augmentation_eval: on-the-fly generation not supported");
    if (protocol.t_boom < 0 || protocol.t_boom > sched.T())
        throw ValidationError("augmentation_eval: t_boom outside [0, T]");
    if (n_seeds < 1) throw ValidationError("augmentation_eval: n_seeds must be >= 1");

    struct SeedOut {
        double baseline = 0.0, augmented = 0.0, synthetic = 0.0;
    };
    std::vector<SeedOut> per_seed(n_seeds);

    parallel_for(static_cast<std::size_t>(n_seeds), n_threads, [&](std::size_t s) {
        // Boomerang copies at protocol.t_boom and full-noise (t_boom = T)
        // synthetic replacements, both pregenerated and keeping the
        // original labels.
        BoomerangConfig copy_cfg;
        copy_cfg.t_boom = protocol.t_boom;
        copy_cfg.seed = derive_seed(seed, "augment/copies", s);
        BoomerangConfig synth_cfg;
        synth_cfg.t_boom = sched.T();
        synth_cfg.seed = derive_seed(seed, "augment/synthetic", s);

        std::vector<std::vector<double>> copies(train.size());
        LabeledDataset synthetic = train;
        for (std::size_t i = 0; i < train.size(); ++i) {
            copies[i] = boomerang(Sample{train.x[i], 0}, copy_cfg, den, sched, i).x;
            synthetic.x[i] = boomerang(Sample{train.x[i], 0}, synth_cfg, den, sched, i).x;
        }

        ClassifierConfig cfg = clf_cfg;
        cfg.seed = derive_seed(seed, "augment/clf", s);
        cfg.holdout_fraction = 0.0;  // accuracy comes from the test set

        const std::uint64_t mix_seed = derive_seed(seed, "augment/mix", s);
        const auto identity = [&](int, std::size_t i) -> const std::vector<double>& {
            return train.x[i];
        };
        const auto mixed = [&](int epoch, std::size_t i) -> const std::vector<double>& {
            // stateless per-(epoch, example) coin so evaluation order is irrelevant
            const bool swap =
                hash01(mix_seed, "mix", static_cast<std::uint64_t>(epoch), i) <
                protocol.mix_probability;
            return swap ? copies[i] : train.x[i];
        };
        const auto synth_view = [&](int, std::size_t i) -> const std::vector<double>& {
            return synthetic.x[i];
        };

        per_seed[s].baseline =
            accuracy_on(train_epochwise(train, train.n_classes, cfg, identity), test);
        per_seed[s].augmented =
            accuracy_on(train_epochwise(train, train.n_classes, cfg, mixed), test);
        per_seed[s].synthetic =
            accuracy_on(train_epochwise(synthetic, train.n_classes, cfg, synth_view), test);
    });

    AugmentationResult res;
    std::vector<double> base, aug, synth;
    for (int s = 0; s < n_seeds; ++s) {
        base.push_back(per_seed[s].baseline);
        aug.push_back(per_seed[s].augmented);
        synth.push_back(per_seed[s].synthetic);
        res.cells.push_back({"baseline", s, per_seed[s].baseline});
        res.cells.push_back({"boomerang", s, per_seed[s].augmented});
        res.cells.push_back({"synthetic", s, per_seed[s].synthetic});
    }
    res.baseline = summarize(base);
    res.boomerang_augmented = summarize(aug);
    res.synthetic_only = summarize(synth);
    return res;
}

PreResult pre_enhance(const PreTask& task, const Denoiser& den, const NoiseSchedule& sched,
                      std::uint64_t seed, std::uint64_t chain_index) {
    if (task.x_true.empty()) throw ValidationError("pre_enhance: x_true is required");
    const bool image = task.width > 0 || task.height > 0;
    if (image && task.x_true.size() != static_cast<std::size_t>(task.width) * task.height)
        throw ValidationError("pre_enhance: x_true does not match width x height");

    PreResult res;
    std::vector<double> x_ds = task.x_ds;
    if (x_ds.empty())
        x_ds = image ? downsample_image(task.x_true, task.width, task.height, task.k)
                     : downsample(task.x_true, task.k);
    res.x_up = task.x_up;
    if (res.x_up.empty())
        res.x_up = image ? upsample_linear_image(x_ds, task.width / task.k,
                                                 task.height / task.k, task.k)
                         : upsample_linear(x_ds, task.k);
    if (res.x_up.size() != task.x_true.size())
        throw ValidationError("pre_enhance: x_up dimension does not match x_true");

    BoomerangConfig cfg;
    cfg.t_boom = task.t_boom;
    cfg.n_cascade = task.n_cascade;
    cfg.seed = seed;
    const Sample out = cascade(Sample{res.x_up, 0}, cfg, den, sched, chain_index);

    res.enhanced = out.x;
    res.interp_mse = mean_squared_error(res.x_up, task.x_true);
    res.mse_to_true = mean_squared_error(res.enhanced, task.x_true);
    return res;
}

PreBatchResult pre_enhance_batch(const std::vector<std::vector<double>>& x_true_batch, int k,
                                 int t_boom, int n_cascade, const Denoiser& den,
                                 const NoiseSchedule& sched, std::uint64_t seed,
                                 const std::vector<std::vector<double>>& clean_reference,
                                 int image_side, int n_threads) {
    if (x_true_batch.empty()) throw ValidationError("pre_enhance_batch: empty batch");
    PreBatchResult res;
    res.enhanced.resize(x_true_batch.size());
    res.interpolated.resize(x_true_batch.size());
    std::vector<double> mse_e(x_true_batch.size()), mse_i(x_true_batch.size());
    parallel_for(x_true_batch.size(), n_threads, [&](std::size_t i) {
        PreTask task;
        task.x_true = x_true_batch[i];
        task.k = k;
        task.t_boom = t_boom;
        task.n_cascade = n_cascade;
        task.width = image_side;
        task.height = image_side;
        const PreResult r = pre_enhance(task, den, sched, seed, i);
        res.enhanced[i] = r.enhanced;
        res.interpolated[i] = r.x_up;
        mse_e[i] = r.mse_to_true;
        mse_i[i] = r.interp_mse;
    });
    for (std::size_t i = 0; i < x_true_batch.size(); ++i) {
        res.mean_mse_enhanced += mse_e[i];
        res.mean_mse_interp += mse_i[i];
    }
    res.mean_mse_enhanced /= static_cast<double>(x_true_batch.size());
    res.mean_mse_interp /= static_cast<double>(x_true_batch.size());
    if (!clean_reference.empty()) {
        res.enhanced_vs_clean = two_sample(res.enhanced, clean_reference);
        res.interp_vs_clean = two_sample(res.interpolated, clean_reference);
    }
    return res;
}

}  // namespace bmk
