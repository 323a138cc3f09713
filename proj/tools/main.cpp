// boomerang: diffusion-process toolkit CLI.
//
// Subcommands: train, sample, boomerang, sweep, augment-eval, pre, selftest.
// Every run takes an explicit seed (reproducibility is a hard requirement),
// reads an optional JSON config (flags win over config values), and writes
// its resolved configuration next to its outputs.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "boomerang/apps.hpp"
#include "boomerang/datasets.hpp"
#include "boomerang/denoiser.hpp"
#include "boomerang/errors.hpp"
#include "boomerang/forward.hpp"
#include "boomerang/io.hpp"
#include "boomerang/metrics.hpp"
#include "boomerang/mlp.hpp"
#include "boomerang/parallel.hpp"
#include "boomerang/sampler.hpp"
#include "boomerang/schedule.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bmk;

namespace {

// ---------------------------------------------------------------------------
// configuration

struct RunConfig {
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 1;

    ScheduleSpec schedule;

    // model: exactly one of the three
    std::string oracle;          // builtin mixture name
    std::string oracle_path;     // GMM JSON file
    std::string checkpoint;      // MLP checkpoint

    // dataset
    std::string dataset = "gmm2";
    std::string dataset_csv;
    int n = 1000;
    double gmm2_mean_scale = 3.0;
    double gmm2_variance = 0.5;
    int dim = 2;

    // command knobs
    int t_boom = -1;
    int n_cascade = 1;
    std::vector<double> ratios{0.1, 0.3, 0.5, 0.7, 0.9};
    std::optional<double> threshold;
    int stride = 0;  // 0 = no stride schedule

    // training knobs
    int epochs = 200;
    int batch_size = 64;
    double learning_rate = 1e-3;
    int hidden_width = 128;
    int time_features = 16;

    // augment-eval knobs
    int train_n = 64;
    int test_n = 2000;
    int n_seeds = 5;
    double mix_probability = 0.5;

    // pre knobs
    int pre_batch = 64;
    int clean_n = 256;
    int factor = 2;
    int pgm_dumps = 4;
};

void merge_json_config(RunConfig& cfg, const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("config file not found: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config: invalid JSON: " + std::string(e.what()));
    }
    try {
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) cfg.out = j["out"].get<std::string>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
        if (j.contains("schedule")) {
            const json& s = j["schedule"];
            if (s.contains("T")) cfg.schedule.T = s["T"].get<int>();
            if (s.contains("beta_min")) cfg.schedule.beta_min = s["beta_min"].get<double>();
            if (s.contains("beta_max")) cfg.schedule.beta_max = s["beta_max"].get<double>();
        }
        if (j.contains("model")) {
            const json& m = j["model"];
            if (m.contains("oracle")) cfg.oracle = m["oracle"].get<std::string>();
            if (m.contains("oracle_path")) cfg.oracle_path = m["oracle_path"].get<std::string>();
            if (m.contains("checkpoint")) cfg.checkpoint = m["checkpoint"].get<std::string>();
        }
        if (j.contains("dataset")) {
            const json& d = j["dataset"];
            if (d.contains("name")) cfg.dataset = d["name"].get<std::string>();
            if (d.contains("csv")) cfg.dataset_csv = d["csv"].get<std::string>();
            if (d.contains("n")) cfg.n = d["n"].get<int>();
            if (d.contains("mean_scale")) cfg.gmm2_mean_scale = d["mean_scale"].get<double>();
            if (d.contains("variance")) cfg.gmm2_variance = d["variance"].get<double>();
            if (d.contains("dim")) cfg.dim = d["dim"].get<int>();
        }
        if (j.contains("t_boom")) cfg.t_boom = j["t_boom"].get<int>();
        if (j.contains("n_cascade")) cfg.n_cascade = j["n_cascade"].get<int>();
        if (j.contains("ratios")) cfg.ratios = j["ratios"].get<std::vector<double>>();
        if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
        if (j.contains("stride")) cfg.stride = j["stride"].get<int>();
        if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
        if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
        if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("hidden_width")) cfg.hidden_width = j["hidden_width"].get<int>();
        if (j.contains("time_features")) cfg.time_features = j["time_features"].get<int>();
        if (j.contains("train_n")) cfg.train_n = j["train_n"].get<int>();
        if (j.contains("test_n")) cfg.test_n = j["test_n"].get<int>();
        if (j.contains("n_seeds")) cfg.n_seeds = j["n_seeds"].get<int>();
        if (j.contains("mix_probability"))
            cfg.mix_probability = j["mix_probability"].get<double>();
        if (j.contains("pre_batch")) cfg.pre_batch = j["pre_batch"].get<int>();
        if (j.contains("clean_n")) cfg.clean_n = j["clean_n"].get<int>();
        if (j.contains("factor")) cfg.factor = j["factor"].get<int>();
    } catch (const json::exception& e) {
        throw ValidationError("config: " + std::string(e.what()));
    }
}

json resolved_config_json(const RunConfig& cfg, const std::string& command) {
    json j;
    j["command"] = command;
    j["seed"] = cfg.seed.value_or(0);
    j["out"] = cfg.out;
    j["threads"] = cfg.threads;
    j["schedule"] = {{"T", cfg.schedule.T},
                     {"beta_min", cfg.schedule.beta_min},
                     {"beta_max", cfg.schedule.beta_max},
                     {"kind", cfg.stride > 0 ? "stride" : "linear"}};
    json model;
    if (!cfg.oracle.empty()) model["oracle"] = cfg.oracle;
    if (!cfg.oracle_path.empty()) model["oracle_path"] = cfg.oracle_path;
    if (!cfg.checkpoint.empty()) model["checkpoint"] = cfg.checkpoint;
    j["model"] = model;
    json dataset;
    if (!cfg.dataset_csv.empty())
        dataset["csv"] = cfg.dataset_csv;
    else
        dataset = {{"name", cfg.dataset},
                   {"n", cfg.n},
                   {"mean_scale", cfg.gmm2_mean_scale},
                   {"variance", cfg.gmm2_variance},
                   {"dim", cfg.dim}};
    j["dataset"] = dataset;
    j["t_boom"] = cfg.t_boom;
    j["n_cascade"] = cfg.n_cascade;
    j["ratios"] = cfg.ratios;
    if (cfg.threshold) j["threshold"] = *cfg.threshold;
    if (cfg.stride > 0) j["stride"] = cfg.stride;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["learning_rate"] = cfg.learning_rate;
    j["hidden_width"] = cfg.hidden_width;
    j["time_features"] = cfg.time_features;
    j["train_n"] = cfg.train_n;
    j["test_n"] = cfg.test_n;
    j["n_seeds"] = cfg.n_seeds;
    j["mix_probability"] = cfg.mix_probability;
    j["pre_batch"] = cfg.pre_batch;
    j["clean_n"] = cfg.clean_n;
    j["factor"] = cfg.factor;
    return j;
}

fs::path prepare_out_dir(const RunConfig& cfg, const std::string& command) {
    if (cfg.out.empty()) throw ValidationError("--out DIR is required for " + command);
    if (!cfg.seed) throw ValidationError("--seed is required (no wall-clock default)");
    const fs::path out(cfg.out);
    fs::create_directories(out);
    std::ofstream os(out / "config.json", std::ios::binary);
    if (!os) throw ValidationError("cannot write resolved config in " + out.string());
    os << resolved_config_json(cfg, command).dump(2) << "\n";
    return out;
}

// ---------------------------------------------------------------------------
// model and dataset resolution

struct ModelBundle {
    GaussianMixture gmm;  // storage for oracle models
    std::unique_ptr<Denoiser> denoiser;
};

GaussianMixture builtin_mixture(const RunConfig& cfg, const std::string& name) {
    if (name == "gauss1") return gauss1_mixture(cfg.dim);
    if (name == "gmm2") return gmm2_mixture(cfg.gmm2_mean_scale, cfg.gmm2_variance, cfg.dim);
    if (name == "bumps16") return bumps16_mixture();
    throw ValidationError("unknown builtin mixture: " + name);
}

ModelBundle resolve_model(const RunConfig& cfg, const NoiseSchedule& sched) {
    const int given = (!cfg.oracle.empty()) + (!cfg.oracle_path.empty()) +
                      (!cfg.checkpoint.empty());
    if (given != 1)
        throw ValidationError(
            "specify exactly one model: --oracle NAME, --oracle-path FILE or "
            "--checkpoint FILE");
    ModelBundle bundle;
    if (!cfg.oracle.empty()) {
        bundle.gmm = builtin_mixture(cfg, cfg.oracle);
        bundle.denoiser = std::make_unique<OracleDenoiser>(bundle.gmm, sched);
    } else if (!cfg.oracle_path.empty()) {
        bundle.gmm = load_gmm(cfg.oracle_path);
        bundle.denoiser = std::make_unique<OracleDenoiser>(bundle.gmm, sched);
    } else {
        bundle.denoiser =
            std::make_unique<MlpDenoiser>(MlpDenoiser::load(cfg.checkpoint, sched));
    }
    return bundle;
}

std::vector<std::vector<double>> resolve_dataset(const RunConfig& cfg, std::uint64_t seed) {
    if (!cfg.dataset_csv.empty()) {
        const CsvTable table = read_csv(cfg.dataset_csv);
        if (table.rows.empty()) throw ValidationError("dataset CSV has no rows");
        return table.rows;
    }
    if (cfg.dataset == "gauss1" || cfg.dataset == "gmm2" || cfg.dataset == "bumps16")
        return sample_mixture(builtin_mixture(cfg, cfg.dataset), cfg.n, seed);
    if (cfg.dataset == "moons") return make_moons(cfg.n, seed).x;
    throw ValidationError("unknown builtin dataset: " + cfg.dataset);
}

void write_samples_csv(const fs::path& path, const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ValidationError("no samples to write");
    std::vector<std::string> header{"chain"};
    for (std::size_t i = 0; i < rows[0].size(); ++i) header.push_back("x" + std::to_string(i));
    std::vector<std::vector<double>> cells(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        cells[i].push_back(static_cast<double>(i));
        cells[i].insert(cells[i].end(), rows[i].begin(), rows[i].end());
    }
    write_csv(path, header, cells);
}

int resolve_t_boom(const RunConfig& cfg, const NoiseSchedule& sched) {
    if (cfg.t_boom < 0) throw ValidationError("--t-boom is required for this command");
    if (cfg.t_boom > sched.T()) throw ValidationError("--t-boom exceeds schedule T");
    return cfg.t_boom;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_train(const RunConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg, "train");
    const NoiseSchedule sched = cfg.schedule.build_base();
    const auto data = resolve_dataset(cfg, derive_seed(*cfg.seed, "dataset"));

    MlpDenoiserConfig mcfg;
    mcfg.hidden_width = cfg.hidden_width;
    mcfg.time_features = cfg.time_features;
    MlpDenoiser den(static_cast<int>(data[0].size()), sched, mcfg,
                    derive_seed(*cfg.seed, "init"));
    TrainConfig tcfg;
    tcfg.epochs = cfg.epochs;
    tcfg.batch_size = cfg.batch_size;
    tcfg.learning_rate = cfg.learning_rate;
    tcfg.seed = *cfg.seed;
    const std::vector<double> trace = train_mlp(den, data, tcfg);

    den.save(out / "checkpoint.bin");
    std::vector<std::vector<double>> rows;
    for (std::size_t e = 0; e < trace.size(); ++e)
        rows.push_back({static_cast<double>(e), trace[e]});
    write_csv(out / "loss.csv", {"epoch", "loss"}, rows);
    std::cout << "trained " << trace.size() << " epochs; final loss "
              << (trace.empty() ? 0.0 : trace.back()) << "\n"
              << "checkpoint: " << (out / "checkpoint.bin").string() << "\n";
    return 0;
}

int cmd_sample(const RunConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg, "sample");
    const NoiseSchedule sched = cfg.schedule.build_base();
    const ModelBundle model = resolve_model(cfg, sched);
    const auto samples = sample_global(*model.denoiser, sched, model.denoiser->dim(), cfg.n,
                                       *cfg.seed, cfg.threads);
    std::vector<std::vector<double>> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) rows.push_back(s.x);
    write_samples_csv(out / "samples.csv", rows);
    std::cout << "wrote " << rows.size() << " samples to "
              << (out / "samples.csv").string() << "\n";
    return 0;
}

int cmd_boomerang(const RunConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg, "boomerang");
    const NoiseSchedule sched = cfg.schedule.build_base();
    const ModelBundle model = resolve_model(cfg, sched);
    const auto data = resolve_dataset(cfg, derive_seed(*cfg.seed, "dataset"));

    BoomerangConfig bcfg;
    bcfg.t_boom = resolve_t_boom(cfg, sched);
    bcfg.n_cascade = cfg.n_cascade;
    bcfg.seed = *cfg.seed;
    std::optional<StrideSchedule> stride;
    if (cfg.stride > 0) {
        stride.emplace(build_stride(sched, cfg.stride));
        bcfg.stride = &*stride;
    }

    std::vector<std::vector<double>> rows(data.size());
    parallel_for(data.size(), cfg.threads, [&](std::size_t i) {
        rows[i] = cascade(Sample{data[i], 0}, bcfg, *model.denoiser, sched, i).x;
    });
    write_samples_csv(out / "boomerang.csv", rows);
    std::cout << "boomeranged " << rows.size() << " records at t_boom=" << bcfg.t_boom
              << " n_cascade=" << bcfg.n_cascade << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg, "sweep");
    const NoiseSchedule sched = cfg.schedule.build_base();
    const ModelBundle model = resolve_model(cfg, sched);
    const auto data = resolve_dataset(cfg, derive_seed(*cfg.seed, "dataset"));
    for (double r : cfg.ratios)
        if (r < 0.0 || r > 1.0) throw ValidationError("ratios must lie in [0, 1]");

    // threshold rule: explicit value, else the 5th percentile of distances
    // at the smallest positive swept ratio
    double threshold = 0.0;
    if (cfg.threshold) {
        threshold = *cfg.threshold;
    } else {
        double smallest = 2.0;
        for (double r : cfg.ratios)
            if (r > 0.0) smallest = std::min(smallest, r);
        if (smallest <= 1.0) {
            const auto dist = boomerang_distances(data, *model.denoiser, sched, smallest,
                                                  *cfg.seed, nullptr, cfg.threads);
            threshold = auto_threshold(dist, 5.0);
        }
    }

    const auto reports = locality_sweep(data, *model.denoiser, sched, cfg.ratios, threshold,
                                        *cfg.seed, nullptr, cfg.threads);
    std::vector<std::vector<double>> rows;
    for (const auto& rep : reports)
        rows.push_back(
            {rep.t_boom_ratio, rep.mean_distance, rep.std_error, rep.frac_over_threshold});
    write_csv(out / "sweep.csv",
              {"ratio", "mean_distance", "std_error", "frac_over_threshold"}, rows);
    std::cout << "sweep over " << reports.size() << " ratios (threshold " << threshold
              << ") -> " << (out / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_augment_eval(const RunConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg, "augment-eval");
    const NoiseSchedule sched = cfg.schedule.build_base();
    // label-scarce regime: small train set from an overlapping mixture
    const GaussianMixture gmm =
        gmm2_mixture(cfg.gmm2_mean_scale, cfg.gmm2_variance, cfg.dim);
    const OracleDenoiser den(gmm, sched);
    const LabeledDataset train =
        sample_mixture_labeled(gmm, cfg.train_n, derive_seed(*cfg.seed, "train"));
    const LabeledDataset test =
        sample_mixture_labeled(gmm, cfg.test_n, derive_seed(*cfg.seed, "test"));

    AugmentationProtocol proto;
    proto.mix_probability = cfg.mix_probability;
    proto.t_boom = resolve_t_boom(cfg, sched);
    ClassifierConfig ccfg;
    ccfg.hidden_width = cfg.hidden_width;
    ccfg.epochs = cfg.epochs;
    ccfg.batch_size = cfg.batch_size;
    ccfg.learning_rate = cfg.learning_rate;

    const AugmentationResult res = augmentation_eval(train, test, proto, ccfg, cfg.n_seeds,
                                                     den, sched, *cfg.seed, cfg.threads);

    // condition, seed, metric, value
    std::vector<std::vector<double>> rows;
    std::vector<std::string> conditions;
    for (const auto& cell : res.cells) conditions.push_back(cell.condition);
    std::ofstream os(out / "accuracy.csv", std::ios::binary);
    if (!os) throw ValidationError("cannot write accuracy.csv");
    os << "condition,seed,metric,value\n";
    for (const auto& cell : res.cells)
        os << cell.condition << ',' << cell.seed_index << ",accuracy,"
           << format_double(cell.accuracy) << "\n";
    os << "baseline,-1,mean," << format_double(res.baseline.mean) << "\n";
    os << "baseline,-1,std_error," << format_double(res.baseline.std_error) << "\n";
    os << "boomerang,-1,mean," << format_double(res.boomerang_augmented.mean) << "\n";
    os << "boomerang,-1,std_error," << format_double(res.boomerang_augmented.std_error)
       << "\n";
    os << "synthetic,-1,mean," << format_double(res.synthetic_only.mean) << "\n";
    os << "synthetic,-1,std_error," << format_double(res.synthetic_only.std_error) << "\n";

    std::cout << "baseline  " << res.baseline.mean << " +- " << res.baseline.std_error
              << "\nboomerang " << res.boomerang_augmented.mean << " +- "
              << res.boomerang_augmented.std_error << "\nsynthetic " << res.synthetic_only.mean
              << " +- " << res.synthetic_only.std_error << "\n";
    return 0;
}

int cmd_pre(const RunConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg, "pre");
    const NoiseSchedule sched = cfg.schedule.build_base();
    const GaussianMixture bumps = bumps16_mixture();
    const OracleDenoiser den(bumps, sched);

    const auto batch =
        sample_mixture(bumps, cfg.pre_batch, derive_seed(*cfg.seed, "pre/batch"));
    const auto clean =
        sample_mixture(bumps, cfg.clean_n, derive_seed(*cfg.seed, "pre/clean"));

    const int t_boom = resolve_t_boom(cfg, sched);
    const PreBatchResult res =
        pre_enhance_batch(batch, cfg.factor, t_boom, cfg.n_cascade, den, sched, *cfg.seed,
                          clean, kBumps16Side, cfg.threads);

    std::vector<std::vector<double>> rows{
        {res.mean_mse_enhanced, res.mean_mse_interp, res.enhanced_vs_clean.mmd2_unbiased,
         res.interp_vs_clean.mmd2_unbiased, res.enhanced_vs_clean.mean_diff_norm,
         res.interp_vs_clean.mean_diff_norm}};
    write_csv(out / "pre_metrics.csv",
              {"mse_enhanced", "mse_interp", "mmd2_enhanced", "mmd2_interp",
               "mean_diff_enhanced", "mean_diff_interp"},
              rows);

    json index;
    index["metrics"] = "pre_metrics.csv";
    index["images"] = json::array();
    const int dumps = std::min<int>(cfg.pgm_dumps, static_cast<int>(batch.size()));
    for (int i = 0; i < dumps; ++i) {
        const std::string t = "true_" + std::to_string(i) + ".pgm";
        const std::string u = "interp_" + std::to_string(i) + ".pgm";
        const std::string e = "enhanced_" + std::to_string(i) + ".pgm";
        write_pgm(out / t, batch[i], kBumps16Side, kBumps16Side);
        write_pgm(out / u, res.interpolated[i], kBumps16Side, kBumps16Side);
        write_pgm(out / e, res.enhanced[i], kBumps16Side, kBumps16Side);
        index["images"].push_back({{"true", t}, {"interp", u}, {"enhanced", e}});
    }
    std::ofstream os(out / "index.json", std::ios::binary);
    os << index.dump(2) << "\n";

    std::cout << "pre: mmd2 enhanced " << res.enhanced_vs_clean.mmd2_unbiased
              << " vs interp " << res.interp_vs_clean.mmd2_unbiased << "\n";
    return 0;
}

// Small-T brute-force oracle suite; the numerical core re-checked without
// the test harness.
int cmd_selftest(const RunConfig& cfg) {
    int failures = 0;
    const auto report = [&](const char* name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    {  // schedule algebra against a long-double product
        const NoiseSchedule s = build_linear(1000, 1e-4, 0.02);
        long double acc = 1.0L;
        bool ok = true;
        for (int t = 1; t <= 1000; ++t) {
            acc *= 1.0L - static_cast<long double>(s.beta(t));
            if (std::abs(s.alpha(t) - static_cast<double>(acc)) >
                1e-12 * static_cast<double>(acc))
                ok = false;
        }
        ok = ok && s.bar_beta(1) == 0.0 && s.alpha(1000) < 1e-4;
        report("schedule cumulative products (T=1000)", ok);
    }
    {  // posterior mean vs trapezoid integration, d=1, K=2, T=5
        const NoiseSchedule s = build_linear(5, 0.05, 0.35);
        const GaussianMixture g{{0.3, 0.7}, {{2.0}, {-1.5}}, {0.5, 1.2}};
        bool ok = true;
        for (int t : {1, 3, 5}) {
            const double alpha = s.alpha(t);
            for (double x_t : {-2.0, 0.5, 3.0}) {
                const double lo = -14.0, hi = 14.0;
                const int nn = 10000;
                const double h = (hi - lo) / nn;
                double num = 0.0, den_i = 0.0;
                for (int i = 0; i <= nn; ++i) {
                    const double x0 = lo + h * i;
                    double prior = 0.0;
                    for (int k = 0; k < 2; ++k) {
                        const double dd = x0 - g.means[k][0];
                        prior += g.weights[k] *
                                 std::exp(-dd * dd / (2.0 * g.variances[k])) /
                                 std::sqrt(2.0 * M_PI * g.variances[k]);
                    }
                    const double r = x_t - std::sqrt(alpha) * x0;
                    const double like = std::exp(-r * r / (2.0 * (1.0 - alpha)));
                    const double w = (i == 0 || i == nn) ? 0.5 : 1.0;
                    num += w * x0 * like * prior;
                    den_i += w * like * prior;
                }
                const auto closed = posterior_mean_x0(g, std::vector<double>{x_t}, t, s);
                if (std::abs(closed[0] - num / den_i) > 1e-6) ok = false;
            }
        }
        report("posterior mean vs quadrature (d=1, K=2, T=5)", ok);
    }
    {  // reverse-mean worked value and t=1 collapse
        const NoiseSchedule s = build_linear(2, 0.5, 0.5);
        const GaussianMixture g{{1.0}, {{0.0}}, {1.0}};
        const auto f2 = oracle_reverse_mean(g, std::vector<double>{1.0}, 2, s);
        const auto f1 = oracle_reverse_mean(g, std::vector<double>{0.7}, 1, s);
        const auto m1 = posterior_mean_x0(g, std::vector<double>{0.7}, 1, s);
        report("oracle reverse mean (hand value + t=1 collapse)",
               std::abs(f2[0] - std::sqrt(0.5)) < 1e-12 && std::abs(f1[0] - m1[0]) < 1e-14);
    }
    {  // Eq.1 vs Eq.2 moments at T=10
        const NoiseSchedule s = build_linear(10, 0.02, 0.2);
        RngStream rng(cfg.seed.value_or(12345));
        const int n = 20000;
        double m_it = 0.0, m_j = 0.0, v_it = 0.0, v_j = 0.0;
        for (int i = 0; i < n; ++i) {
            Sample a{{1.0}, 0};
            for (int t = 0; t < 10; ++t) a = forward_step(a, s, rng);
            const Sample b = forward_jump(Sample{{1.0}, 0}, 10, s, rng);
            m_it += a.x[0];
            m_j += b.x[0];
            v_it += a.x[0] * a.x[0];
            v_j += b.x[0] * b.x[0];
        }
        m_it /= n;
        m_j /= n;
        v_it = v_it / n - m_it * m_it;
        v_j = v_j / n - m_j * m_j;
        const double se_m = std::sqrt(2.0 * (1.0 - s.alpha(10)) / n);
        const double se_v = (1.0 - s.alpha(10)) * 2.0 * std::sqrt(2.0 / n);
        report("single-jump forward matches iterated chain (T=10)",
               std::abs(m_it - m_j) < 4.0 * se_m && std::abs(v_it - v_j) < 4.0 * se_v);
    }
    {  // stride identity
        const NoiseSchedule s = build_linear(100, 1e-4, 0.02);
        const StrideSchedule st = build_stride(s, 100);
        bool ok = true;
        for (int k = 0; k < 100; ++k)
            if (std::abs(st.effective_betas()[k] - s.beta(k + 1)) > 1e-12) ok = false;
        report("identity stride reproduces base variances", ok);
    }

    std::cout << (failures == 0 ? "selftest OK" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boomerang diffusion toolkit: DDPM forward/reverse machinery with "
                 "partial-diffusion local sampling"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    RunConfig cfg;
    std::string config_path;

    // global flags (flags win over config-file values)
    app.add_option("--config", config_path, "JSON config file");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "root RNG seed (required)");
    std::string out_flag;
    auto* out_opt = app.add_option("--out", out_flag, "output directory");
    int threads_flag = 0;
    auto* threads_opt =
        app.add_option("--threads", threads_flag, "worker threads (default 1)");
    int t_boom_flag = -1;
    auto* t_boom_opt = app.add_option("--t-boom", t_boom_flag, "partial diffusion depth");
    int n_cascade_flag = 1;
    auto* n_cascade_opt = app.add_option("--n-cascade", n_cascade_flag, "cascade passes");
    std::string ratios_flag;
    auto* ratios_opt =
        app.add_option("--ratios", ratios_flag, "comma-separated t_boom/T ratios");
    double threshold_flag = 0.0;
    auto* threshold_opt =
        app.add_option("--threshold", threshold_flag, "anonymity distance threshold");
    int stride_flag = 0;
    auto* stride_opt =
        app.add_option("--stride", stride_flag, "stride schedule step count (0 = off)");

    std::string oracle_flag, oracle_path_flag, checkpoint_flag;
    auto* oracle_opt = app.add_option("--oracle", oracle_flag,
                                      "builtin oracle mixture: gauss1|gmm2|bumps16");
    auto* oracle_path_opt =
        app.add_option("--oracle-path", oracle_path_flag, "GMM JSON file");
    auto* checkpoint_opt =
        app.add_option("--checkpoint", checkpoint_flag, "MLP checkpoint file");

    std::string dataset_flag, dataset_csv_flag;
    auto* dataset_opt = app.add_option("--dataset", dataset_flag,
                                       "builtin dataset: gauss1|gmm2|moons|bumps16");
    auto* dataset_csv_opt = app.add_option("--dataset-csv", dataset_csv_flag,
                                           "dataset CSV (rows are vectors)");
    int n_flag = 0;
    auto* n_opt = app.add_option("--n", n_flag, "sample count");
    int dim_flag = 0;
    auto* dim_opt = app.add_option("--dim", dim_flag, "data dimension for builtins");
    int T_flag = 0;
    auto* T_opt = app.add_option("--T", T_flag, "diffusion steps");
    int epochs_flag = 0;
    auto* epochs_opt = app.add_option("--epochs", epochs_flag, "training epochs");
    double lr_flag = 0.0;
    auto* lr_opt = app.add_option("--lr", lr_flag, "learning rate");
    int nseeds_flag = 0;
    auto* nseeds_opt = app.add_option("--n-seeds", nseeds_flag, "experiment seeds");
    double mix_flag = -1.0;
    auto* mix_opt = app.add_option("--mix-prob", mix_flag, "augmentation mix probability");
    int train_n_flag = 0;
    auto* train_n_opt = app.add_option("--train-n", train_n_flag, "training set size");
    int test_n_flag = 0;
    auto* test_n_opt = app.add_option("--test-n", test_n_flag, "test set size");
    double mean_scale_flag = 0.0;
    auto* mean_scale_opt =
        app.add_option("--gmm2-mean-scale", mean_scale_flag, "gmm2 component offset");
    double variance_flag = 0.0;
    auto* variance_opt =
        app.add_option("--gmm2-variance", variance_flag, "gmm2 component variance");

    CLI::App* sub_train = app.add_subcommand("train", "train the MLP denoiser");
    CLI::App* sub_sample = app.add_subcommand("sample", "global sampling from pure noise");
    CLI::App* sub_boom = app.add_subcommand("boomerang", "partial forward/reverse resampling");
    CLI::App* sub_sweep = app.add_subcommand("sweep", "locality sweep over t_boom ratios");
    CLI::App* sub_aug = app.add_subcommand("augment-eval", "data-augmentation comparison");
    CLI::App* sub_pre = app.add_subcommand("pre", "perceptual resolution enhancement");
    CLI::App* sub_self = app.add_subcommand("selftest", "run the built-in oracle suite");

    try {
        app.parse(argc, argv);

        if (!config_path.empty()) merge_json_config(cfg, config_path);
        if (*seed_opt) cfg.seed = seed_flag;
        if (*out_opt) cfg.out = out_flag;
        if (*threads_opt) cfg.threads = threads_flag;
        if (cfg.threads <= 0) {
            if (const char* env = std::getenv("BOOMERANG_KIT_THREADS"))
                cfg.threads = std::max(1, std::atoi(env));
            else
                cfg.threads = 1;
        }
        if (*t_boom_opt) cfg.t_boom = t_boom_flag;
        if (*n_cascade_opt) cfg.n_cascade = n_cascade_flag;
        if (*threshold_opt) cfg.threshold = threshold_flag;
        if (*stride_opt) cfg.stride = stride_flag;
        if (*oracle_opt) cfg.oracle = oracle_flag;
        if (*oracle_path_opt) cfg.oracle_path = oracle_path_flag;
        if (*checkpoint_opt) cfg.checkpoint = checkpoint_flag;
        if (*dataset_opt) cfg.dataset = dataset_flag;
        if (*dataset_csv_opt) cfg.dataset_csv = dataset_csv_flag;
        if (*n_opt) cfg.n = n_flag;
        if (*dim_opt) cfg.dim = dim_flag;
        if (*T_opt) cfg.schedule.T = T_flag;
        if (*epochs_opt) cfg.epochs = epochs_flag;
        if (*lr_opt) cfg.learning_rate = lr_flag;
        if (*nseeds_opt) cfg.n_seeds = nseeds_flag;
        if (*mix_opt) cfg.mix_probability = mix_flag;
        if (*train_n_opt) cfg.train_n = train_n_flag;
        if (*test_n_opt) cfg.test_n = test_n_flag;
        if (*mean_scale_opt) cfg.gmm2_mean_scale = mean_scale_flag;
        if (*variance_opt) cfg.gmm2_variance = variance_flag;
        if (*ratios_opt) {
            cfg.ratios.clear();
            std::stringstream ss(ratios_flag);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok.empty()) continue;
                cfg.ratios.push_back(std::stod(tok));
            }
            if (cfg.ratios.empty()) throw ValidationError("--ratios parsed to nothing");
        }

        // file existence checks up front
        for (const std::string& p : {cfg.oracle_path, cfg.checkpoint, cfg.dataset_csv})
            if (!p.empty() && !fs::exists(p))
                throw ValidationError("referenced file does not exist: " + p);

        if (sub_train->parsed()) return cmd_train(cfg);
        if (sub_sample->parsed()) return cmd_sample(cfg);
        if (sub_boom->parsed()) return cmd_boomerang(cfg);
        if (sub_sweep->parsed()) return cmd_sweep(cfg);
        if (sub_aug->parsed()) return cmd_augment_eval(cfg);
        if (sub_pre->parsed()) return cmd_pre(cfg);
        if (sub_self->parsed()) return cmd_selftest(cfg);
        throw ValidationError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "ERROR 1: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "ERROR 1: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "ERROR 2: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ERROR 1: " << e.what() << "\n";
        return 1;
    }
}
