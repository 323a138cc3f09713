#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "boomerang/denoiser.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// Dense network with tanh hidden layers and a linear output. Parameters
// live in one flat vector in declaration order (W0 row-major, b0, W1, b1,
// ...), which keeps SGD updates, finite-difference checks and checkpoint
// serialization trivial.
class Mlp {
public:
    Mlp() = default;
    // Xavier-uniform weights, zero biases.
    Mlp(std::vector<int> widths, std::uint64_t init_seed);
    static Mlp zeros(std::vector<int> widths);

    int input_dim() const { return widths_.front(); }
    int output_dim() const { return widths_.back(); }
    int n_layers() const { return static_cast<int>(widths_.size()) - 1; }
    const std::vector<int>& widths() const { return widths_; }

    std::size_t n_params() const { return params_.size(); }
    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    // Post-activation values per layer; acts[0] is the input copy and
    // acts[n_layers()] the network output.
    struct Workspace {
        std::vector<std::vector<double>> acts;
    };

    std::vector<double> forward(std::span<const double> in) const;
    const std::vector<double>& forward_cached(std::span<const double> in, Workspace& ws) const;

    // Accumulates dLoss/dparams into grad (size n_params()) given
    // dLoss/doutput; ws must hold the matching forward pass.
    void backward(const Workspace& ws, std::span<const double> dloss_dout,
                  std::span<double> grad) const;

    // params += scale * delta
    void add_scaled(std::span<const double> delta, double scale);

    bool params_finite() const;

private:
    void check_shapes() const;

    std::vector<int> widths_;
    std::vector<double> params_;
    std::vector<std::size_t> w_off_, b_off_;  // per-layer offsets into params_
};

// Sinusoidal features of t/T, width F (even): sin/cos at geometrically
// spaced frequencies pi * 2^i. Injective over the step grid.
std::vector<double> time_features(int t, int T, int width);

struct MlpDenoiserConfig {
    int hidden_width = 128;
    int n_hidden = 2;
    int time_features = 16;
};

// Trainable denoiser: the network maps concat(x_t, timefeat(t)) to a noise
// prediction eps_hat; the reverse mean follows from the fixed conversion
//   f(x_t, t) = (x_t - beta_t / sqrt(1 - alpha_t) * eps_hat) / sqrt(1 - beta_t).
class MlpDenoiser final : public Denoiser {
public:
    MlpDenoiser(int d, const NoiseSchedule& sched, const MlpDenoiserConfig& cfg,
                std::uint64_t init_seed);
    // All-zero parameters (eps_hat == 0); for tests.
    static MlpDenoiser zeros(int d, const NoiseSchedule& sched, const MlpDenoiserConfig& cfg);

    int dim() const override { return d_; }
    const MlpDenoiserConfig& config() const { return cfg_; }
    Mlp& net() { return net_; }
    const Mlp& net() const { return net_; }
    const NoiseSchedule& schedule() const { return *sched_; }

    std::vector<double> epsilon(std::span<const double> x, int t) const;
    // (eps_hat, f) for t in [1, T].
    std::pair<std::vector<double>, std::vector<double>> forward(std::span<const double> x,
                                                                int t) const;

    std::vector<double> reverse_mean(std::span<const double> x, int t) const override;
    // x0hat = (x_t - sqrt(1 - alpha_t) eps_hat) / sqrt(alpha_t)
    std::vector<double> predict_x0(std::span<const double> x, int t) const override;

    // Flat binary checkpoint: magic "BMRK1", little-endian u32 dims header
    // (data dim, time features, layer count, then in/out per layer), then
    // the parameter vector as little-endian f64 in declaration order.
    void save(const std::filesystem::path& path) const;
    static MlpDenoiser load(const std::filesystem::path& path, const NoiseSchedule& sched);

private:
    MlpDenoiser(int d, const NoiseSchedule& sched, const MlpDenoiserConfig& cfg, Mlp net);
    std::vector<int> layer_widths() const;

    int d_ = 0;
    const NoiseSchedule* sched_ = nullptr;
    MlpDenoiserConfig cfg_;
    Mlp net_;
};

struct TrainConfig {
    int epochs = 200;
    int batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

// Epsilon-prediction objective: per example draw t ~ U{1..T} and
// eps ~ N(0, I), form x_t by the closed-form jump and minimize the
// per-dimension MSE between eps and eps_hat with plain SGD. Returns the
// per-epoch mean loss trace; throws NumericalError on divergence.
std::vector<double> train_mlp(MlpDenoiser& den, const std::vector<std::vector<double>>& data,
                              const TrainConfig& cfg);

// Compares hand-rolled gradients against central differences (h = 1e-5) on
// a random subsample of parameters for the squared error against
// epsilon_target at (x_t, t). Returns the max relative error.
double gradient_check(const MlpDenoiser& den, std::span<const double> x_t, int t,
                      std::span<const double> epsilon_target, std::uint64_t seed = 0,
                      int n_check = 200);

}  // namespace bmk
