#include "boomerang/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include "boomerang/errors.hpp"
#include "boomerang/forward.hpp"
#include "boomerang/rng.hpp"

namespace bmk {

Mlp::Mlp(std::vector<int> widths, std::uint64_t init_seed) : widths_(std::move(widths)) {
    check_shapes();
    RngStream rng = derive_stream(init_seed, "mlp/init");
    for (int l = 0; l < n_layers(); ++l) {
        const int in = widths_[l], out = widths_[l + 1];
        w_off_.push_back(params_.size());
        const double bound = std::sqrt(6.0 / (in + out));
        for (int i = 0; i < in * out; ++i)
            params_.push_back((2.0 * rng.uniform01() - 1.0) * bound);
        b_off_.push_back(params_.size());
        params_.insert(params_.end(), out, 0.0);
    }
}

Mlp Mlp::zeros(std::vector<int> widths) {
    Mlp m(std::move(widths), 0);
    std::fill(m.params_.begin(), m.params_.end(), 0.0);
    return m;
}

void Mlp::check_shapes() const {
    if (widths_.size() < 2) throw ValidationError("Mlp: need at least one layer");
    for (int w : widths_)
        if (w < 1) throw ValidationError("Mlp: layer widths must be >= 1");
}

std::vector<double> Mlp::forward(std::span<const double> in) const {
    Workspace ws;
    return forward_cached(in, ws);
}

const std::vector<double>& Mlp::forward_cached(std::span<const double> in,
                                               Workspace& ws) const {
    if (static_cast<int>(in.size()) != input_dim())
        throw ValidationError("Mlp::forward: input dimension mismatch");
    ws.acts.assign(static_cast<std::size_t>(n_layers()) + 1, {});
    ws.acts[0].assign(in.begin(), in.end());
    for (int l = 0; l < n_layers(); ++l) {
        const int nin = widths_[l], nout = widths_[l + 1];
        const double* W = params_.data() + w_off_[l];
        const double* b = params_.data() + b_off_[l];
        const std::vector<double>& a = ws.acts[l];
        std::vector<double>& z = ws.acts[l + 1];
        z.resize(nout);
        const bool hidden = l + 1 < n_layers();
        for (int o = 0; o < nout; ++o) {
            const double* row = W + static_cast<std::size_t>(o) * nin;
            double s = b[o];
            for (int i = 0; i < nin; ++i) s += row[i] * a[i];
            z[o] = hidden ? std::tanh(s) : s;
        }
    }
    return ws.acts.back();
}

void Mlp::backward(const Workspace& ws, std::span<const double> dloss_dout,
                   std::span<double> grad) const {
    if (grad.size() != params_.size())
        throw ValidationError("Mlp::backward: gradient buffer size mismatch");
    if (static_cast<int>(dloss_dout.size()) != output_dim())
        throw ValidationError("Mlp::backward: dloss_dout dimension mismatch");

    std::vector<double> delta(dloss_dout.begin(), dloss_dout.end());
    for (int l = n_layers() - 1; l >= 0; --l) {
        const int nin = widths_[l], nout = widths_[l + 1];
        const double* W = params_.data() + w_off_[l];
        const std::vector<double>& a_in = ws.acts[l];
        double* gW = grad.data() + w_off_[l];
        double* gb = grad.data() + b_off_[l];
        for (int o = 0; o < nout; ++o) {
            const double d = delta[o];
            double* grow = gW + static_cast<std::size_t>(o) * nin;
            for (int i = 0; i < nin; ++i) grow[i] += d * a_in[i];
            gb[o] += d;
        }
        if (l == 0) break;
        std::vector<double> prev(nin, 0.0);
        for (int o = 0; o < nout; ++o) {
            const double d = delta[o];
            const double* row = W + static_cast<std::size_t>(o) * nin;
            for (int i = 0; i < nin; ++i) prev[i] += row[i] * d;
        }
        // a_in is post-tanh: d tanh(z) / dz = 1 - a^2
        for (int i = 0; i < nin; ++i) prev[i] *= 1.0 - a_in[i] * a_in[i];
        delta = std::move(prev);
    }
}

void Mlp::add_scaled(std::span<const double> delta, double scale) {
    if (delta.size() != params_.size())
        throw ValidationError("Mlp::add_scaled: size mismatch");
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] += scale * delta[i];
}

bool Mlp::params_finite() const {
    for (double p : params_)
        if (!std::isfinite(p)) return false;
    return true;
}

std::vector<double> time_features(int t, int T, int width) {
    if (width < 2 || width % 2 != 0)
        throw ValidationError("time_features: width must be even and >= 2");
    const double tau = static_cast<double>(t) / static_cast<double>(T);
    std::vector<double> out(width);
    double freq = std::numbers::pi;
    for (int i = 0; i < width / 2; ++i) {
        out[2 * i] = std::sin(freq * tau);
        out[2 * i + 1] = std::cos(freq * tau);
        freq *= 2.0;
    }
    return out;
}

std::vector<int> MlpDenoiser::layer_widths() const {
    std::vector<int> w;
    w.push_back(d_ + cfg_.time_features);
    for (int i = 0; i < cfg_.n_hidden; ++i) w.push_back(cfg_.hidden_width);
    w.push_back(d_);
    return w;
}

MlpDenoiser::MlpDenoiser(int d, const NoiseSchedule& sched, const MlpDenoiserConfig& cfg,
                         std::uint64_t init_seed)
    : d_(d), sched_(&sched), cfg_(cfg) {
    if (d < 1) throw ValidationError("MlpDenoiser: d must be >= 1");
    net_ = Mlp(layer_widths(), init_seed);
}

MlpDenoiser::MlpDenoiser(int d, const NoiseSchedule& sched, const MlpDenoiserConfig& cfg,
                         Mlp net)
    : d_(d), sched_(&sched), cfg_(cfg), net_(std::move(net)) {}

MlpDenoiser MlpDenoiser::zeros(int d, const NoiseSchedule& sched,
                               const MlpDenoiserConfig& cfg) {
    MlpDenoiser den(d, sched, cfg, 0);
    std::fill(den.net_.params().begin(), den.net_.params().end(), 0.0);
    return den;
}

std::vector<double> MlpDenoiser::epsilon(std::span<const double> x, int t) const {
    if (static_cast<int>(x.size()) != d_)
        throw ValidationError("MlpDenoiser: input dimension mismatch");
    if (t < 1 || t > sched_->T()) throw ValidationError("MlpDenoiser: t outside [1, T]");
    std::vector<double> in(x.begin(), x.end());
    const std::vector<double> tf = time_features(t, sched_->T(), cfg_.time_features);
    in.insert(in.end(), tf.begin(), tf.end());
    return net_.forward(in);
}

std::pair<std::vector<double>, std::vector<double>> MlpDenoiser::forward(
    std::span<const double> x, int t) const {
    std::vector<double> eps = epsilon(x, t);
    const double beta = sched_->beta(t);
    const double c = beta / std::sqrt(1.0 - sched_->alpha(t));
    const double inv = 1.0 / std::sqrt(1.0 - beta);
    std::vector<double> f(d_);
    for (int i = 0; i < d_; ++i) f[i] = inv * (x[i] - c * eps[i]);
    return {std::move(eps), std::move(f)};
}

std::vector<double> MlpDenoiser::reverse_mean(std::span<const double> x, int t) const {
    return forward(x, t).second;
}

std::vector<double> MlpDenoiser::predict_x0(std::span<const double> x, int t) const {
    std::vector<double> eps = epsilon(x, t);
    const double alpha = sched_->alpha(t);
    const double c = std::sqrt(1.0 - alpha);
    const double inv = 1.0 / std::sqrt(alpha);
    std::vector<double> out(d_);
    for (int i = 0; i < d_; ++i) out[i] = inv * (x[i] - c * eps[i]);
    return out;
}

namespace {

constexpr char kMagic[5] = {'B', 'M', 'R', 'K', '1'};

void require_little_endian() {
    if constexpr (std::endian::native != std::endian::little)
        throw ValidationError("checkpoints require a little-endian host");
}

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw ValidationError("checkpoint: truncated header");
    return v;
}

}  // namespace

void MlpDenoiser::save(const std::filesystem::path& path) const {
    require_little_endian();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open checkpoint for writing: " + path.string());
    os.write(kMagic, sizeof kMagic);
    write_u32(os, static_cast<std::uint32_t>(d_));
    write_u32(os, static_cast<std::uint32_t>(cfg_.time_features));
    write_u32(os, static_cast<std::uint32_t>(net_.n_layers()));
    for (int l = 0; l < net_.n_layers(); ++l) {
        write_u32(os, static_cast<std::uint32_t>(net_.widths()[l]));
        write_u32(os, static_cast<std::uint32_t>(net_.widths()[l + 1]));
    }
    const auto params = net_.params();
    os.write(reinterpret_cast<const char*>(params.data()),
             static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!os) throw ValidationError("checkpoint write failed: " + path.string());
}

MlpDenoiser MlpDenoiser::load(const std::filesystem::path& path, const NoiseSchedule& sched) {
    require_little_endian();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open checkpoint: " + path.string());
    char magic[5] = {};
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ValidationError("checkpoint: bad magic (expected BMRK1): " + path.string());
    const int d = static_cast<int>(read_u32(is));
    const int time_feat = static_cast<int>(read_u32(is));
    const int n_layers = static_cast<int>(read_u32(is));
    if (d < 1 || n_layers < 1 || n_layers > 64)
        throw ValidationError("checkpoint: implausible dims header");
    std::vector<int> widths;
    for (int l = 0; l < n_layers; ++l) {
        const int in = static_cast<int>(read_u32(is));
        const int out = static_cast<int>(read_u32(is));
        if (in < 1 || out < 1) throw ValidationError("checkpoint: bad layer dims");
        if (l == 0) widths.push_back(in);
        if (widths.back() != in)
            throw ValidationError("checkpoint: inconsistent layer dims");
        widths.push_back(out);
    }
    if (widths.front() != d + time_feat || widths.back() != d)
        throw ValidationError("checkpoint: header dims do not match layer shapes");

    Mlp net = Mlp::zeros(widths);
    auto params = net.params();
    is.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!is) throw ValidationError("checkpoint: truncated parameter block");
    is.peek();
    if (!is.eof()) throw ValidationError("checkpoint: trailing bytes");

    MlpDenoiserConfig cfg;
    cfg.time_features = time_feat;
    cfg.n_hidden = n_layers - 1;
    cfg.hidden_width = (n_layers > 1) ? widths[1] : 0;
    return MlpDenoiser(d, sched, cfg, std::move(net));
}

std::vector<double> train_mlp(MlpDenoiser& den, const std::vector<std::vector<double>>& data,
                              const TrainConfig& cfg) {
    if (data.empty()) throw ValidationError("train_mlp: empty dataset");
    const int d = den.dim();
    for (const auto& x : data)
        if (static_cast<int>(x.size()) != d)
            throw ValidationError("train_mlp: inconsistent data dimension");
    if (cfg.epochs < 0) throw ValidationError("train_mlp: epochs must be >= 0");
    if (cfg.batch_size < 1) throw ValidationError("train_mlp: batch_size must be >= 1");

    const NoiseSchedule& sched = den.schedule();
    const int T = sched.T();
    Mlp& net = den.net();

    std::vector<double> trace;
    trace.reserve(cfg.epochs);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(net.n_params());
    std::vector<double> eps(d), input;
    Mlp::Workspace ws;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        RngStream shuffle_rng = derive_stream(cfg.seed, "train/shuffle", epoch);
        RngStream noise_rng = derive_stream(cfg.seed, "train/noise", epoch);
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t processed = 0;
        while (processed < order.size()) {
            const std::size_t batch =
                std::min<std::size_t>(cfg.batch_size, order.size() - processed);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const std::vector<double>& x0 = data[order[processed + b]];
                const int t = 1 + static_cast<int>(noise_rng.uniform_below(T));
                noise_rng.standard_normal(eps);
                const double sa = std::sqrt(sched.alpha(t));
                const double sn = std::sqrt(1.0 - sched.alpha(t));
                input.assign(x0.begin(), x0.end());
                for (int i = 0; i < d; ++i) input[i] = sa * x0[i] + sn * eps[i];
                const std::vector<double> tf =
                    time_features(t, T, den.config().time_features);
                input.insert(input.end(), tf.begin(), tf.end());

                const std::vector<double>& out = net.forward_cached(input, ws);
                std::vector<double> delta(d);
                for (int i = 0; i < d; ++i) {
                    const double r = out[i] - eps[i];
                    batch_loss += r * r;
                    delta[i] = 2.0 * r / (static_cast<double>(batch) * d);
                }
                net.backward(ws, delta, grad);
            }
            net.add_scaled(grad, -cfg.learning_rate);
            epoch_loss += batch_loss;
            processed += batch;
        }
        epoch_loss /= static_cast<double>(order.size() * d);
        if (!std::isfinite(epoch_loss) || !net.params_finite())
            throw NumericalError("train_mlp: loss diverged at epoch " + std::to_string(epoch));
        trace.push_back(epoch_loss);
    }
    return trace;
}

double gradient_check(const MlpDenoiser& den, std::span<const double> x_t, int t,
                      std::span<const double> epsilon_target, std::uint64_t seed,
                      int n_check) {
    if (static_cast<int>(epsilon_target.size()) != den.dim())
        throw ValidationError("gradient_check: target dimension mismatch");

    // loss(theta) = || eps_hat(x_t, t; theta) - epsilon_target ||^2
    Mlp net = den.net();  // local copy; perturbations stay here
    std::vector<double> input(x_t.begin(), x_t.end());
    const std::vector<double> tf =
        time_features(t, den.schedule().T(), den.config().time_features);
    input.insert(input.end(), tf.begin(), tf.end());

    const auto loss = [&]() {
        const std::vector<double> out = net.forward(input);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double r = out[i] - epsilon_target[i];
            s += r * r;
        }
        return s;
    };

    std::vector<double> grad(net.n_params(), 0.0);
    {
        Mlp::Workspace ws;
        const std::vector<double>& out = net.forward_cached(input, ws);
        std::vector<double> delta(out.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            delta[i] = 2.0 * (out[i] - epsilon_target[i]);
        net.backward(ws, delta, grad);
    }

    RngStream pick = derive_stream(seed, "gradient_check");
    const std::size_t total = net.n_params();
    const std::size_t count = std::min<std::size_t>(n_check, total);
    const double h = 1e-5;
    double worst = 0.0;
    auto params = net.params();
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t idx = static_cast<std::size_t>(pick.uniform_below(total));
        const double saved = params[idx];
        params[idx] = saved + h;
        const double lp = loss();
        params[idx] = saved - h;
        const double lm = loss();
        params[idx] = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        const double rel = std::abs(grad[idx] - numeric) / (std::abs(numeric) + 1e-8);
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace bmk
