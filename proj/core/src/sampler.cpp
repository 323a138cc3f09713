#include "boomerang/sampler.hpp"

#include <cmath>
#include <string>

#include "boomerang/errors.hpp"
#include "boomerang/forward.hpp"
#include "boomerang/parallel.hpp"

namespace bmk {

namespace {

// Applies one reverse move: mean + eta, eta ~ N(0, bar_beta_eff I), except
// that the move landing on step 0 adds no noise (Alg. 1's eta = 0 case is
// the t = 1 move of the base chain).
Sample apply_move(const Sample& x, const ReverseMove& mv, std::vector<double> mean,
                  NoiseSource& noise) {
    Sample out;
    out.t = mv.t_lo;
    out.x = std::move(mean);
    if (mv.bar_beta_eff > 0.0) {
        std::vector<double> eta(out.x.size());
        noise.standard_normal(eta);
        const double sd = std::sqrt(mv.bar_beta_eff);
        for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += sd * eta[i];
    }
    return out;
}

void record(SampleTrace* trace, const Sample& s) {
    if (trace) {
        ++trace->reverse_steps;
        if (trace->record) trace->states.push_back(s);
    }
}

}  // namespace

Sample reverse_step(const Sample& x_t, const Denoiser& den, const NoiseSchedule& sched,
                    NoiseSource& noise) {
    if (x_t.t < 1)
        throw ValidationError("reverse_step: t must be >= 1 (got " + std::to_string(x_t.t) +
                              ")");
    const ReverseMove mv = move_at(sched, x_t.t);
    return apply_move(x_t, mv, den.reverse_mean(x_t.x, x_t.t), noise);
}

Sample reverse_chain(Sample x_t, const Denoiser& den, const NoiseSchedule& sched,
                     NoiseSource& noise, SampleTrace* trace) {
    while (x_t.t > 0) {
        x_t = reverse_step(x_t, den, sched, noise);
        record(trace, x_t);
    }
    return x_t;
}

Sample reverse_chain(Sample x_t, const Denoiser& den, const StrideSchedule& stride,
                     NoiseSource& noise, SampleTrace* trace) {
    if (x_t.t == 0) return x_t;
    int k = stride.index_of(x_t.t);
    while (k >= 0) {
        const ReverseMove mv = stride_move_at(stride, k);
        // E[x0 | x_t] at the current base step, then the strided posterior mean
        const std::vector<double> x0hat = den.predict_x0(x_t.x, mv.t_hi);
        std::vector<double> mean =
            posterior_jump_mean(x0hat, x_t.x, mv.alpha_lo, mv.alpha_hi, mv.beta_eff);
        x_t = apply_move(x_t, mv, std::move(mean), noise);
        record(trace, x_t);
        --k;
    }
    return x_t;
}

std::vector<Sample> sample_global(const Denoiser& den, const NoiseSchedule& sched, int d,
                                  int n, std::uint64_t seed, int n_threads,
                                  SampleTrace* trace) {
    if (n < 1) throw ValidationError("sample_global: n must be >= 1");
    if (d < 1) throw ValidationError("sample_global: d must be >= 1");
    std::vector<Sample> out(n);
    parallel_for(static_cast<std::size_t>(n), n_threads, [&](std::size_t i) {
        RngStream rng = derive_stream(seed, "global", i);
        Sample x;
        x.t = sched.T();
        x.x.resize(d);
        rng.standard_normal(x.x);
        out[i] = reverse_chain(std::move(x), den, sched, rng, i == 0 ? trace : nullptr);
    });
    return out;
}

namespace {

// One Boomerang pass with explicit cascade index for stream derivation.
Sample boomerang_pass(const Sample& x0, const BoomerangConfig& cfg, const Denoiser& den,
                      const NoiseSchedule& sched, std::uint64_t chain_index,
                      std::uint64_t pass_index, SampleTrace* trace) {
    if (x0.t != 0) throw ValidationError("boomerang: input must be at step 0");
    if (cfg.t_boom < 0 || cfg.t_boom > sched.T())
        throw ValidationError("boomerang: t_boom outside [0, T]");

    int t_boom = cfg.t_boom;
    if (cfg.stride) t_boom = cfg.stride->snap_down(t_boom);
    if (t_boom == 0) return x0;

    RngStream jump_rng = derive_stream(cfg.seed, "boomerang/jump", chain_index, pass_index);
    RngStream rev_rng = derive_stream(cfg.seed, "boomerang/reverse", chain_index, pass_index);
    Sample x_t = forward_jump(x0, t_boom, sched, jump_rng);
    if (cfg.stride) return reverse_chain(std::move(x_t), den, *cfg.stride, rev_rng, trace);
    return reverse_chain(std::move(x_t), den, sched, rev_rng, trace);
}

}  // namespace

Sample boomerang(const Sample& x0, const BoomerangConfig& cfg, const Denoiser& den,
                 const NoiseSchedule& sched, std::uint64_t chain_index, SampleTrace* trace) {
    return boomerang_pass(x0, cfg, den, sched, chain_index, 0, trace);
}

Sample cascade(const Sample& x0, const BoomerangConfig& cfg, const Denoiser& den,
               const NoiseSchedule& sched, std::uint64_t chain_index, SampleTrace* trace) {
    if (cfg.n_cascade < 1) throw ValidationError("cascade: n_cascade must be >= 1");
    Sample x = x0;
    for (int pass = 0; pass < cfg.n_cascade; ++pass) {
        x = boomerang_pass(x, cfg, den, sched, chain_index,
                           static_cast<std::uint64_t>(pass), trace);
    }
    return x;
}

}  // namespace bmk
