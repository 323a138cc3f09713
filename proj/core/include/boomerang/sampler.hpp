#pragma once

#include <cstdint>
#include <vector>

#include "boomerang/denoiser.hpp"
#include "boomerang/rng.hpp"
#include "boomerang/sample.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// Knobs of partial forward/reverse local sampling.
struct BoomerangConfig {
    int t_boom = 0;                        // partial-diffusion depth, in [0, T]
    int n_cascade = 1;                     // repeated passes; 1 = vanilla
    std::uint64_t seed = 0;                // root seed of all derived streams
    const StrideSchedule* stride = nullptr;  // optional accelerated schedule
};

// Optional record of a run: exact count of reverse transitions executed and,
// when record is set, every intermediate state. Off by default.
struct SampleTrace {
    std::int64_t reverse_steps = 0;
    bool record = false;
    std::vector<Sample> states;
};

// One reverse transition (base schedule):
//   x_{t-1} = f(x_t, t) + eta,  eta ~ N(0, bar_beta_t I) for t > 1, eta = 0 at t = 1.
Sample reverse_step(const Sample& x_t, const Denoiser& den, const NoiseSchedule& sched,
                    NoiseSource& noise);

// Runs the reverse chain from x_t.t down to 0 (x_t.t transitions).
Sample reverse_chain(Sample x_t, const Denoiser& den, const NoiseSchedule& sched,
                     NoiseSource& noise, SampleTrace* trace = nullptr);

// Strided variant; x_t.t must be 0 or a stride step. Executes one transition
// per stride step at or below x_t.t, with no added noise on the final move.
Sample reverse_chain(Sample x_t, const Denoiser& den, const StrideSchedule& stride,
                     NoiseSource& noise, SampleTrace* trace = nullptr);

// n independent chains from x_T ~ N(0, I) down to 0. Chain i uses the
// derived stream (seed, "global", i); trace (if given) records chain 0 only.
std::vector<Sample> sample_global(const Denoiser& den, const NoiseSchedule& sched, int d,
                                  int n, std::uint64_t seed, int n_threads = 1,
                                  SampleTrace* trace = nullptr);

// One Boomerang pass: a single closed-form forward jump to t_boom followed
// by the reverse chain back to 0. t_boom = 0 returns x0 unchanged. When a
// stride schedule is set, t_boom snaps to the nearest stride step toward 0.
// chain_index selects the rng sub-streams; cfg.n_cascade is ignored here.
Sample boomerang(const Sample& x0, const BoomerangConfig& cfg, const Denoiser& den,
                 const NoiseSchedule& sched, std::uint64_t chain_index = 0,
                 SampleTrace* trace = nullptr);

// cfg.n_cascade repeated Boomerang passes, re-noising the previous output.
// Pass p uses streams derived with cascade index p, so n_cascade = 1 is
// bit-identical to boomerang().
Sample cascade(const Sample& x0, const BoomerangConfig& cfg, const Denoiser& den,
               const NoiseSchedule& sched, std::uint64_t chain_index = 0,
               SampleTrace* trace = nullptr);

}  // namespace bmk
