#include "boomerang/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boomerang/errors.hpp"

namespace bmk {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
    if (betas_.empty()) throw ValidationError("NoiseSchedule: T must be >= 1");
    const int T = static_cast<int>(betas_.size());
    alphas_.resize(T + 1);
    bar_betas_.resize(T);
    alphas_[0] = 1.0;
    for (int t = 1; t <= T; ++t) {
        const double beta = betas_[t - 1];
        if (!(beta > 0.0 && beta < 1.0))
            throw ValidationError("NoiseSchedule: beta_" + std::to_string(t) +
                                  " = " + std::to_string(beta) + " outside (0, 1)");
        alphas_[t] = alphas_[t - 1] * (1.0 - beta);
        if (!(alphas_[t] > 0.0 && alphas_[t] < alphas_[t - 1]))
            throw ValidationError(
                "NoiseSchedule: alpha underflowed the representable range at t = " +
                std::to_string(t));
        bar_betas_[t - 1] = (1.0 - alphas_[t - 1]) / (1.0 - alphas_[t]) * beta;
    }
}

int NoiseSchedule::check_step(int t) const {
    if (t < 1 || t > T())
        throw ValidationError("step t = " + std::to_string(t) + " outside [1, " +
                              std::to_string(T()) + "]");
    return t;
}

int NoiseSchedule::check_alpha_step(int t) const {
    if (t < 0 || t > T())
        throw ValidationError("step t = " + std::to_string(t) + " outside [0, " +
                              std::to_string(T()) + "]");
    return t;
}

NoiseSchedule build_linear(int T, double beta_min, double beta_max) {
    if (T < 1) throw ValidationError("build_linear: T must be >= 1");
    if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
        throw ValidationError("build_linear: need 0 < beta_min <= beta_max < 1");
    std::vector<double> betas(T);
    for (int t = 1; t <= T; ++t) {
        betas[t - 1] = (T == 1) ? beta_min
                                : beta_min + (beta_max - beta_min) *
                                                 static_cast<double>(t - 1) /
                                                 static_cast<double>(T - 1);
    }
    return NoiseSchedule(std::move(betas));
}

StrideSchedule::StrideSchedule(const NoiseSchedule& base, std::vector<int> steps)
    : base_(&base), steps_(std::move(steps)) {
    if (steps_.empty()) throw ValidationError("StrideSchedule: need at least one step");
    if (steps_.back() != base.T())
        throw ValidationError("StrideSchedule: steps must end at T");
    int prev = 0;
    for (int s : steps_) {
        if (s <= prev || s > base.T())
            throw ValidationError("StrideSchedule: steps must be strictly increasing in [1, T]");
        prev = s;
    }
    const int S = n_steps();
    eff_alphas_.resize(S);
    eff_betas_.resize(S);
    eff_bar_betas_.resize(S);
    for (int k = 0; k < S; ++k) {
        const double alpha_prev = (k == 0) ? 1.0 : base.alpha(steps_[k - 1]);
        const double alpha_cur = base.alpha(steps_[k]);
        eff_alphas_[k] = alpha_cur;
        eff_betas_[k] = 1.0 - alpha_cur / alpha_prev;
        // bar_beta of the strided chain, zero for the jump out of step 0
        eff_bar_betas_[k] =
            (k == 0) ? 0.0 : (1.0 - alpha_prev) / (1.0 - alpha_cur) * eff_betas_[k];
    }
}

int StrideSchedule::snap_down(int t) const {
    if (t < 0 || t > base_->T())
        throw ValidationError("snap_down: t outside [0, T]");
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t);
    if (it == steps_.begin()) return 0;
    return *(it - 1);
}

int StrideSchedule::index_of(int s) const {
    auto it = std::lower_bound(steps_.begin(), steps_.end(), s);
    if (it == steps_.end() || *it != s)
        throw ValidationError("index_of: " + std::to_string(s) + " is not a stride step");
    return static_cast<int>(it - steps_.begin());
}

StrideSchedule build_stride(const NoiseSchedule& sched, int S) {
    const int T = sched.T();
    if (S < 1) throw ValidationError("build_stride: S must be >= 1");
    if (S > T) throw ValidationError("build_stride: S must be <= T");
    std::vector<int> steps(S);
    for (int k = 0; k < S; ++k) {
        steps[k] = static_cast<int>(
            std::llround(static_cast<double>(k + 1) * static_cast<double>(T) /
                         static_cast<double>(S)));
    }
    steps.back() = T;
    return StrideSchedule(sched, std::move(steps));
}

ReverseMove move_at(const NoiseSchedule& sched, int t) {
    if (t < 1 || t > sched.T()) throw ValidationError("move_at: t outside [1, T]");
    return ReverseMove{t,
                       t - 1,
                       sched.alpha(t),
                       sched.alpha(t - 1),
                       sched.beta(t),
                       sched.bar_beta(t)};
}

ReverseMove stride_move_at(const StrideSchedule& stride, int k) {
    if (k < 0 || k >= stride.n_steps())
        throw ValidationError("stride_move_at: k outside [0, S)");
    const int t_hi = stride.steps()[k];
    const int t_lo = (k == 0) ? 0 : stride.steps()[k - 1];
    const double alpha_lo = (k == 0) ? 1.0 : stride.base().alpha(t_lo);
    return ReverseMove{t_hi,
                       t_lo,
                       stride.effective_alphas()[k],
                       alpha_lo,
                       stride.effective_betas()[k],
                       stride.effective_bar_betas()[k]};
}

}  // namespace bmk
