#pragma once

#include <vector>

namespace bmk {

// Precomputed diffusion noise schedule.
//
// Step indices are 1-based: beta(t), bar_beta(t) for t in [1, T] and
// alpha(t) for t in [0, T] with alpha(0) = 1 (step 0 is clean data).
// Storage convention: betas()[t-1] = beta_t, bar_betas()[t-1] = bar_beta_t,
// alphas()[t] = alpha_t (size T+1).
//
//   alpha_t     = prod_{i<=t} (1 - beta_i)
//   bar_beta_t  = (1 - alpha_{t-1}) / (1 - alpha_t) * beta_t
//
// Immutable after construction; safe for concurrent reads.
class NoiseSchedule {
public:
    explicit NoiseSchedule(std::vector<double> betas);

    int T() const { return static_cast<int>(betas_.size()); }
    double beta(int t) const { return betas_[check_step(t) - 1]; }
    double alpha(int t) const { return alphas_[check_alpha_step(t)]; }
    double bar_beta(int t) const { return bar_betas_[check_step(t) - 1]; }

    const std::vector<double>& betas() const { return betas_; }
    const std::vector<double>& alphas() const { return alphas_; }
    const std::vector<double>& bar_betas() const { return bar_betas_; }

private:
    int check_step(int t) const;        // t in [1, T]
    int check_alpha_step(int t) const;  // t in [0, T]

    std::vector<double> betas_;
    std::vector<double> alphas_;
    std::vector<double> bar_betas_;
};

// Linear beta ramp from beta_min at t=1 to beta_max at t=T. The DDPM
// reference defaults are (1e-4, 0.02).
NoiseSchedule build_linear(int T, double beta_min = 1e-4, double beta_max = 0.02);

// Subsequence of base steps executing an accelerated reverse process.
// steps() is strictly increasing within {1..T} and ends at T. Jump k runs
// from steps[k-1] (or 0 for k=0) to steps[k] with effective variance
//   beta'_k = 1 - alpha_{steps[k]} / alpha_{steps[k-1]}.
class StrideSchedule {
public:
    StrideSchedule(const NoiseSchedule& base, std::vector<int> steps);

    const NoiseSchedule& base() const { return *base_; }
    int n_steps() const { return static_cast<int>(steps_.size()); }
    const std::vector<int>& steps() const { return steps_; }
    const std::vector<double>& effective_alphas() const { return eff_alphas_; }
    const std::vector<double>& effective_betas() const { return eff_betas_; }
    const std::vector<double>& effective_bar_betas() const { return eff_bar_betas_; }

    // Largest stride step <= t, or 0 when t is below the first step.
    int snap_down(int t) const;
    // Position of base step s within steps(); rejects non-members.
    int index_of(int s) const;

private:
    const NoiseSchedule* base_;
    std::vector<int> steps_;
    std::vector<double> eff_alphas_;
    std::vector<double> eff_betas_;
    std::vector<double> eff_bar_betas_;
};

// S steps evenly spaced (rounded) over {1..T}, always including T.
StrideSchedule build_stride(const NoiseSchedule& sched, int S);

// One reverse transition of the (possibly strided) chain: from base step
// t_hi down to base step t_lo with effective forward variance beta_eff.
struct ReverseMove {
    int t_hi = 0;
    int t_lo = 0;
    double alpha_hi = 0.0;
    double alpha_lo = 1.0;
    double beta_eff = 0.0;
    double bar_beta_eff = 0.0;
};

// Move t -> t-1 of the base chain.
ReverseMove move_at(const NoiseSchedule& sched, int t);
// Move steps[k] -> steps[k-1] (or 0 when k == 0) of the strided chain.
ReverseMove stride_move_at(const StrideSchedule& stride, int k);

}  // namespace bmk
