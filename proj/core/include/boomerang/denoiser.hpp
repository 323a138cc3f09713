#pragma once

#include <span>
#include <vector>

#include "boomerang/gmm.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// Reverse-mean map f(x_t, t): the mean of p(x_{t-1} | x_t). Implementations
// must be deterministic in (x, t) and safe to call concurrently.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual int dim() const = 0;

    // f(x_t, t) for a move on the base schedule, t in [1, T].
    virtual std::vector<double> reverse_mean(std::span<const double> x, int t) const = 0;

    // Estimate of E[x0 | x_t]; lets the sampler assemble reverse means for
    // strided jumps.
    virtual std::vector<double> predict_x0(std::span<const double> x, int t) const = 0;
};

// Mean of q(x_lo | x_hi, x0) for a jump with signal levels (alpha_lo,
// alpha_hi) and effective variance beta_eff, evaluated at x0 = x0hat:
//   sqrt(alpha_lo) beta_eff / (1 - alpha_hi) * x0hat
//     + sqrt(1 - beta_eff) (1 - alpha_lo) / (1 - alpha_hi) * x_hi
std::vector<double> posterior_jump_mean(std::span<const double> x0hat,
                                        std::span<const double> x_hi, double alpha_lo,
                                        double alpha_hi, double beta_eff);

// f(x_t, t) in closed form when the target is a Gaussian mixture: the
// forward-posterior mean with x0 replaced by E[x0 | x_t]. Requires t >= 1.
std::vector<double> oracle_reverse_mean(const GaussianMixture& gmm,
                                        std::span<const double> x_t, int t,
                                        const NoiseSchedule& sched);

// Exact denoiser for Gaussian-mixture targets; ground truth for every
// learned component. Holds references; gmm and sched must outlive it.
class OracleDenoiser final : public Denoiser {
public:
    OracleDenoiser(const GaussianMixture& gmm, const NoiseSchedule& sched);

    int dim() const override { return gmm_->dim(); }
    std::vector<double> reverse_mean(std::span<const double> x, int t) const override;
    std::vector<double> predict_x0(std::span<const double> x, int t) const override;

    const GaussianMixture& mixture() const { return *gmm_; }

private:
    const GaussianMixture* gmm_;
    const NoiseSchedule* sched_;
};

}  // namespace bmk
