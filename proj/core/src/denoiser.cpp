#include "boomerang/denoiser.hpp"

#include <cmath>

#include "boomerang/errors.hpp"

namespace bmk {

std::vector<double> posterior_jump_mean(std::span<const double> x0hat,
                                        std::span<const double> x_hi, double alpha_lo,
                                        double alpha_hi, double beta_eff) {
    if (x0hat.size() != x_hi.size())
        throw ValidationError("posterior_jump_mean: dimension mismatch");
    const double denom = 1.0 - alpha_hi;
    const double c0 = std::sqrt(alpha_lo) * beta_eff / denom;
    const double ct = std::sqrt(1.0 - beta_eff) * (1.0 - alpha_lo) / denom;
    std::vector<double> out(x_hi.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c0 * x0hat[i] + ct * x_hi[i];
    return out;
}

std::vector<double> oracle_reverse_mean(const GaussianMixture& gmm,
                                        std::span<const double> x_t, int t,
                                        const NoiseSchedule& sched) {
    if (t < 1) throw ValidationError("oracle_reverse_mean: t must be >= 1");
    const std::vector<double> x0hat = posterior_mean_x0(gmm, x_t, t, sched);
    return posterior_jump_mean(x0hat, x_t, sched.alpha(t - 1), sched.alpha(t), sched.beta(t));
}

OracleDenoiser::OracleDenoiser(const GaussianMixture& gmm, const NoiseSchedule& sched)
    : gmm_(&gmm), sched_(&sched) {
    gmm.validate();
}

std::vector<double> OracleDenoiser::reverse_mean(std::span<const double> x, int t) const {
    return oracle_reverse_mean(*gmm_, x, t, *sched_);
}

std::vector<double> OracleDenoiser::predict_x0(std::span<const double> x, int t) const {
    return posterior_mean_x0(*gmm_, x, t, *sched_);
}

}  // namespace bmk
