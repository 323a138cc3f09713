#pragma once

#include <span>
#include <vector>

#include "boomerang/rng.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// Isotropic Gaussian mixture target p(x0): weights w_k, means mu_k,
// covariances sigma_k^2 I. A zero-variance component is a point mass,
// allowed for degenerate tests (log_density then requires all variances
// positive).
struct GaussianMixture {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<double> variances;

    int components() const { return static_cast<int>(weights.size()); }
    int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }

    // Throws ValidationError on inconsistent shapes, negative weights or
    // variances, or weights not summing to 1 within 1e-12.
    void validate() const;

    double log_density(std::span<const double> x) const;

    // Draws x0 ~ p(x0); component_out receives the chosen component index.
    std::vector<double> sample(RngStream& rng, int* component_out = nullptr) const;
};

// E[x0 | x_t] under x0 ~ gmm and x_t | x0 ~ N(sqrt(alpha_t) x0, (1-alpha_t) I).
// Component responsibilities are computed in the log domain with
// log-sum-exp, so no finite input can produce NaN. Requires t >= 1.
//
//   r_k ∝ w_k N(x_t; sqrt(a) mu_k, (a sigma_k^2 + 1 - a) I)
//   m_k = mu_k + sqrt(a) sigma_k^2 / (a sigma_k^2 + 1 - a) * (x_t - sqrt(a) mu_k)
//   E[x0 | x_t] = sum_k r_k m_k
std::vector<double> posterior_mean_x0(const GaussianMixture& gmm, std::span<const double> x_t,
                                      int t, const NoiseSchedule& sched);

// Same computation for an arbitrary signal level alpha in (0, 1); used by
// strided reverse moves.
std::vector<double> posterior_mean_x0_at_alpha(const GaussianMixture& gmm,
                                               std::span<const double> x_t, double alpha);

// Posterior responsibilities r_k at signal level alpha (sums to 1).
std::vector<double> posterior_responsibilities(const GaussianMixture& gmm,
                                               std::span<const double> x_t, double alpha);

}  // namespace bmk
