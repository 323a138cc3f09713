#include "boomerang/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "boomerang/errors.hpp"

namespace bmk {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

void GaussianMixture::validate() const {
    const int K = components();
    if (K == 0) throw ValidationError("GaussianMixture: no components");
    if (static_cast<int>(means.size()) != K || static_cast<int>(variances.size()) != K)
        throw ValidationError("GaussianMixture: weights/means/variances size mismatch");
    const int d = dim();
    if (d == 0) throw ValidationError("GaussianMixture: zero-dimensional means");
    double wsum = 0.0;
    for (int k = 0; k < K; ++k) {
        if (static_cast<int>(means[k].size()) != d)
            throw ValidationError("GaussianMixture: inconsistent mean dimensions");
        if (weights[k] < 0.0) throw ValidationError("GaussianMixture: negative weight");
        if (variances[k] < 0.0) throw ValidationError("GaussianMixture: negative variance");
        wsum += weights[k];
    }
    if (std::abs(wsum - 1.0) >= 1e-12)
        throw ValidationError("GaussianMixture: weights sum to " + std::to_string(wsum));
}

double GaussianMixture::log_density(std::span<const double> x) const {
    const int K = components();
    const int d = dim();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> logp(K);
    for (int k = 0; k < K; ++k) {
        if (variances[k] <= 0.0)
            throw ValidationError("log_density: requires positive variances");
        if (weights[k] == 0.0) {
            logp[k] = -std::numeric_limits<double>::infinity();
            continue;
        }
        logp[k] = std::log(weights[k]) -
                  0.5 * (d * (kLog2Pi + std::log(variances[k])) +
                         squared_distance(x, means[k]) / variances[k]);
        best = std::max(best, logp[k]);
    }
    if (!std::isfinite(best)) return best;
    double acc = 0.0;
    for (int k = 0; k < K; ++k) acc += std::exp(logp[k] - best);
    return best + std::log(acc);
}

std::vector<double> GaussianMixture::sample(RngStream& rng, int* component_out) const {
    const int K = components();
    const double u = rng.uniform01();
    int k = K - 1;
    double acc = 0.0;
    for (int i = 0; i < K; ++i) {
        acc += weights[i];
        if (u < acc) {
            k = i;
            break;
        }
    }
    if (component_out) *component_out = k;
    std::vector<double> x(dim());
    rng.standard_normal(x);
    const double sd = std::sqrt(variances[k]);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = means[k][i] + sd * x[i];
    return x;
}

std::vector<double> posterior_responsibilities(const GaussianMixture& gmm,
                                               std::span<const double> x_t, double alpha) {
    const int K = gmm.components();
    const int d = gmm.dim();
    if (static_cast<int>(x_t.size()) != d)
        throw ValidationError("posterior: x dimension mismatch");
    const double sqrt_a = std::sqrt(alpha);

    std::vector<double> logr(K);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> shifted(d);
    for (int k = 0; k < K; ++k) {
        if (gmm.weights[k] == 0.0) {
            logr[k] = -std::numeric_limits<double>::infinity();
            continue;
        }
        // marginal of x_t for component k: N(sqrt(a) mu_k, (a sigma_k^2 + 1 - a) I)
        const double s2 = alpha * gmm.variances[k] + (1.0 - alpha);
        double q = 0.0;
        for (int i = 0; i < d; ++i) {
            const double dd = x_t[i] - sqrt_a * gmm.means[k][i];
            q += dd * dd;
        }
        logr[k] = std::log(gmm.weights[k]) - 0.5 * (d * std::log(s2) + q / s2);
        best = std::max(best, logr[k]);
    }
    std::vector<double> r(K, 0.0);
    double z = 0.0;
    for (int k = 0; k < K; ++k) {
        r[k] = std::exp(logr[k] - best);
        z += r[k];
    }
    for (int k = 0; k < K; ++k) r[k] /= z;
    return r;
}

std::vector<double> posterior_mean_x0_at_alpha(const GaussianMixture& gmm,
                                               std::span<const double> x_t, double alpha) {
    const int K = gmm.components();
    const int d = gmm.dim();
    const double sqrt_a = std::sqrt(alpha);
    const std::vector<double> r = posterior_responsibilities(gmm, x_t, alpha);

    std::vector<double> out(d, 0.0);
    for (int k = 0; k < K; ++k) {
        if (r[k] == 0.0) continue;
        const double s2 = alpha * gmm.variances[k] + (1.0 - alpha);
        const double gain = sqrt_a * gmm.variances[k] / s2;
        for (int i = 0; i < d; ++i) {
            const double m = gmm.means[k][i] + gain * (x_t[i] - sqrt_a * gmm.means[k][i]);
            out[i] += r[k] * m;
        }
    }
    return out;
}

std::vector<double> posterior_mean_x0(const GaussianMixture& gmm, std::span<const double> x_t,
                                      int t, const NoiseSchedule& sched) {
    if (t < 1) throw ValidationError("posterior_mean_x0: t must be >= 1");
    return posterior_mean_x0_at_alpha(gmm, x_t, sched.alpha(t));
}

}  // namespace bmk
