#include "boomerang/forward.hpp"

#include <cmath>
#include <string>

#include "boomerang/errors.hpp"

namespace bmk {

Sample forward_step(const Sample& s, const NoiseSchedule& sched, NoiseSource& noise) {
    if (s.t < 0 || s.t >= sched.T())
        throw ValidationError("forward_step: cannot step past T (current t = " +
                              std::to_string(s.t) + ")");
    const int t = s.t + 1;
    const double beta = sched.beta(t);
    const double keep = std::sqrt(1.0 - beta);
    const double scale = std::sqrt(beta);

    Sample out;
    out.t = t;
    out.x.resize(s.x.size());
    noise.standard_normal(out.x);
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] = keep * s.x[i] + scale * out.x[i];
    return out;
}

Sample forward_jump(const Sample& x0, int t_target, const NoiseSchedule& sched,
                    NoiseSource& noise) {
    if (x0.t != 0) throw ValidationError("forward_jump: input must be at step 0");
    if (t_target < 0 || t_target > sched.T())
        throw ValidationError("forward_jump: t_target outside [0, T]");
    if (t_target == 0) return x0;

    const double alpha = sched.alpha(t_target);
    const double keep = std::sqrt(alpha);
    const double scale = std::sqrt(1.0 - alpha);

    Sample out;
    out.t = t_target;
    out.x.resize(x0.x.size());
    noise.standard_normal(out.x);
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] = keep * x0.x[i] + scale * out.x[i];
    return out;
}

}  // namespace bmk
