#pragma once

#include "boomerang/rng.hpp"
#include "boomerang/sample.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// One step of the forward chain:
//   x_t = sqrt(1 - beta_t) * x_{t-1} + eps,  eps ~ N(0, beta_t I).
// Requires s.t < T.
Sample forward_step(const Sample& s, const NoiseSchedule& sched, NoiseSource& noise);

// Closed-form jump from clean data to any step:
//   x_t = sqrt(alpha_t) * x_0 + sqrt(1 - alpha_t) * eps,  eps ~ N(0, I).
// Requires x0.t == 0 and t_target in [0, T]. t_target == 0 returns x0.
Sample forward_jump(const Sample& x0, int t_target, const NoiseSchedule& sched,
                    NoiseSource& noise);

}  // namespace bmk
