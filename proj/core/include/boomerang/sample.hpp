#pragma once

#include <vector>

namespace bmk {

// A d-dimensional state vector tagged with its diffusion step.
// t = 0 means clean data; t = T is (approximately) pure noise.
struct Sample {
    std::vector<double> x;
    int t = 0;

    int dim() const { return static_cast<int>(x.size()); }
};

}  // namespace bmk
