#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace bmk {

// Source of standard-normal draws used by the forward and reverse processes.
// Production code uses RngStream; tests may substitute PinnedNoise to pin
// the noise to a known vector and get exact arithmetic.
class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    virtual void standard_normal(std::span<double> out) = 0;

    double standard_normal_scalar() {
        double z;
        standard_normal({&z, 1});
        return z;
    }
};

// Deterministic random stream: std::mt19937_64 core (bit-stable across
// platforms per the standard) with explicit output transforms so the same
// seed yields the same bytes everywhere.
//
// Transforms (fixed, versioned with the checkpoint format):
//   uniform01: (x >> 11) * 2^-53                  -> [0, 1)
//   gaussian : Box-Muller on (1 - u1, u2) pairs   -> N(0, 1)
// A standard_normal fill of size n consumes ceil(n/2) Box-Muller pairs and
// discards the spare value when n is odd, so fills of equal size are
// stream-aligned.
class RngStream final : public NoiseSource {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t n);

    void standard_normal(std::span<double> out) override;

    // Fisher-Yates shuffle driven by uniform_below.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Derives the seed of a sub-stream from a root seed, a purpose tag and up to
// three indices (chain, cascade pass, extra). Splitmix64-style mixing; any
// change to one input decorrelates the whole stream.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

inline RngStream derive_stream(std::uint64_t root, std::string_view tag, std::uint64_t a = 0,
                               std::uint64_t b = 0, std::uint64_t c = 0) {
    return RngStream(derive_seed(root, tag, a, b, c));
}

// Stateless uniform in [0, 1) keyed on (root, tag, indices); for per-item
// decisions that must not depend on evaluation order.
inline double hash01(std::uint64_t root, std::string_view tag, std::uint64_t a = 0,
                     std::uint64_t b = 0, std::uint64_t c = 0) {
    return static_cast<double>(derive_seed(root, tag, a, b, c) >> 11) * 0x1.0p-53;
}

// Test-only noise source: replays a caller-supplied vector of standard-normal
// values cyclically. PinnedNoise({0.0}) turns every noise draw into zero.
class PinnedNoise final : public NoiseSource {
public:
    explicit PinnedNoise(std::vector<double> values);

    void standard_normal(std::span<double> out) override;

private:
    std::vector<double> values_;
    std::size_t pos_ = 0;
};

}  // namespace bmk
