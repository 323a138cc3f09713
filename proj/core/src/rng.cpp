#include "boomerang/rng.hpp"

#include <cmath>
#include <numbers>

#include "boomerang/errors.hpp"

namespace bmk {

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0) throw ValidationError("uniform_below: n must be >= 1");
    if (n == 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

void RngStream::standard_normal(std::span<double> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        // u1 in (0, 1] so log(u1) is finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        out[i++] = r * std::cos(theta);
        if (i < out.size()) out[i++] = r * std::sin(theta);
    }
}

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
    // FNV-1a over the tag, then splitmix64 rounds folding in each index.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : tag) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = splitmix64(root ^ h);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    return s;
}

PinnedNoise::PinnedNoise(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("PinnedNoise: need at least one value");
}

void PinnedNoise::standard_normal(std::span<double> out) {
    for (double& v : out) {
        v = values_[pos_];
        pos_ = (pos_ + 1) % values_.size();
    }
}

}  // namespace bmk
