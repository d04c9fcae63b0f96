#ifndef ZEROCAL_RNG_HPP
#define ZEROCAL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace zerocal::rng {

// Counter-based generator built on the SplitMix64 finalizer. Every draw is a
// pure function of (key, counter), so noise streams can be addressed by index
// and are independent of evaluation order. Output is identical across
// platforms, unlike the distributions in <random>.

constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// FNV-1a, used to derive named sub-seeds.
constexpr std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : name) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ull;
    }
    return h;
}

// Independent stream key for a named purpose under one master seed.
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::string_view name) {
    return mix64(mix64(seed) ^ hash_name(name));
}

constexpr std::uint64_t draw_u64(std::uint64_t key, std::uint64_t counter) {
    return mix64(mix64(key) ^ mix64(counter));
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
    return static_cast<double>(draw_u64(key, counter) >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; safe to take a logarithm of.
inline double uniform01_pos(std::uint64_t key, std::uint64_t counter) {
    return static_cast<double>((draw_u64(key, counter) >> 11) + 1) * 0x1.0p-53;
}

inline double uniform(std::uint64_t key, std::uint64_t counter, double lo, double hi) {
    return lo + (hi - lo) * uniform01(key, counter);
}

// Standard normal via Box-Muller; consumes counters 2i and 2i+1.
inline double normal(std::uint64_t key, std::uint64_t i) {
    const double u1 = uniform01_pos(key, 2 * i);
    const double u2 = uniform01(key, 2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Stateful convenience wrapper over the same counter scheme. Uniform and
// normal draws use distinct sub-keys so their counters never collide.
class Sequence {
  public:
    explicit Sequence(std::uint64_t key)
        : uniform_key_(mix64(key ^ 0x75f4a7c15ull)), normal_key_(mix64(key ^ 0x2545f491ull)) {}
    Sequence(std::uint64_t seed, std::string_view name) : Sequence(sub_seed(seed, name)) {}

    std::uint64_t next_u64() { return draw_u64(uniform_key_, uniform_counter_++); }
    double uniform01() { return rng::uniform01(uniform_key_, uniform_counter_++); }
    double uniform(double lo, double hi) { return rng::uniform(uniform_key_, uniform_counter_++, lo, hi); }
    double normal() { return rng::normal(normal_key_, normal_counter_++); }
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t uniform_key_;
    std::uint64_t normal_key_;
    std::uint64_t uniform_counter_ = 0;
    std::uint64_t normal_counter_ = 0;
};

}  // namespace zerocal::rng

#endif  // ZEROCAL_RNG_HPP
