// Seeding. Every replication gets its own stream derived from the master
// seed, so results never depend on scheduling.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mixbound {

inline constexpr std::uint64_t default_seed = 20240611ULL;

/// One SplitMix64 output step.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`: splitmix64(master ^ splitmix64(index)).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index));
}

/// Nested derivation, e.g. derive_seed(master, {experiment, rep}).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = master;
    for (auto p : path) s = derive_seed(s, p);
    return s;
}

/// SplitMix64 as a bit generator. Seeding is free, which matters because
/// every replica block opens its own stream.
struct SplitMixEngine {
    using result_type = std::uint64_t;
    std::uint64_t state;

    explicit SplitMixEngine(std::uint64_t seed) : state(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() {
        const auto out = splitmix64(state);
        state += 0x9E3779B97F4A7C15ULL;
        return out;
    }
};

/// Engine plus a standard normal that keeps its cached second variate.
template <typename E>
struct BasicSampler {
    E eng;
    std::normal_distribution<double> nd{0.0, 1.0};

    explicit BasicSampler(std::uint64_t seed) : eng(seed) {}
    double normal() { return nd(eng); }
    double uniform() { return 1.0 - std::generate_canonical<double, 64>(eng); }
};

using Engine = SplitMixEngine;
using Sampler = BasicSampler<Engine>;

}  // namespace mixbound
