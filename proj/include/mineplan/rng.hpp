#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace mineplan {

// splitmix64 step, used to mix stream identifiers into seeds
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-(run, generation, individual) stream derivation so that
// results do not depend on evaluation order or thread count.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = run_seed;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b * 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }

    double normal(double mean, double sigma) {
        if (sigma <= 0.0) return mean;  // degenerate draw, consumes nothing
        return std::normal_distribution<double>(mean, sigma)(eng_);
    }

    std::uint64_t next_u64() { return eng_(); }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// Linear-weight biased pick; weights must be nonnegative with positive sum.
inline size_t pick_weighted(std::span<const double> weights, Rng& rng) {
    if (weights.empty()) throw std::invalid_argument("pick_weighted: empty weights");
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw std::invalid_argument("pick_weighted: negative weight");
        total += w;
    }
    if (total <= 0) throw std::invalid_argument("pick_weighted: zero total weight");
    double u = rng.uniform01() * total;
    double acc = 0;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace mineplan
