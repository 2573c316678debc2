#pragma once

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <array>
#include <cstdint>
#include <limits>

namespace assetsim {

/// xoshiro256** seeded through SplitMix64. Every (master seed, stream index) pair
/// names an independent reproducible stream, so paths and replications can run on
/// any thread without sharing generator state.
class Rng {
public:
    using result_type = std::uint64_t;

    Rng(std::uint64_t master_seed, std::uint64_t stream) {
        std::uint64_t sm = master_seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        sm = splitmix64(sm) ^ stream;
        for (auto& word : state_) word = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double normal() { return normal_(*this); }

    /// Uniform on {0, ..., n - 1}.
    std::size_t index(std::size_t n) {
        return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(*this);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace assetsim
