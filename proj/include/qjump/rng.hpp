// rng.hpp — deterministic per-trajectory random streams.
//
// Each trajectory owns one stream identified by (base_seed, stream_index).
// Streams are seeded independently through SplitMix64, so any worker can
// reconstruct stream i without touching the draws of stream j; results are
// therefore independent of thread scheduling.

#pragma once

#include <array>
#include <cstdint>

namespace qjump {

// SplitMix64: seed expander (Vigna / Steele et al.).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ engine with per-stream seeding.
class RandomStream {
  public:
    RandomStream(std::uint64_t base_seed, std::uint64_t stream_index)
        : base_seed_(base_seed), stream_index_(stream_index) {
        // Mix the pair so that neighbouring indices land far apart.
        std::uint64_t s = base_seed ^ (0xd1342543de82ef95ULL * (stream_index + 1));
        for (auto& w : state_) w = splitmix64(s);
        // xoshiro must not start from the all-zero state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t base_seed() const { return base_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform draw in (0, 1]; 53-bit resolution, exactly one engine call.
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t base_seed_;
    std::uint64_t stream_index_;
    std::array<std::uint64_t, 4> state_{};
};

} // namespace qjump
