#pragma once

#include <cstdint>

namespace wfdgm {

// Deterministic PRNG (xoshiro256++). The simulator never uses <random>
// distributions because their output is implementation-defined; every draw
// here is reproducible byte-for-byte across platforms.
class Rng {
  public:
    Rng() : Rng(0, 0) {}
    explicit Rng(uint64_t seed, uint64_t stream = 0)
    {
        // split-mix the (seed, stream) pair into the four state words
        uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ull;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            w = z ^ (z >> 31);
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
            s_[0] = 1; // all-zero state is the one forbidden seed
        }
    }

    uint64_t next_u64()
    {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [lo, hi], both ends inclusive
    uint32_t uniform_int(uint32_t lo, uint32_t hi)
    {
        const uint64_t span = static_cast<uint64_t>(hi) - lo + 1;
        // multiply-shift range reduction; bias < 2^-64, and deterministic
        const uint64_t r = next_u64();
        return lo + static_cast<uint32_t>((static_cast<unsigned __int128>(r) * span) >> 64);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

} // namespace wfdgm
