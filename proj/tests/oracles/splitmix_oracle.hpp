#pragma once

// Standalone SplitMix64, written from the published constants only. Shares no
// code with the engine's generator.

#include <cstdint>
#include <cstring>

namespace oracle {

struct SplitMix {
    uint64_t x;

    uint64_t next() {
        x = x + 0x9E3779B97F4A7C15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // top 53 bits scaled by 2^-53
    double unit() { return (double)(next() >> 11) / 9007199254740992.0; }
};

inline uint64_t bits(double d) {
    uint64_t u;
    std::memcpy(&u, &d, sizeof u);
    return u;
}

}  // namespace oracle
