#pragma once

#include <cstdint>

namespace trust_atlas {

/// xorshift64* generator (Marsaglia shifts 12/25/27, multiplier
/// 0x2545F4914F6CDD1D). The 64-bit seed is mixed through one splitmix64 step
/// so that small seeds do not start in a low-entropy state.
///
///   uniform()  = (next() >> 11) * 2^-53              in [0, 1)
///   normal()   = Box-Muller cosine branch on two uniforms, one per call
///
/// Both derived streams are fixed so results port across implementations.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed);

    std::uint64_t next();
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace trust_atlas
