#pragma once

#include <cstdint>
#include <span>

namespace polylab::rng {

// SplitMix64 finalizer. The whole field generator is built from chained
// applications of this mixer, so any (seed, k, x) cell can be produced
// without generating the rest of the field.
inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Sign fold so negative coordinates mix distinctly from positive ones.
inline constexpr std::uint64_t zigzag32(std::int32_t v) {
    return static_cast<std::uint64_t>((static_cast<std::uint32_t>(v) << 1) ^
                                      static_cast<std::uint32_t>(v >> 31));
}

// Counter-based key for a lattice site: hash chain over seed, time index
// and the coordinates in order.
inline std::uint64_t site_key(std::uint64_t seed, std::int32_t k,
                              std::span<const std::int32_t> x) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(k)));
    for (std::int32_t c : x) h = splitmix64(h ^ zigzag32(c));
    return h;
}

// Derives an independent stream seed from a master seed, for Monte Carlo
// replicas. Same mixer as the field generator.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

// Uniform in the open interval (0,1): 52 random bits centered on half-steps,
// so 0 and 1 are never produced and every value is exactly representable.
inline double uniform01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Inverse standard normal CDF (Wichura's PPND16 rational approximation),
// accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

// Plain sequential SplitMix64 stream, for drawing test cases and experiment
// parameters (the environment fields themselves always use site_key).
class SequentialRng {
  public:
    explicit SequentialRng(std::uint64_t seed) : x_(seed) {}

    std::uint64_t next() {
        x_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = x_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double next01() { return uniform01(next()); }
    // Uniform integer in [lo, hi].
    int next_int(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double next_in(double lo, double hi) { return lo + (hi - lo) * next01(); }

  private:
    std::uint64_t x_;
};

}  // namespace polylab::rng
