#ifndef QCAP_RNG_HPP
#define QCAP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace qcap {

/// Deterministic 64-bit PRNG (SplitMix64, Steele et al. 2014). Chosen over
/// std::mt19937 front-ends because the stream produced for a given seed is
/// fully specified here, so results reproduce byte-for-byte across
/// standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent sub-stream: mixes the master seed with a stream index so
    /// parallel workers draw from deterministic, non-overlapping sequences.
    static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
        Rng h(master_seed);
        const std::uint64_t a = h.next_u64();
        Rng g(index ^ 0x9e3779b97f4a7c15ULL);
        return Rng(a ^ g.next_u64());
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Marsaglia's polar method (one spare cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qcap

#endif
