#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace otfs {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable derivation of stream seeds from a base seed and task indices;
// the same (base, indices) always yields the same stream on any platform.
inline uint64_t mix_seed(uint64_t base, uint64_t a, uint64_t b = 0) {
    return splitmix64(splitmix64(base ^ (a * 0xd1342543de82ef95ULL)) ^ b);
}

// Seeded generator with self-contained uniform/Gaussian sampling so draws
// are bit-identical across standard libraries.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0,1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    uint64_t uniform_below(uint64_t n) {
        // rejection keeps the distribution exact
        const uint64_t limit = n * (UINT64_MAX / n);
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // standard normal via Box-Muller
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // circularly-symmetric complex Gaussian with E|z|^2 = sigma2
    std::complex<double> cgaussian(double sigma2) {
        const double s = std::sqrt(sigma2 / 2.0);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace otfs
