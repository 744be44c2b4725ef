#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace agri {

/// Seeded RNG with hand-rolled distributions. std:: engines have a
/// standard-specified output sequence but std:: distributions do not, so
/// uniform/gaussian are implemented here to keep runs byte-reproducible
/// across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform in (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    /// Derives an independent stream, e.g. one per subsystem, so adding a
    /// consumer does not shift another consumer's draws.
    Rng fork(uint64_t stream_id) const {
        uint64_t x = seed_ ^ (stream_id + 0x9e3779b97f4a7c15ULL);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return Rng(x);
    }

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace agri
