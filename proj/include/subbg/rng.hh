// Counter-seeded random streams for reproducible event-parallel sampling.
//
// Each primary particle gets its own stream, derived from (master seed,
// primary index) through SplitMix64.  Results are therefore independent of
// how primaries are partitioned across worker threads.
#pragma once

#include <cmath>
#include <cstdint>

namespace subbg {

namespace detail {
inline uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// xoshiro256++ generator.
class Rng {
  public:
    Rng() : Rng(0x853c49e6748fea9bULL) {}

    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) w = detail::splitmix64(x);
    }

    // Stream for one primary: mixes the master seed with the event index.
    static Rng for_event(uint64_t master_seed, uint64_t event_index) {
        uint64_t x = master_seed;
        uint64_t a = detail::splitmix64(x);
        x ^= 0x6a09e667f3bcc909ULL + event_index * 0x9e3779b97f4a7c15ULL;
        uint64_t b = detail::splitmix64(x);
        Rng r;
        uint64_t y = a ^ (b + (event_index << 1) + 1);
        for (auto& w : r.s_) w = detail::splitmix64(y);
        return r;
    }

    uint64_t next() {
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

    // Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as log() argument.
    double uniform_pos() { return ((next() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // Box-Muller; one value per call keeps streams stateless.
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586 * u2);
    }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

    // Isotropic unit vector.
    void isotropic(double& ux, double& uy, double& uz) {
        uz = 2.0 * uniform() - 1.0;
        double phi = 6.283185307179586 * uniform();
        double s = std::sqrt(std::fmax(0.0, 1.0 - uz * uz));
        ux = s * std::cos(phi);
        uy = s * std::sin(phi);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    uint64_t s_[4];
};

}  // namespace subbg
