#ifndef AFFINE_RNG_HPP
#define AFFINE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace affine {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded generator with hand-rolled distributions so that streams are
// bit-stable across standard library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

    // Deterministic independent stream derived from (this seed, index).
    Rng derive(uint64_t index) const { return Rng(splitmix64(seed_ ^ (0x632be59bd9b4e019ULL * (index + 1)))); }

    uint64_t bits() { return eng_(); }

    double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double normal() {
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 6.283185307179586476925 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    int index(int n) { return static_cast<int>(bits() % static_cast<uint64_t>(n)); }

private:
    uint64_t seed_;
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace affine

#endif
