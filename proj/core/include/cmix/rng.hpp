#ifndef CMIX_RNG_HPP
#define CMIX_RNG_HPP

#include <cstdint>
#include <random>

namespace cmix {

// SplitMix64 step; used to derive independent-looking substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for a named substream of `base` (e.g. trajectory vs. noise draws).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    s ^= (stream + 1) * 0x517cc1b727220a95ULL;
    return splitmix64(s);
}

// mt19937_64 with an explicit bits->double mapping so that streams are
// reproducible independently of the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace cmix

#endif
