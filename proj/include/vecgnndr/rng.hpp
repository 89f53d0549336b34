#ifndef VECGNNDR_RNG_HPP
#define VECGNNDR_RNG_HPP

#include <cstdint>
#include <random>

#include "vecgnndr/types.hpp"

namespace vecgnndr {

// Deterministic random stream. Gaussian variates use Box-Muller on top of
// mt19937_64 so that sequences are identical across platforms and library
// versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal.
    double normal();

    // Circularly symmetric complex Gaussian CN(0, var): real and imaginary
    // parts independent N(0, var/2).
    cplx cnormal(double var);

    VectorXcd cnormal_vec(int n, double var);

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Splitmix64-style stream derivation: the master seed and stream index are
// mixed through two splitmix rounds, and the result seeds the stream engine.
// Distinct indices give statistically independent streams.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index);

inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(mix_seed(master_seed, index));
}

}  // namespace vecgnndr

#endif
