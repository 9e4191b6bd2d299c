#ifndef SMCKIT_RNG_HPP
#define SMCKIT_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "smckit/matrix.hpp"

namespace smckit {

// Deterministic seed derivation for independent streams (replicates, stages).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// mt19937_64 with hand-rolled uniform/normal transforms so that draws are
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller
    double normal();

    // uniform integer in [0, n), rejection sampled
    std::uint64_t uniform_below(std::uint64_t n);

    // first k entries of a seeded permutation of 0..n-1
    std::vector<Index> sample_without_replacement(Index n, Index k);

    Matrix normal_matrix(Index rows, Index cols);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace smckit

#endif
