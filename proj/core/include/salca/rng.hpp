#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace salca {

// Deterministic random stream. mt19937_64 output is fully specified by the
// standard, and the distribution transforms below are hand-rolled because
// std::normal_distribution and friends are implementation-defined; the same
// seed must reproduce the same tensors everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, bound); bound must be positive.
    std::uint64_t next_below(std::uint64_t bound);

    // Standard normal via Box-Muller, second value cached.
    double next_normal();

    // k distinct values from [0, n), ascending order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace salca
