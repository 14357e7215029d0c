#include "salca/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "salca/errors.hpp"

namespace salca {

std::uint64_t Rng::next_below(std::uint64_t bound) {
    if (bound == 0) {
        throw ParamError("next_below: bound must be positive");
    }
    // Rejection sampling: discard the biased tail of the 64-bit range.
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t x = gen_();
    while (x < threshold) {
        x = gen_();
    }
    return x % bound;
}

double Rng::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) {
        throw ParamError("sample_without_replacement: k exceeds population");
    }
    // Floyd's algorithm: k iterations regardless of n.
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        const std::size_t t = static_cast<std::size_t>(next_below(j + 1));
        if (!chosen.insert(t).second) {
            chosen.insert(j);
        }
    }
    std::vector<std::size_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace salca
