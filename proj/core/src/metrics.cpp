#include "salca/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "salca/errors.hpp"

namespace salca {

std::vector<std::size_t> exact_topk(std::span<const float> values, std::size_t k) {
    if (k > values.size()) {
        throw ParamError("exact_topk: k exceeds input size");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (values[a] != values[b]) {
                              return values[a] > values[b];
                          }
                          return a < b;
                      });
    order.resize(k);
    return order;
}

double index_overlap(std::span<const std::size_t> selected,
                     std::span<const std::size_t> baseline) {
    if (baseline.empty()) {
        throw ParamError("index_overlap: empty baseline");
    }
    std::unordered_set<std::size_t> in_baseline(baseline.begin(), baseline.end());
    std::size_t hits = 0;
    for (const std::size_t i : selected) {
        hits += in_baseline.count(i);
    }
    return static_cast<double>(hits) / static_cast<double>(baseline.size());
}

double topk_overlap(std::span<const float> approx, std::span<const float> exact, std::size_t k) {
    if (approx.size() != exact.size()) {
        throw ParamError("topk_overlap: size mismatch");
    }
    const auto a = exact_topk(approx, k);
    const auto b = exact_topk(exact, k);
    return index_overlap(a, b);
}

}  // namespace salca
