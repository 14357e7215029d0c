#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace salca {

// Indices of the k largest values; ties break toward the lower index. Used
// for baselines and reports, never inside the selection hot path.
std::vector<std::size_t> exact_topk(std::span<const float> values, std::size_t k);

// |selected ∩ baseline| / |baseline|.
double index_overlap(std::span<const std::size_t> selected,
                     std::span<const std::size_t> baseline);

// Overlap of the two argTop-k sets, |TopK(approx) ∩ TopK(exact)| / k.
double topk_overlap(std::span<const float> approx, std::span<const float> exact, std::size_t k);

}  // namespace salca
