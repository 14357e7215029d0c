#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "salca/quantizer.hpp"
#include "salca/tensor.hpp"

namespace salca {

// Heavy feature channels ranked by aggregate magnitude.
struct HeavyChannelSet {
    std::vector<std::size_t> indices;   // ascending, size r
    std::vector<float> channel_energy;  // sum_i |K[i][j]| for every channel j

    std::size_t r() const { return indices.size(); }
};

// Picks r = round(s_f * d) channels with the largest energy; equal energies
// break toward the lower channel index.
HeavyChannelSet find_heavy_channels(const Tensor& keys, double s_f);

// Integer code-product relevance: accumulates query codes against key codes
// in int32, then applies the per-row key factors. The shared query scale is a
// positive constant, so dropping it (apply_query_scale = false) permutes
// nothing in the ranking.
std::vector<float> estimate_relevance(const QuantizedQuery& query, const QuantizedKeyCore& keys,
                                      bool apply_query_scale = true);

// Stride-1 max pooling of window r_pool (odd) with truncated edges. Built on
// the reuse recurrence mp(r, i) = max(mp(r-2, i-1), mp(r-2, i+1)); the level
// count is (r_pool - 1) / 2 + 1 including the input.
std::vector<std::uint8_t> maxpool_stride1(std::span<const std::uint8_t> codes,
                                          std::size_t r_pool);

struct SelectionResult {
    std::uint8_t threshold = 0;               // lowest retained code
    std::vector<std::size_t> indices;         // ascending
    std::array<std::uint64_t, 256> histogram{};
    std::size_t k_target = 0;
    std::size_t excess = 0;                   // indices.size() - k_target
    int data_passes = 0;                      // instrumentation; always 2
};

// Histogram-threshold Top-K: one counting pass, a reverse scan over the 256
// bins for the lowest threshold whose cumulative count reaches k_target, and
// one filtering pass. Retains every index at or above the threshold, so the
// result is a superset of the exact pooled Top-K.
SelectionResult histogram_topk(std::span<const std::uint8_t> pooled, std::size_t k_target);

// Absolute indices of set mask bits via a bitonic compaction network: the
// comparators order by mask bit only (descending) and carry positions
// alongside. |mask| must be a power of two. Output order is whatever the
// network produces.
std::vector<std::size_t> compact_indices(std::span<const std::uint8_t> mask, std::size_t base);

// k_target from a retention fraction, rounded up, clamped to [1, n].
std::size_t retention_to_k(double retention, std::size_t n);

}  // namespace salca
