#pragma once

#include <span>
#include <vector>

#include "salca/quantizer.hpp"
#include "salca/tensor.hpp"

namespace salca {

// Row gather for the retained token set. Indices must be ascending, unique,
// and in range.
Tensor gather(const Tensor& source, std::span<const std::size_t> indices);
QuantizedRows gather(const QuantizedRows& source, std::span<const std::size_t> indices);

struct AttentionOutput {
    std::vector<float> out;  // d values
    float qk_max = 0.0f;     // running max of scaled scores
    float denom = 0.0f;      // sum of exp(s_i - qk_max)
};

// Two-stage attention over the gathered rows. Stage one computes the scaled
// scores s_i = (q . k_i) / sqrt(d) in f32 with a strict left-to-right channel
// accumulation (segment_width only models delivery granularity, so any width
// gives bit-identical results) while tracking the maximum. Stage two
// accumulates exp(s_i - qk_max) weighted values and the normalizer in one
// pass over the stored scores.
AttentionOutput attention(std::span<const float> query, const QuantizedRows& keys,
                          const QuantizedRows& values, std::size_t segment_width = 32);
AttentionOutput attention(std::span<const float> query, const Tensor& keys,
                          const Tensor& values, std::size_t segment_width = 32);

}  // namespace salca
