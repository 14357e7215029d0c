#pragma once

#include <cstdint>
#include <vector>

#include "salca/tensor.hpp"

namespace salca {

// Synthetic decode-step workload. Keys follow a per-channel profile: each
// channel has a characteristic mean, heavy channels a much larger one, plus
// unit in-channel noise, so magnitude varies greatly across channels and
// little within one. Salient tokens come in contiguous runs and receive a
// score boost confined to the heavy channels.
struct SyntheticSpec {
    std::size_t n = 10240;           // sequence length
    std::size_t d = 128;             // feature dimension
    std::size_t heavy_count = 32;    // planted heavy channels
    double heavy_gain = 10.0;        // mean-|value| ratio of heavy vs other channels
    double cluster_run = 8.0;        // mean contiguous salient run length
    double salient_fraction = 0.10;  // share of tokens that are salient
    double salient_boost = 8.0;      // score boost in units of base score stddev
    std::uint64_t seed = 1;

    void validate() const;
};

struct Workload {
    Tensor query;  // f32 [d]
    Tensor key;    // f32 [n, d]
    Tensor value;  // f32 [n, d]

    // Planted ground truth, ascending.
    std::vector<std::size_t> heavy_channels;
    std::vector<std::size_t> salient_tokens;
};

// Deterministic in the seed: two calls with the same spec produce bit-equal
// tensors. Guarantees that exactly heavy_count channels have mean absolute
// value >= heavy_gain times that of every other channel.
Workload generate_workload(const SyntheticSpec& spec);

}  // namespace salca
