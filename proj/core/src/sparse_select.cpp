#include "salca/sparse_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "salca/errors.hpp"

namespace salca {

HeavyChannelSet find_heavy_channels(const Tensor& keys, double s_f) {
    if (keys.rank() != 2 || keys.count() == 0) {
        throw ParamError("find_heavy_channels: expected a non-empty [n, d] tensor");
    }
    if (!(s_f > 0.0) || s_f > 1.0) {
        throw ParamError("find_heavy_channels: s_f must be in (0, 1]");
    }
    const std::size_t n = keys.dim(0);
    const std::size_t d = keys.dim(1);
    const auto data = keys.f32();

    HeavyChannelSet set;
    set.channel_energy.assign(d, 0.0f);
    {
        std::vector<double> acc(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                acc[j] += std::abs(static_cast<double>(data[i * d + j]));
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            set.channel_energy[j] = static_cast<float>(acc[j]);
        }
    }

    std::size_t r = static_cast<std::size_t>(std::llround(s_f * static_cast<double>(d)));
    r = std::clamp<std::size_t>(r, 1, d);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (set.channel_energy[a] != set.channel_energy[b]) {
                              return set.channel_energy[a] > set.channel_energy[b];
                          }
                          return a < b;  // ties toward the lower channel
                      });
    order.resize(r);
    std::sort(order.begin(), order.end());
    set.indices = std::move(order);
    return set;
}

std::vector<float> estimate_relevance(const QuantizedQuery& query, const QuantizedKeyCore& keys,
                                      bool apply_query_scale) {
    if (query.codes.size() != keys.r) {
        throw ParamError("estimate_relevance: query length does not match key core width");
    }
    std::int32_t query_code_sum = 0;
    for (const std::int8_t c : query.codes) {
        query_code_sum += c;
    }
    const float shared = apply_query_scale ? query.scale : 1.0f;

    std::vector<float> scores(keys.rows);
    for (std::size_t i = 0; i < keys.rows; ++i) {
        const std::uint8_t* row = keys.codes.data() + i * keys.r;
        std::int32_t dot = 0;
        for (std::size_t j = 0; j < keys.r; ++j) {
            dot += static_cast<std::int32_t>(query.codes[j]) * row[j];
        }
        // sum_j q_hat_j * k_hat_ij with k_hat = code*scale + zero factored out.
        scores[i] = shared * (keys.scale[i] * static_cast<float>(dot) +
                              keys.zero[i] * static_cast<float>(query_code_sum));
    }
    return scores;
}

std::vector<std::uint8_t> maxpool_stride1(std::span<const std::uint8_t> codes,
                                          std::size_t r_pool) {
    if (r_pool == 0 || r_pool % 2 == 0) {
        throw ParamError("maxpool_stride1: window must be odd and positive");
    }
    std::vector<std::uint8_t> cur(codes.begin(), codes.end());
    if (r_pool == 1 || cur.empty()) {
        return cur;
    }
    const std::size_t n = cur.size();
    std::vector<std::uint8_t> next(n);

    // Level 1 covers window 3 directly; level L covers window 2L+1 by merging
    // the two level-(L-1) results one position apart. Edges truncate.
    const std::size_t levels = (r_pool - 1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t m = cur[i];
        if (i > 0) m = std::max(m, cur[i - 1]);
        if (i + 1 < n) m = std::max(m, cur[i + 1]);
        next[i] = m;
    }
    cur.swap(next);
    for (std::size_t level = 2; level <= levels; ++level) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint8_t m = 0;
            bool any = false;
            if (i > 0) {
                m = cur[i - 1];
                any = true;
            }
            if (i + 1 < n) {
                m = any ? std::max(m, cur[i + 1]) : cur[i + 1];
                any = true;
            }
            next[i] = any ? m : cur[i];  // single-element input
        }
        cur.swap(next);
    }
    return cur;
}

SelectionResult histogram_topk(std::span<const std::uint8_t> pooled, std::size_t k_target) {
    if (pooled.empty()) {
        throw ParamError("histogram_topk: empty input");
    }
    if (k_target == 0 || k_target > pooled.size()) {
        throw ParamError("histogram_topk: k_target must be in [1, n]");
    }

    SelectionResult result;
    result.k_target = k_target;

    // Pass 1: count codes.
    for (const std::uint8_t c : pooled) {
        ++result.histogram[c];
    }
    ++result.data_passes;

    // Reverse scan over the 256 bins (not a data pass): lowest threshold whose
    // cumulative count from the top reaches k_target.
    std::uint64_t acc = 0;
    int threshold = 255;
    while (threshold >= 0) {
        acc += result.histogram[threshold];
        if (acc >= k_target) {
            break;
        }
        --threshold;
    }
    result.threshold = static_cast<std::uint8_t>(threshold);

    // Pass 2: retain everything at or above the threshold.
    result.indices.reserve(acc);
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        if (pooled[i] >= result.threshold) {
            result.indices.push_back(i);
        }
    }
    ++result.data_passes;

    result.excess = result.indices.size() - k_target;
    return result;
}

std::vector<std::size_t> compact_indices(std::span<const std::uint8_t> mask, std::size_t base) {
    const std::size_t p = mask.size();
    if (p == 0 || (p & (p - 1)) != 0) {
        throw ParamError("compact_indices: mask length must be a power of two");
    }

    struct Lane {
        std::uint8_t valid;
        std::size_t pos;
    };
    std::vector<Lane> lanes(p);
    for (std::size_t i = 0; i < p; ++i) {
        lanes[i] = {static_cast<std::uint8_t>(mask[i] ? 1 : 0), i};
    }

    // Iterative bitonic sort, descending on the mask bit alone; positions ride
    // along. Equal bits never swap, so movement is decided purely by validity.
    for (std::size_t k = 2; k <= p; k <<= 1) {
        for (std::size_t j = k >> 1; j > 0; j >>= 1) {
            for (std::size_t i = 0; i < p; ++i) {
                const std::size_t l = i ^ j;
                if (l <= i) {
                    continue;
                }
                const bool descending = (i & k) == 0;
                const bool swap = descending ? lanes[i].valid < lanes[l].valid
                                             : lanes[i].valid > lanes[l].valid;
                if (swap) {
                    std::swap(lanes[i], lanes[l]);
                }
            }
        }
    }

    std::vector<std::size_t> out;
    for (const Lane& lane : lanes) {
        if (lane.valid) {
            out.push_back(base + lane.pos);
        }
    }
    return out;
}

std::size_t retention_to_k(double retention, std::size_t n) {
    if (!(retention > 0.0) || retention > 1.0) {
        throw ParamError("retention must be in (0, 1]");
    }
    if (n == 0) {
        throw ParamError("retention_to_k: empty sequence");
    }
    const auto k = static_cast<std::size_t>(
        std::ceil(retention * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
}

}  // namespace salca
