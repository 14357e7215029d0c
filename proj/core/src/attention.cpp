#include "salca/attention.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "salca/errors.hpp"

namespace salca {

namespace {

void check_indices(std::span<const std::size_t> indices, std::size_t n) {
    if (indices.empty()) {
        throw ParamError("gather: empty index list");
    }
    std::size_t prev = indices[0];
    if (prev >= n) {
        throw ParamError("gather: index out of range");
    }
    for (std::size_t i = 1; i < indices.size(); ++i) {
        if (indices[i] <= prev) {
            throw ParamError("gather: indices must be ascending and unique");
        }
        if (indices[i] >= n) {
            throw ParamError("gather: index out of range");
        }
        prev = indices[i];
    }
}

// Shared kernel; row_at materializes row i of K or V as f32.
AttentionOutput attention_rows(std::span<const float> query, std::size_t k, std::size_t d,
                               const std::function<void(std::size_t, std::span<float>)>& key_at,
                               const std::function<void(std::size_t, std::span<float>)>& value_at,
                               std::size_t segment_width) {
    if (query.size() != d) {
        throw ParamError("attention: query length does not match row width");
    }
    if (k == 0) {
        throw ParamError("attention: empty selection");
    }
    if (segment_width == 0) {
        throw ParamError("attention: segment width must be positive");
    }

    const float inv_sqrt_d = 1.0f / std::sqrt(static_cast<float>(d));
    std::vector<float> row(d);
    std::vector<float> scores(k);
    float qk_max = -std::numeric_limits<float>::infinity();

    // Stage 1: scaled dot products with a running max. One f32 accumulator is
    // carried across segments in channel order, so the segment boundaries
    // cannot change the result.
    for (std::size_t i = 0; i < k; ++i) {
        key_at(i, row);
        float acc = 0.0f;
        for (std::size_t s = 0; s < d; s += segment_width) {
            const std::size_t end = std::min(d, s + segment_width);
            for (std::size_t j = s; j < end; ++j) {
                acc += query[j] * row[j];
            }
        }
        const float score = acc * inv_sqrt_d;
        scores[i] = score;
        if (score > qk_max) {
            qk_max = score;
        }
    }

    // Stage 2: exp-weighted value accumulation and the normalizer. The
    // accumulators are f64 so the result stays within rounding noise of a
    // reference softmax even at 10^5 retained keys.
    AttentionOutput out;
    out.qk_max = qk_max;
    std::vector<double> acc(d, 0.0);
    double denom = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double w = std::exp(static_cast<double>(scores[i]) - qk_max);
        denom += w;
        value_at(i, row);
        for (std::size_t j = 0; j < d; ++j) {
            acc[j] += w * row[j];
        }
    }
    out.denom = static_cast<float>(denom);
    out.out.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        out.out[j] = static_cast<float>(acc[j] / denom);
    }
    return out;
}

}  // namespace

Tensor gather(const Tensor& source, std::span<const std::size_t> indices) {
    if (source.rank() != 2) {
        throw ParamError("gather: expected a [n, d] tensor");
    }
    check_indices(indices, source.dim(0));
    const std::size_t d = source.dim(1);
    const auto data = source.f32();

    std::vector<float> rows(indices.size() * d);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto src = data.subspan(indices[i] * d, d);
        std::copy(src.begin(), src.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    return Tensor::from_f32({indices.size(), d}, std::move(rows));
}

QuantizedRows gather(const QuantizedRows& source, std::span<const std::size_t> indices) {
    check_indices(indices, source.rows);
    QuantizedRows out;
    out.rows = indices.size();
    out.cols = source.cols;
    out.codes.resize(out.rows * out.cols);
    out.scale.resize(out.rows);
    out.zero.resize(out.rows);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        std::copy_n(source.codes.begin() + static_cast<std::ptrdiff_t>(src * source.cols),
                    source.cols, out.codes.begin() + static_cast<std::ptrdiff_t>(i * out.cols));
        out.scale[i] = source.scale[src];
        out.zero[i] = source.zero[src];
    }
    return out;
}

AttentionOutput attention(std::span<const float> query, const QuantizedRows& keys,
                          const QuantizedRows& values, std::size_t segment_width) {
    if (keys.rows != values.rows || keys.cols != values.cols) {
        throw ParamError("attention: key/value shape mismatch");
    }
    const std::size_t d = keys.cols;
    auto materialize = [d](const QuantizedRows& rows, std::size_t i, std::span<float> dst) {
        for (std::size_t j = 0; j < d; ++j) {
            dst[j] = rows.dequant(i, j);
        }
    };
    return attention_rows(
        query, keys.rows, d,
        [&](std::size_t i, std::span<float> dst) { materialize(keys, i, dst); },
        [&](std::size_t i, std::span<float> dst) { materialize(values, i, dst); },
        segment_width);
}

AttentionOutput attention(std::span<const float> query, const Tensor& keys, const Tensor& values,
                          std::size_t segment_width) {
    if (keys.rank() != 2 || values.rank() != 2 || keys.dim(0) != values.dim(0) ||
        keys.dim(1) != values.dim(1)) {
        throw ParamError("attention: key/value shape mismatch");
    }
    const std::size_t d = keys.dim(1);
    const auto kd = keys.f32();
    const auto vd = values.f32();
    return attention_rows(
        query, keys.dim(0), d,
        [&](std::size_t i, std::span<float> dst) {
            const auto src = kd.subspan(i * d, d);
            std::copy(src.begin(), src.end(), dst.begin());
        },
        [&](std::size_t i, std::span<float> dst) {
            const auto src = vd.subspan(i * d, d);
            std::copy(src.begin(), src.end(), dst.begin());
        },
        segment_width);
}

}  // namespace salca
