#include "salca/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "salca/errors.hpp"
#include "salca/float16.hpp"

namespace salca {

namespace {

void require_finite(std::span<const float> values, const char* what) {
    for (const float v : values) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(what) + ": input contains non-finite values");
        }
    }
}

long clamp_code(double x, long lo, long hi) {
    const long c = std::llround(x);  // half away from zero
    return std::clamp(c, lo, hi);
}

struct RowRange {
    float lo;
    float hi;
};

RowRange row_range(std::span<const float> row) {
    float lo = row[0];
    float hi = row[0];
    for (const float v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

}  // namespace

Tensor QuantizedKeyCore::codes_tensor() const {
    return Tensor::pack_u2({rows, r}, codes);
}

QuantizedKeyCore quant_key_2bit_asym(const Tensor& key_core) {
    if (key_core.rank() != 2) {
        throw ParamError("quant_key_2bit_asym: expected a [n, r] tensor");
    }
    const auto data = key_core.f32();
    require_finite(data, "quant_key_2bit_asym");

    QuantizedKeyCore q;
    q.rows = key_core.dim(0);
    q.r = key_core.dim(1);
    if (q.rows == 0 || q.r == 0) {
        throw ParamError("quant_key_2bit_asym: empty tensor");
    }
    q.codes.resize(q.rows * q.r);
    q.scale.resize(q.rows);
    q.zero.resize(q.rows);

    for (std::size_t i = 0; i < q.rows; ++i) {
        const auto row = data.subspan(i * q.r, q.r);
        const auto [lo, hi] = row_range(row);
        const float scale = round_to_f16((hi - lo) / 3.0f);
        const float zero = round_to_f16(lo);
        q.scale[i] = scale;
        q.zero[i] = zero;
        if (scale == 0.0f) {  // constant row (or range below the f16 grid)
            std::fill_n(q.codes.begin() + static_cast<std::ptrdiff_t>(i * q.r), q.r,
                        std::uint8_t{0});
            continue;
        }
        for (std::size_t j = 0; j < q.r; ++j) {
            q.codes[i * q.r + j] = static_cast<std::uint8_t>(
                clamp_code((static_cast<double>(row[j]) - zero) / scale, 0, 3));
        }
    }
    return q;
}

QuantizedQuery quant_query_3bit_sym(std::span<const float> q_core) {
    if (q_core.empty()) {
        throw ParamError("quant_query_3bit_sym: empty query");
    }
    require_finite(q_core, "quant_query_3bit_sym");

    float max_abs = 0.0f;
    for (const float v : q_core) {
        max_abs = std::max(max_abs, std::abs(v));
    }
    QuantizedQuery q;
    q.codes.resize(q_core.size());
    q.scale = max_abs / 3.0f;
    if (q.scale == 0.0f) {
        return q;  // all-zero query: codes stay zero
    }
    for (std::size_t j = 0; j < q_core.size(); ++j) {
        q.codes[j] = static_cast<std::int8_t>(
            clamp_code(static_cast<double>(q_core[j]) / q.scale, -3, 3));
    }
    return q;
}

Int8Scores quant_scores_int8(std::span<const float> scores) {
    if (scores.empty()) {
        throw ParamError("quant_scores_int8: empty scores");
    }
    require_finite(scores, "quant_scores_int8");

    const auto [lo, hi] = row_range(scores);
    Int8Scores out;
    out.lo = lo;
    out.hi = hi;
    out.codes.resize(scores.size());
    if (lo == hi) {
        return out;  // constant scores map to code 0
    }
    const double step = 255.0 / (static_cast<double>(hi) - static_cast<double>(lo));
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.codes[i] = static_cast<std::uint8_t>(
            clamp_code((static_cast<double>(scores[i]) - lo) * step, 0, 255));
    }
    return out;
}

QuantizedRows quant_rows_int8(const Tensor& rows) {
    if (rows.rank() != 2) {
        throw ParamError("quant_rows_int8: expected a [n, d] tensor");
    }
    const auto data = rows.f32();
    require_finite(data, "quant_rows_int8");

    QuantizedRows q;
    q.rows = rows.dim(0);
    q.cols = rows.dim(1);
    if (q.rows == 0 || q.cols == 0) {
        throw ParamError("quant_rows_int8: empty tensor");
    }
    q.codes.resize(q.rows * q.cols);
    q.scale.resize(q.rows);
    q.zero.resize(q.rows);

    for (std::size_t i = 0; i < q.rows; ++i) {
        const auto row = data.subspan(i * q.cols, q.cols);
        const auto [lo, hi] = row_range(row);
        const float scale = round_to_f16((hi - lo) / 255.0f);
        const float zero = round_to_f16(lo);
        q.scale[i] = scale;
        q.zero[i] = zero;
        if (scale == 0.0f) {
            std::fill_n(q.codes.begin() + static_cast<std::ptrdiff_t>(i * q.cols), q.cols,
                        std::uint8_t{0});
            continue;
        }
        for (std::size_t j = 0; j < q.cols; ++j) {
            q.codes[i * q.cols + j] = static_cast<std::uint8_t>(
                clamp_code((static_cast<double>(row[j]) - zero) / scale, 0, 255));
        }
    }
    return q;
}

double code_payload_bits_per_key(std::size_t d, double s_f) {
    return 2.0 * static_cast<double>(d) * s_f;
}

double precompute_bits_per_key(std::size_t d, double s_f) {
    return code_payload_bits_per_key(d, s_f) + 32.0;
}

double code_payload_ratio_vs_4bit_baseline(std::size_t d, double s_f) {
    return code_payload_bits_per_key(d, s_f) / (4.0 * static_cast<double>(d));
}

void QuantScheme::validate() const {
    if (bits < 0 || bits > 4) {
        throw ParamError("quant scheme: bits must be in [0, 4]");
    }
    if ((mode == Mode::msb_asym || mode == Mode::msb_sym) && bits != 2 && bits != 3) {
        throw ParamError("quant scheme: msb-of-int8 retains 2 or 3 bits only");
    }
    if (target == Target::query && bits != 0 && mode != Mode::symmetric) {
        throw ParamError("quant scheme: query sweep is symmetric only");
    }
}

QuantScheme scheme_from_name(std::string_view name) {
    QuantScheme s;
    if (name == "full") {
        s.bits = 0;
        return s;
    }
    std::string_view rest = name;
    if (rest.starts_with("k_")) {
        s.target = QuantScheme::Target::key;
    } else if (rest.starts_with("q_")) {
        s.target = QuantScheme::Target::query;
    } else {
        throw ParamError("unknown quant scheme: " + std::string(name));
    }
    rest.remove_prefix(2);

    bool msb = false;
    if (rest.starts_with("msb")) {
        msb = true;
        rest.remove_prefix(3);
    }
    if (rest.empty() || rest[0] < '1' || rest[0] > '4') {
        throw ParamError("unknown quant scheme: " + std::string(name));
    }
    s.bits = rest[0] - '0';
    rest.remove_prefix(1);

    if (rest.empty() && s.bits == 1 && !msb) {
        s.mode = QuantScheme::Mode::symmetric;  // sign only
    } else if (rest == "_asy") {
        s.mode = msb ? QuantScheme::Mode::msb_asym : QuantScheme::Mode::asymmetric;
    } else if (rest == "_sym") {
        s.mode = msb ? QuantScheme::Mode::msb_sym : QuantScheme::Mode::symmetric;
    } else {
        throw ParamError("unknown quant scheme: " + std::string(name));
    }
    s.validate();
    return s;
}

std::string scheme_name(const QuantScheme& scheme) {
    if (scheme.bits == 0) {
        return "full";
    }
    std::string out = scheme.target == QuantScheme::Target::key ? "k_" : "q_";
    const bool msb =
        scheme.mode == QuantScheme::Mode::msb_asym || scheme.mode == QuantScheme::Mode::msb_sym;
    if (msb) {
        out += "msb";
    }
    out += static_cast<char>('0' + scheme.bits);
    if (scheme.bits == 1 && !msb) {
        return out;
    }
    const bool asym =
        scheme.mode == QuantScheme::Mode::asymmetric || scheme.mode == QuantScheme::Mode::msb_asym;
    out += asym ? "_asy" : "_sym";
    return out;
}

namespace {

// One row (or the whole query vector) through the scheme's round trip.
void apply_scheme_row(std::span<const float> row, std::span<float> out, const QuantScheme& s) {
    if (s.bits == 1) {  // sign only
        for (std::size_t j = 0; j < row.size(); ++j) {
            out[j] = row[j] >= 0.0f ? 1.0f : -1.0f;
        }
        return;
    }
    if (s.mode == QuantScheme::Mode::msb_asym) {
        const auto [lo, hi] = row_range(row);
        const int keep = s.bits;
        if (hi == lo) {
            for (std::size_t j = 0; j < row.size(); ++j) out[j] = lo;
            return;
        }
        const double scale = (static_cast<double>(hi) - lo) / 255.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto code = static_cast<std::uint8_t>(
                clamp_code((static_cast<double>(row[j]) - lo) / scale, 0, 255));
            const std::uint8_t top = msb_slice(code, keep);
            out[j] = static_cast<float>(static_cast<double>(top << (8 - keep)) * scale + lo);
        }
        return;
    }
    if (s.mode == QuantScheme::Mode::msb_sym) {
        const int keep = s.bits;
        float max_abs = 0.0f;
        for (const float v : row) {
            max_abs = std::max(max_abs, std::abs(v));
        }
        if (max_abs == 0.0f) {
            std::fill(out.begin(), out.end(), 0.0f);
            return;
        }
        const double scale = static_cast<double>(max_abs) / 127.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const long code = clamp_code(static_cast<double>(row[j]) / scale, -127, 127);
            const long top = code >> (8 - keep);  // arithmetic shift keeps the sign
            out[j] = static_cast<float>(static_cast<double>(top << (8 - keep)) * scale);
        }
        return;
    }
    if (s.mode == QuantScheme::Mode::asymmetric) {
        const auto [lo, hi] = row_range(row);
        const long levels = (1L << s.bits) - 1;
        if (hi == lo) {
            for (std::size_t j = 0; j < row.size(); ++j) out[j] = lo;
            return;
        }
        const double scale = (static_cast<double>(hi) - lo) / static_cast<double>(levels);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const long code = clamp_code((static_cast<double>(row[j]) - lo) / scale, 0, levels);
            out[j] = static_cast<float>(static_cast<double>(code) * scale + lo);
        }
        return;
    }
    // Symmetric: zero point pinned at 0, max level 2^(b-1)-1 (seven levels at
    // three bits).
    const long level = (1L << (s.bits - 1)) - 1;
    float max_abs = 0.0f;
    for (const float v : row) {
        max_abs = std::max(max_abs, std::abs(v));
    }
    if (max_abs == 0.0f) {
        std::fill(out.begin(), out.end(), 0.0f);
        return;
    }
    const double scale = static_cast<double>(max_abs) / static_cast<double>(level);
    for (std::size_t j = 0; j < row.size(); ++j) {
        const long code = clamp_code(static_cast<double>(row[j]) / scale, -level, level);
        out[j] = static_cast<float>(static_cast<double>(code) * scale);
    }
}

}  // namespace

Tensor apply_scheme(const Tensor& data, const QuantScheme& scheme) {
    scheme.validate();
    const auto values = data.f32();
    require_finite(values, "apply_scheme");
    std::vector<float> out(values.size());

    if (scheme.bits == 0) {
        std::copy(values.begin(), values.end(), out.begin());
        return Tensor::from_f32(data.shape(), std::move(out));
    }

    if (scheme.target == QuantScheme::Target::query || data.rank() == 1) {
        apply_scheme_row(values, out, scheme);
        return Tensor::from_f32(data.shape(), std::move(out));
    }
    if (data.rank() != 2) {
        throw ParamError("apply_scheme: key schemes expect a [n, d] tensor");
    }
    const std::size_t cols = data.dim(1);
    for (std::size_t i = 0; i < data.dim(0); ++i) {
        apply_scheme_row(values.subspan(i * cols, cols),
                         std::span<float>(out).subspan(i * cols, cols), scheme);
    }
    return Tensor::from_f32(data.shape(), std::move(out));
}

}  // namespace salca
