#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salca/tensor.hpp"

namespace salca {

// All rounding is half away from zero (llround semantics), which keeps codes
// reproducible across languages. Per-row factors are stored on the f16 grid
// and widened to f32; codes are always computed against the stored factors.

// 2-bit asymmetric key codes over the heavy-channel slice. Per row:
// scale = (max - min) / 3, zero = min; constant rows degrade to scale 0 and
// code 0. Stored footprint per key is 2*r code bits plus two 16-bit factors.
struct QuantizedKeyCore {
    std::vector<std::uint8_t> codes;  // rows * r, values 0..3
    std::vector<float> scale;         // per row, f16 grid
    std::vector<float> zero;          // per row, f16 grid
    std::size_t rows = 0;
    std::size_t r = 0;

    float dequant(std::size_t row, std::size_t col) const {
        return static_cast<float>(codes[row * r + col]) * scale[row] + zero[row];
    }
    Tensor codes_tensor() const;  // u2-packed [rows, r]
};

// 3-bit symmetric query codes: seven levels in [-3, 3], zero point fixed at
// zero so the shared scale is a positive constant and can be dropped without
// changing any ranking decision.
struct QuantizedQuery {
    std::vector<std::int8_t> codes;  // values -3..3
    float scale = 0.0f;
};

// Order-preserving INT8 score codes over the observed [lo, hi] range.
struct Int8Scores {
    std::vector<std::uint8_t> codes;
    float lo = 0.0f;
    float hi = 0.0f;
};

// Per-row affine INT8 rows (255 levels), used for both K and V in the
// attention phase.
struct QuantizedRows {
    std::vector<std::uint8_t> codes;  // rows * cols
    std::vector<float> scale;         // per row, f16 grid
    std::vector<float> zero;          // per row, f16 grid
    std::size_t rows = 0;
    std::size_t cols = 0;

    float dequant(std::size_t row, std::size_t col) const {
        return static_cast<float>(codes[row * cols + col]) * scale[row] + zero[row];
    }
};

QuantizedKeyCore quant_key_2bit_asym(const Tensor& key_core);       // f32 [n, r]
QuantizedQuery quant_query_3bit_sym(std::span<const float> q_core);
Int8Scores quant_scores_int8(std::span<const float> scores);
QuantizedRows quant_rows_int8(const Tensor& rows);                  // f32 [n, d]

// Footprint accounting for the pre-compute stream: code payload is 2*d*s_f
// bits per key plus 32 factor bits.
double code_payload_bits_per_key(std::size_t d, double s_f);
double precompute_bits_per_key(std::size_t d, double s_f);
// Ratio of the 2-bit sparse code payload to a dense 4-bit baseline (4*d).
double code_payload_ratio_vs_4bit_baseline(std::size_t d, double s_f);

// Quantization sweep: one named scheme applied to keys (per row) or to the
// query (whole vector). bits=0 means full precision passthrough; bits=1 keeps
// the sign only; the msb modes quantize to INT8 first (asymmetric or
// symmetric) and keep the top 2 or 3 code bits.
struct QuantScheme {
    enum class Target { key, query };
    enum class Mode { symmetric, asymmetric, msb_asym, msb_sym };

    Target target = Target::key;
    int bits = 0;
    Mode mode = Mode::asymmetric;

    void validate() const;
};

QuantScheme scheme_from_name(std::string_view name);  // e.g. "k_2_asy", "q_3_sym", "full"
std::string scheme_name(const QuantScheme& scheme);

// Quantize-dequantize round trip under the scheme; same shape, f32.
Tensor apply_scheme(const Tensor& data, const QuantScheme& scheme);

// Top bits of an 8-bit code, the hardware truncation used by msb schemes.
inline std::uint8_t msb_slice(std::uint8_t code, int bits) {
    return static_cast<std::uint8_t>(code >> (8 - bits));
}

}  // namespace salca
