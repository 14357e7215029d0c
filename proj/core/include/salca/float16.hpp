#pragma once

#include <cstdint>

namespace salca {

// IEEE 754 binary16 conversions, round to nearest even. Per-row quantization
// factors are stored at half precision and widened back to f32 for arithmetic,
// so every value that claims to be a 16-bit factor is exactly representable.
std::uint16_t f32_to_f16_bits(float value);
float f16_bits_to_f32(std::uint16_t bits);

inline float round_to_f16(float value) {
    return f16_bits_to_f32(f32_to_f16_bits(value));
}

}  // namespace salca
