#include "salca/float16.hpp"

#include <bit>

namespace salca {

std::uint16_t f32_to_f16_bits(float value) {
    const std::uint32_t x = std::bit_cast<std::uint32_t>(value);
    const std::uint32_t sign = (x >> 16) & 0x8000u;
    std::uint32_t mant = x & 0x007fffffu;
    const std::int32_t exp = static_cast<std::int32_t>((x >> 23) & 0xffu) - 127;

    if (exp == 128) {  // inf or nan; keep nan payload top bits
        return static_cast<std::uint16_t>(sign | 0x7c00u | (mant ? (0x0200u | (mant >> 13)) : 0u));
    }
    if (exp > 15) {  // overflow
        return static_cast<std::uint16_t>(sign | 0x7c00u);
    }
    if (exp >= -14) {  // normal half range
        std::uint32_t half = sign | (static_cast<std::uint32_t>(exp + 15) << 10) | (mant >> 13);
        const std::uint32_t rem = mant & 0x1fffu;
        if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) {
            ++half;  // mantissa carry may roll into the exponent, which is still correct
        }
        return static_cast<std::uint16_t>(half);
    }
    if (exp >= -25) {  // subnormal half
        mant |= 0x00800000u;
        const std::uint32_t shift = static_cast<std::uint32_t>(-14 - exp) + 13u;
        std::uint32_t half = sign | (mant >> shift);
        const std::uint32_t rem = mant & ((1u << shift) - 1u);
        const std::uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (half & 1u))) {
            ++half;
        }
        return static_cast<std::uint16_t>(half);
    }
    return static_cast<std::uint16_t>(sign);  // underflow to signed zero
}

float f16_bits_to_f32(std::uint16_t bits) {
    const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
    const std::uint32_t exp = (bits >> 10) & 0x1fu;
    const std::uint32_t mant = bits & 0x3ffu;

    std::uint32_t out;
    if (exp == 0) {
        if (mant == 0) {
            out = sign;
        } else {  // subnormal: renormalize mant * 2^-24 into a normal f32
            std::uint32_t m = mant;
            int shifts = 0;
            while (!(m & 0x400u)) {
                m <<= 1;
                ++shifts;
            }
            out = sign | (static_cast<std::uint32_t>(127 - 14 - shifts) << 23) | ((m & 0x3ffu) << 13);
        }
    } else if (exp == 31) {
        out = sign | 0x7f800000u | (mant << 13);
    } else {
        out = sign | ((exp - 15 + 127) << 23) | (mant << 13);
    }
    return std::bit_cast<float>(out);
}

}  // namespace salca
