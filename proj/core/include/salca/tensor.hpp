#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace salca {

// Element types. f16 payloads are stored as 16-bit words and widened to f32
// for all arithmetic. u2/i3 are bit-packed: little-endian bitstream, row-major
// element order, lowest-index element in the least-significant bits, padding
// bits zero. i3 codes are 3-bit two's complement.
enum class Dtype { f32, f16, i8, u8, u2_packed, i3_packed };

std::string_view dtype_name(Dtype dtype);
Dtype dtype_from_name(std::string_view name);
std::size_t dtype_bits(Dtype dtype);
std::size_t payload_bytes(Dtype dtype, std::size_t count);

// Shape-tagged flat array over a raw byte payload.
class Tensor {
public:
    Tensor() = default;
    Tensor(Dtype dtype, std::vector<std::size_t> shape);  // zero-filled

    static Tensor from_f32(std::vector<std::size_t> shape, std::vector<float> values);
    static Tensor from_f16(std::vector<std::size_t> shape, std::span<const float> values);
    static Tensor from_u8(std::vector<std::size_t> shape, std::vector<std::uint8_t> values);
    static Tensor from_i8(std::vector<std::size_t> shape, std::vector<std::int8_t> values);
    static Tensor pack_u2(std::vector<std::size_t> shape, std::span<const std::uint8_t> codes);
    static Tensor pack_i3(std::vector<std::size_t> shape, std::span<const std::int8_t> codes);

    // Adopts a serialized payload; validates length and packed padding bits.
    static Tensor from_raw(Dtype dtype, std::vector<std::size_t> shape,
                           std::vector<std::byte> payload);

    Dtype dtype() const { return dtype_; }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t count() const;  // product of shape

    std::span<const std::byte> raw() const { return payload_; }

    // Typed access. f32/u8/i8 view the payload in place; the others copy.
    std::span<const float> f32() const;
    std::span<const std::uint8_t> u8() const;
    std::span<const std::int8_t> i8() const;
    std::vector<float> widen() const;  // f32 or f16 payload as f32 values
    std::vector<std::uint8_t> unpack_u2() const;
    std::vector<std::int8_t> unpack_i3() const;

private:
    Dtype dtype_ = Dtype::f32;
    std::vector<std::size_t> shape_;
    std::vector<std::byte> payload_;
};

}  // namespace salca
