#include "salca/tensor.hpp"

#include <bit>
#include <cstring>

#include "salca/errors.hpp"
#include "salca/float16.hpp"

static_assert(std::endian::native == std::endian::little,
              "payloads are defined little-endian and this code memcpys them");

namespace salca {

namespace {

std::size_t shape_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (const std::size_t d : shape) {
        n *= d;
    }
    return n;
}

// Packed payloads must keep their trailing bits zero so equal tensors are
// byte-equal on disk.
void check_padding(Dtype dtype, std::size_t count, const std::vector<std::byte>& payload) {
    if (payload.empty()) {
        return;
    }
    const std::size_t used_bits = count * dtype_bits(dtype);
    const std::size_t rem = used_bits % 8;
    if (rem == 0) {
        return;
    }
    const auto last = static_cast<std::uint8_t>(payload.back());
    if ((last >> rem) != 0) {
        throw CorruptFileError("packed tensor has nonzero padding bits");
    }
}

}  // namespace

std::string_view dtype_name(Dtype dtype) {
    switch (dtype) {
        case Dtype::f32: return "f32";
        case Dtype::f16: return "f16";
        case Dtype::i8: return "i8";
        case Dtype::u8: return "u8";
        case Dtype::u2_packed: return "u2-packed";
        case Dtype::i3_packed: return "i3-packed";
    }
    throw ParamError("dtype_name: bad enum value");
}

Dtype dtype_from_name(std::string_view name) {
    if (name == "f32") return Dtype::f32;
    if (name == "f16") return Dtype::f16;
    if (name == "i8") return Dtype::i8;
    if (name == "u8") return Dtype::u8;
    if (name == "u2-packed") return Dtype::u2_packed;
    if (name == "i3-packed") return Dtype::i3_packed;
    throw FormatError("unknown dtype: " + std::string(name));
}

std::size_t dtype_bits(Dtype dtype) {
    switch (dtype) {
        case Dtype::f32: return 32;
        case Dtype::f16: return 16;
        case Dtype::i8: return 8;
        case Dtype::u8: return 8;
        case Dtype::u2_packed: return 2;
        case Dtype::i3_packed: return 3;
    }
    throw ParamError("dtype_bits: bad enum value");
}

std::size_t payload_bytes(Dtype dtype, std::size_t count) {
    return (count * dtype_bits(dtype) + 7) / 8;
}

Tensor::Tensor(Dtype dtype, std::vector<std::size_t> shape) : dtype_(dtype), shape_(std::move(shape)) {
    payload_.assign(payload_bytes(dtype_, shape_count(shape_)), std::byte{0});
}

std::size_t Tensor::count() const {
    return shape_count(shape_);
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw ParamError("Tensor::dim: axis out of range");
    }
    return shape_[axis];
}

Tensor Tensor::from_f32(std::vector<std::size_t> shape, std::vector<float> values) {
    if (values.size() != shape_count(shape)) {
        throw ParamError("from_f32: value count does not match shape");
    }
    Tensor t(Dtype::f32, std::move(shape));
    std::memcpy(t.payload_.data(), values.data(), values.size() * sizeof(float));
    return t;
}

Tensor Tensor::from_f16(std::vector<std::size_t> shape, std::span<const float> values) {
    if (values.size() != shape_count(shape)) {
        throw ParamError("from_f16: value count does not match shape");
    }
    Tensor t(Dtype::f16, std::move(shape));
    auto* words = reinterpret_cast<std::uint16_t*>(t.payload_.data());
    for (std::size_t i = 0; i < values.size(); ++i) {
        words[i] = f32_to_f16_bits(values[i]);
    }
    return t;
}

Tensor Tensor::from_u8(std::vector<std::size_t> shape, std::vector<std::uint8_t> values) {
    if (values.size() != shape_count(shape)) {
        throw ParamError("from_u8: value count does not match shape");
    }
    Tensor t(Dtype::u8, std::move(shape));
    std::memcpy(t.payload_.data(), values.data(), values.size());
    return t;
}

Tensor Tensor::from_i8(std::vector<std::size_t> shape, std::vector<std::int8_t> values) {
    if (values.size() != shape_count(shape)) {
        throw ParamError("from_i8: value count does not match shape");
    }
    Tensor t(Dtype::i8, std::move(shape));
    std::memcpy(t.payload_.data(), values.data(), values.size());
    return t;
}

Tensor Tensor::pack_u2(std::vector<std::size_t> shape, std::span<const std::uint8_t> codes) {
    if (codes.size() != shape_count(shape)) {
        throw ParamError("pack_u2: code count does not match shape");
    }
    Tensor t(Dtype::u2_packed, std::move(shape));
    auto* bytes = reinterpret_cast<std::uint8_t*>(t.payload_.data());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] > 3) {
            throw ParamError("pack_u2: code out of range [0, 3]");
        }
        bytes[i >> 2] |= static_cast<std::uint8_t>(codes[i] << ((i & 3) * 2));
    }
    return t;
}

Tensor Tensor::pack_i3(std::vector<std::size_t> shape, std::span<const std::int8_t> codes) {
    if (codes.size() != shape_count(shape)) {
        throw ParamError("pack_i3: code count does not match shape");
    }
    Tensor t(Dtype::i3_packed, std::move(shape));
    auto* bytes = reinterpret_cast<std::uint8_t*>(t.payload_.data());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] < -4 || codes[i] > 3) {
            throw ParamError("pack_i3: code out of 3-bit two's complement range");
        }
        const std::uint8_t u = static_cast<std::uint8_t>(codes[i]) & 0x7u;
        const std::size_t bit = 3 * i;
        bytes[bit >> 3] |= static_cast<std::uint8_t>(u << (bit & 7));
        if ((bit & 7) > 5) {  // code straddles a byte boundary
            bytes[(bit >> 3) + 1] |= static_cast<std::uint8_t>(u >> (8 - (bit & 7)));
        }
    }
    return t;
}

Tensor Tensor::from_raw(Dtype dtype, std::vector<std::size_t> shape, std::vector<std::byte> payload) {
    const std::size_t count = shape_count(shape);
    if (payload.size() != payload_bytes(dtype, count)) {
        throw CorruptFileError("payload length does not match header shape");
    }
    check_padding(dtype, count, payload);
    Tensor t;
    t.dtype_ = dtype;
    t.shape_ = std::move(shape);
    t.payload_ = std::move(payload);
    return t;
}

std::span<const float> Tensor::f32() const {
    if (dtype_ != Dtype::f32) {
        throw ParamError("Tensor::f32: dtype is not f32");
    }
    return {reinterpret_cast<const float*>(payload_.data()), count()};
}

std::span<const std::uint8_t> Tensor::u8() const {
    if (dtype_ != Dtype::u8) {
        throw ParamError("Tensor::u8: dtype is not u8");
    }
    return {reinterpret_cast<const std::uint8_t*>(payload_.data()), count()};
}

std::span<const std::int8_t> Tensor::i8() const {
    if (dtype_ != Dtype::i8) {
        throw ParamError("Tensor::i8: dtype is not i8");
    }
    return {reinterpret_cast<const std::int8_t*>(payload_.data()), count()};
}

std::vector<float> Tensor::widen() const {
    if (dtype_ == Dtype::f32) {
        const auto view = f32();
        return {view.begin(), view.end()};
    }
    if (dtype_ == Dtype::f16) {
        std::vector<float> out(count());
        const auto* words = reinterpret_cast<const std::uint16_t*>(payload_.data());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = f16_bits_to_f32(words[i]);
        }
        return out;
    }
    throw ParamError("Tensor::widen: dtype is not a float type");
}

std::vector<std::uint8_t> Tensor::unpack_u2() const {
    if (dtype_ != Dtype::u2_packed) {
        throw ParamError("Tensor::unpack_u2: dtype is not u2-packed");
    }
    std::vector<std::uint8_t> out(count());
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(payload_.data());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (bytes[i >> 2] >> ((i & 3) * 2)) & 0x3u;
    }
    return out;
}

std::vector<std::int8_t> Tensor::unpack_i3() const {
    if (dtype_ != Dtype::i3_packed) {
        throw ParamError("Tensor::unpack_i3: dtype is not i3-packed");
    }
    std::vector<std::int8_t> out(count());
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(payload_.data());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t bit = 3 * i;
        std::uint8_t u = static_cast<std::uint8_t>(bytes[bit >> 3] >> (bit & 7));
        if ((bit & 7) > 5) {
            u |= static_cast<std::uint8_t>(bytes[(bit >> 3) + 1] << (8 - (bit & 7)));
        }
        u &= 0x7u;
        out[i] = (u & 0x4u) ? static_cast<std::int8_t>(u | 0xf8u) : static_cast<std::int8_t>(u);
    }
    return out;
}

}  // namespace salca
