#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "oracles.hpp"
#include "salca/attention.hpp"
#include "salca/errors.hpp"
#include "salca/quantizer.hpp"
#include "salca/rng.hpp"
#include "salca/tensor.hpp"

using namespace salca;

namespace {

bool close_rel(float a, double b, double tol) {
    return std::abs(static_cast<double>(a) - b) <= tol * std::max(1.0, std::abs(b));
}

struct RandomCase {
    std::vector<float> query;
    Tensor keys;
    Tensor values;
    std::vector<std::vector<float>> key_rows;
    std::vector<std::vector<float>> value_rows;
};

RandomCase make_case(Rng& rng, std::size_t k, std::size_t d) {
    RandomCase c;
    c.query.resize(d);
    for (float& v : c.query) {
        v = static_cast<float>(rng.next_normal());
    }
    std::vector<float> kd(k * d);
    std::vector<float> vd(k * d);
    for (float& v : kd) {
        v = static_cast<float>(rng.next_normal());
    }
    for (float& v : vd) {
        v = static_cast<float>(rng.next_normal() * 2.0);
    }
    c.key_rows.resize(k);
    c.value_rows.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        c.key_rows[i].assign(kd.begin() + static_cast<std::ptrdiff_t>(i * d),
                             kd.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
        c.value_rows[i].assign(vd.begin() + static_cast<std::ptrdiff_t>(i * d),
                               vd.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    }
    c.keys = Tensor::from_f32({k, d}, std::move(kd));
    c.values = Tensor::from_f32({k, d}, std::move(vd));
    return c;
}

}  // namespace

TEST_CASE("gather picks rows by ascending unique indices") {
    const Tensor src = Tensor::from_f32({3, 2}, {1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f});
    const std::vector<std::size_t> idx{0, 2};
    const Tensor out = gather(src, idx);
    CHECK(out.shape() == std::vector<std::size_t>{2, 2});
    CHECK(out.f32()[0] == 1.0f);
    CHECK(out.f32()[1] == 2.0f);
    CHECK(out.f32()[2] == 5.0f);
    CHECK(out.f32()[3] == 6.0f);

    CHECK_THROWS_AS(gather(src, std::vector<std::size_t>{}), ParamError);
    CHECK_THROWS_AS(gather(src, std::vector<std::size_t>{2, 0}), ParamError);
    CHECK_THROWS_AS(gather(src, std::vector<std::size_t>{1, 1}), ParamError);
    CHECK_THROWS_AS(gather(src, std::vector<std::size_t>{3}), ParamError);
}

TEST_CASE("gather carries quantization factors along") {
    QuantizedRows rows;
    rows.rows = 3;
    rows.cols = 2;
    rows.codes = {10, 11, 20, 21, 30, 31};
    rows.scale = {1.0f, 2.0f, 3.0f};
    rows.zero = {0.5f, 1.5f, 2.5f};

    const QuantizedRows out = gather(rows, std::vector<std::size_t>{1, 2});
    CHECK(out.rows == 2);
    CHECK(out.codes == std::vector<std::uint8_t>{20, 21, 30, 31});
    CHECK(out.scale == std::vector<float>{2.0f, 3.0f});
    CHECK(out.zero == std::vector<float>{1.5f, 2.5f});
}

TEST_CASE("attention stays within rounding noise of a two-pass softmax") {
    Rng rng(42);
    for (std::size_t k : {std::size_t{1}, std::size_t{17}, std::size_t{256},
                          std::size_t{3000}}) {
        const std::size_t d = 64;
        const RandomCase c = make_case(rng, k, d);
        const AttentionOutput got = attention(c.query, c.keys, c.values);
        const oracle::SoftmaxRef want =
            oracle::softmax_attention(c.query, c.key_rows, c.value_rows);

        CHECK(got.qk_max == want.qk_max);
        CHECK(close_rel(got.denom, want.denom, 1e-6));
        for (std::size_t j = 0; j < d; ++j) {
            CHECK(close_rel(got.out[j], static_cast<double>(want.out[j]), 1e-6));
        }
    }
}

TEST_CASE("segment width never changes a bit") {
    Rng rng(5);
    const RandomCase c = make_case(rng, 333, 128);
    const AttentionOutput base = attention(c.query, c.keys, c.values, 32);
    for (std::size_t w : {std::size_t{1}, std::size_t{3}, std::size_t{64}, std::size_t{128},
                          std::size_t{999}}) {
        const AttentionOutput other = attention(c.query, c.keys, c.values, w);
        CHECK(other.qk_max == base.qk_max);
        CHECK(other.denom == base.denom);
        REQUIRE(other.out.size() == base.out.size());
        for (std::size_t j = 0; j < base.out.size(); ++j) {
            CHECK(other.out[j] == base.out[j]);
        }
    }
}

TEST_CASE("quantized rows go through the same kernel as their dequantized tensors") {
    Rng rng(9);
    const std::size_t k = 100;
    const std::size_t d = 32;
    const RandomCase c = make_case(rng, k, d);
    const QuantizedRows qk = quant_rows_int8(c.keys);
    const QuantizedRows qv = quant_rows_int8(c.values);

    std::vector<float> dk(k * d);
    std::vector<float> dv(k * d);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            dk[i * d + j] = qk.dequant(i, j);
            dv[i * d + j] = qv.dequant(i, j);
        }
    }
    const AttentionOutput via_codes = attention(c.query, qk, qv);
    const AttentionOutput via_tensors =
        attention(c.query, Tensor::from_f32({k, d}, std::move(dk)),
                  Tensor::from_f32({k, d}, std::move(dv)));

    CHECK(via_codes.qk_max == via_tensors.qk_max);
    CHECK(via_codes.denom == via_tensors.denom);
    for (std::size_t j = 0; j < d; ++j) {
        CHECK(via_codes.out[j] == via_tensors.out[j]);
    }
}

TEST_CASE("a single retained key returns its value row") {
    const std::vector<float> q{1.0f, -2.0f, 0.5f};
    const Tensor keys = Tensor::from_f32({1, 3}, {0.3f, 0.1f, -0.7f});
    const Tensor values = Tensor::from_f32({1, 3}, {4.0f, 5.0f, 6.0f});
    const AttentionOutput out = attention(q, keys, values);
    CHECK(out.denom == 1.0f);
    CHECK(out.out == std::vector<float>{4.0f, 5.0f, 6.0f});
}

TEST_CASE("attention rejects malformed inputs") {
    const Tensor keys = Tensor::from_f32({2, 3}, {1, 2, 3, 4, 5, 6});
    const Tensor values = Tensor::from_f32({2, 3}, {1, 2, 3, 4, 5, 6});
    const Tensor short_values = Tensor::from_f32({1, 3}, {1, 2, 3});

    CHECK_THROWS_AS(attention(std::vector<float>{1.0f}, keys, values), ParamError);
    CHECK_THROWS_AS(attention(std::vector<float>{1, 2, 3}, keys, short_values), ParamError);
    CHECK_THROWS_AS(attention(std::vector<float>{1, 2, 3}, keys, values, 0), ParamError);

    QuantizedRows empty;
    empty.rows = 0;
    empty.cols = 3;
    CHECK_THROWS_AS(attention(std::vector<float>{1, 2, 3}, empty, empty), ParamError);
}
