#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "salca/errors.hpp"
#include "salca/metrics.hpp"
#include "salca/quantizer.hpp"
#include "salca/rng.hpp"
#include "salca/sparse_select.hpp"
#include "salca/tensor.hpp"

using namespace salca;

TEST_CASE("heavy channel ranking") {
    const Tensor keys = Tensor::from_f32({2, 3},
                                         {1.0f, -2.0f, 0.5f,
                                          -1.0f, 2.0f, 0.5f});
    const HeavyChannelSet set = find_heavy_channels(keys, 2.0 / 3.0);
    CHECK(set.channel_energy == std::vector<float>{2.0f, 4.0f, 1.0f});
    CHECK(set.indices == std::vector<std::size_t>{0, 1});
    CHECK(set.r() == 2);

    // All energies equal: ties resolve toward the lower channel index.
    const Tensor flat = Tensor::from_f32({2, 3},
                                         {1.0f, 0.0f, 1.0f,
                                          1.0f, 2.0f, 1.0f});
    CHECK(find_heavy_channels(flat, 0.34).indices == std::vector<std::size_t>{0});
    CHECK(find_heavy_channels(flat, 0.67).indices == std::vector<std::size_t>{0, 1});

    // r = round(s_f * d) clamps to [1, d].
    const Tensor wide = Tensor::from_f32({1, 4}, {1.0f, 2.0f, 3.0f, 4.0f});
    CHECK(find_heavy_channels(wide, 0.01).indices == std::vector<std::size_t>{3});
    CHECK(find_heavy_channels(wide, 1.0).indices == std::vector<std::size_t>{0, 1, 2, 3});

    CHECK_THROWS_AS(find_heavy_channels(Tensor::from_f32({3}, {1.0f, 2.0f, 3.0f}), 0.5),
                    ParamError);
    CHECK_THROWS_AS(find_heavy_channels(keys, 0.0), ParamError);
    CHECK_THROWS_AS(find_heavy_channels(keys, 1.5), ParamError);
}

TEST_CASE("relevance estimate matches the factored integer form") {
    QuantizedKeyCore keys;
    keys.rows = 1;
    keys.r = 4;
    keys.codes = {0, 1, 2, 3};
    keys.scale = {2.0f};
    keys.zero = {-1.0f};

    QuantizedQuery query;
    query.codes = {1, -2, 3, -1};
    query.scale = 0.5f;

    // dot = 0*1 + 1*(-2) + 2*3 + 3*(-1) = 1, code sum = 1
    // score = scale_q * (scale_k * dot + zero_k * code_sum)
    const auto scaled = estimate_relevance(query, keys);
    REQUIRE(scaled.size() == 1);
    CHECK(scaled[0] == 0.5f);
    const auto unscaled = estimate_relevance(query, keys, false);
    CHECK(unscaled[0] == 1.0f);

    QuantizedQuery wrong;
    wrong.codes = {1, 2};
    wrong.scale = 1.0f;
    CHECK_THROWS_AS(estimate_relevance(wrong, keys), ParamError);
}

TEST_CASE("dropping the positive shared scale permutes nothing") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 128;
        const std::size_t r = 16;
        std::vector<float> data(n * r);
        for (float& v : data) {
            v = static_cast<float>(rng.next_normal() * 3.0);
        }
        const QuantizedKeyCore keys = quant_key_2bit_asym(Tensor::from_f32({n, r}, data));
        std::vector<float> qvals(r);
        for (float& v : qvals) {
            v = static_cast<float>(rng.next_normal());
        }
        const QuantizedQuery query = quant_query_3bit_sym(qvals);
        if (query.scale == 0.0f) {
            continue;
        }
        const auto scaled = estimate_relevance(query, keys, true);
        const auto raw = estimate_relevance(query, keys, false);
        CHECK(exact_topk(scaled, n) == exact_topk(raw, n));
    }
}

TEST_CASE("maxpool equals the truncated sliding-window max") {
    Rng rng(3);
    for (std::size_t r_pool = 1; r_pool <= 15; r_pool += 2) {
        for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{7},
                              std::size_t{50}, std::size_t{1000}}) {
            std::vector<std::uint8_t> codes(n);
            for (auto& c : codes) {
                c = static_cast<std::uint8_t>(rng.next_below(256));
            }
            const auto got = maxpool_stride1(codes, r_pool);
            const auto want = oracle::sliding_window_max(codes, r_pool);
            CHECK(got == want);
        }
    }
    CHECK_THROWS_AS(maxpool_stride1(std::vector<std::uint8_t>{1, 2}, 0), ParamError);
    CHECK_THROWS_AS(maxpool_stride1(std::vector<std::uint8_t>{1, 2}, 4), ParamError);
}

TEST_CASE("histogram threshold selection") {
    const std::vector<std::uint8_t> codes{5, 9, 9, 2, 7};

    const SelectionResult k2 = histogram_topk(codes, 2);
    CHECK(k2.threshold == 9);
    CHECK(k2.indices == std::vector<std::size_t>{1, 2});
    CHECK(k2.excess == 0);
    CHECK(k2.data_passes == 2);
    CHECK(k2.histogram[9] == 2);
    CHECK(k2.histogram[5] == 1);
    CHECK(k2.histogram[0] == 0);

    const SelectionResult k3 = histogram_topk(codes, 3);
    CHECK(k3.threshold == 7);
    CHECK(k3.indices == std::vector<std::size_t>{1, 2, 4});

    const SelectionResult k4 = histogram_topk(codes, 4);
    CHECK(k4.threshold == 5);
    CHECK(k4.indices == std::vector<std::size_t>{0, 1, 2, 4});

    const SelectionResult k5 = histogram_topk(codes, 5);
    CHECK(k5.threshold == 2);
    CHECK(k5.indices.size() == 5);

    CHECK_THROWS_AS(histogram_topk(std::vector<std::uint8_t>{}, 1), ParamError);
    CHECK_THROWS_AS(histogram_topk(codes, 0), ParamError);
    CHECK_THROWS_AS(histogram_topk(codes, 6), ParamError);
}

TEST_CASE("histogram selection is a superset of every exact top-k") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 64 + rng.next_below(512);
        std::vector<float> scores(n);
        for (float& s : scores) {
            s = static_cast<float>(rng.next_normal());
        }
        const Int8Scores coded = quant_scores_int8(scores);
        const std::size_t k = 1 + rng.next_below(n);
        const SelectionResult sel = histogram_topk(coded.codes, k);

        CHECK(sel.indices.size() >= k);
        CHECK(sel.excess == sel.indices.size() - k);
        CHECK(std::is_sorted(sel.indices.begin(), sel.indices.end()));

        // Retained iff at or above the threshold.
        std::vector<bool> retained(n, false);
        for (std::size_t idx : sel.indices) {
            retained[idx] = true;
            CHECK(coded.codes[idx] >= sel.threshold);
        }
        std::size_t below = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!retained[i]) {
                CHECK(coded.codes[i] < sel.threshold);
                ++below;
            }
        }
        CHECK(below + sel.indices.size() == n);

        // The threshold is the highest one that still reaches k.
        if (sel.threshold < 255) {
            std::size_t above = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (coded.codes[i] > sel.threshold) {
                    ++above;
                }
            }
            CHECK(above < k);
        }

        // Superset of the exact top-k over the code values.
        std::vector<float> as_float(coded.codes.begin(), coded.codes.end());
        for (std::size_t idx : exact_topk(as_float, k)) {
            CHECK(retained[idx]);
        }
    }
}

TEST_CASE("compaction network matches the recursive construction") {
    Rng rng(77);
    for (std::size_t p = 2; p <= 256; p <<= 1) {
        for (int trial = 0; trial < 80; ++trial) {
            std::vector<std::uint8_t> mask(p);
            // Mix sparse and dense masks.
            const std::uint64_t density = 1 + rng.next_below(p);
            for (auto& m : mask) {
                m = rng.next_below(p) < density ? 1 : 0;
            }
            const std::size_t base = rng.next_below(1000);
            const auto got = compact_indices(mask, base);
            const auto want = oracle::compact_recursive(mask, base);
            CHECK(got == want);

            // And the output is exactly the set of raised positions.
            std::vector<std::size_t> expected;
            for (std::size_t i = 0; i < p; ++i) {
                if (mask[i]) {
                    expected.push_back(base + i);
                }
            }
            auto sorted = got;
            std::sort(sorted.begin(), sorted.end());
            CHECK(sorted == expected);
        }
    }

    const std::vector<std::uint8_t> ones(16, 1);
    std::vector<std::size_t> identity(16);
    std::iota(identity.begin(), identity.end(), std::size_t{100});
    CHECK(compact_indices(ones, 100) == identity);
    CHECK(compact_indices(std::vector<std::uint8_t>(16, 0), 0).empty());

    CHECK_THROWS_AS(compact_indices(std::vector<std::uint8_t>{1, 0, 1}, 0), ParamError);
    CHECK_THROWS_AS(compact_indices(std::vector<std::uint8_t>{}, 0), ParamError);
}

TEST_CASE("retention to k") {
    CHECK(retention_to_k(0.094, 1000) == 94);
    CHECK(retention_to_k(0.1, 1000) == 100);
    CHECK(retention_to_k(0.29, 100) == 29);
    CHECK(retention_to_k(1.0, 5) == 5);
    CHECK(retention_to_k(0.0001, 100) == 1);   // rounds up, floor is 1
    CHECK(retention_to_k(0.26, 10240) == 2663);
    CHECK_THROWS_AS(retention_to_k(0.0, 10), ParamError);
    CHECK_THROWS_AS(retention_to_k(1.5, 10), ParamError);
    CHECK_THROWS_AS(retention_to_k(0.5, 0), ParamError);
}
