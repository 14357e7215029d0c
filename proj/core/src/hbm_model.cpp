#include "salca/hbm_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "salca/errors.hpp"

namespace salca {

void HbmConfig::validate() const {
    if (pc_count == 0 || pc_bits_per_cycle == 0) {
        throw ParamError("hbm: pc_count and pc_bits_per_cycle must be positive");
    }
    if (kv_pc_count == 0 || !std::has_single_bit(kv_pc_count)) {
        throw ParamError("hbm: kv_pc_count must be a power of two");
    }
    if (kv_pc_count > pc_count) {
        throw ParamError("hbm: kv_pc_count exceeds pc_count");
    }
    if (reorder_range == 0 || reorder_range % kv_pc_count != 0) {
        throw ParamError("hbm: reorder_range must be a positive multiple of kv_pc_count");
    }
    if (!(f_hbm > 0.0)) {
        throw ParamError("hbm: f_hbm must be positive");
    }
    if (!(beta_pre > 0.0) || beta_pre > 1.0 || !(beta_att > 0.0) || beta_att > 1.0) {
        throw ParamError("hbm: beta values must lie in (0, 1]");
    }
}

std::size_t map_index_to_pc(std::size_t token_index, const HbmConfig& cfg) {
    return token_index & (cfg.kv_pc_count - 1);
}

std::size_t row_transfer_cycles(std::size_t row_bits, const HbmConfig& cfg) {
    return (row_bits + cfg.pc_bits_per_cycle - 1) / cfg.pc_bits_per_cycle;
}

AccessSchedule schedule_window(std::span<const std::size_t> indices, const HbmConfig& cfg) {
    if (indices.empty()) {
        throw ParamError("schedule_window: empty window");
    }
    if (indices.size() > cfg.reorder_range) {
        throw ParamError("schedule_window: window exceeds reorder range");
    }

    // Stable sort of request positions by channel. The hardware uses a
    // bitonic network keyed on the PC id; only the grouping matters here.
    std::vector<std::size_t> order(indices.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return map_index_to_pc(indices[a], cfg) < map_index_to_pc(indices[b], cfg);
    });

    AccessSchedule sched;
    sched.per_pc_counts.assign(cfg.kv_pc_count, 0);
    for (std::size_t idx : indices) {
        ++sched.per_pc_counts[map_index_to_pc(idx, cfg)];
    }
    sched.max_count = *std::max_element(sched.per_pc_counts.begin(), sched.per_pc_counts.end());

    // One cursor per channel walks its group; every cycle each non-empty
    // cursor issues one request, so the whole window drains in max_count
    // cycles without a single channel collision.
    sched.slots.assign(sched.max_count, std::vector<std::size_t>(cfg.kv_pc_count, kNoRequest));
    std::vector<std::size_t> issued(cfg.kv_pc_count, 0);
    for (std::size_t pos : order) {
        const std::size_t pc = map_index_to_pc(indices[pos], cfg);
        sched.slots[issued[pc]][pc] = pos;
        ++issued[pc];
    }

    const double ideal = static_cast<double>(indices.size()) / static_cast<double>(cfg.kv_pc_count);
    sched.conflict_rate = static_cast<double>(sched.max_count) / ideal;
    return sched;
}

double window_conflict_rate(std::span<const std::size_t> indices, const HbmConfig& cfg) {
    if (indices.empty()) {
        throw ParamError("window_conflict_rate: empty window");
    }
    if (indices.size() > cfg.reorder_range) {
        throw ParamError("window_conflict_rate: window exceeds reorder range");
    }
    std::vector<std::size_t> counts(cfg.kv_pc_count, 0);
    for (std::size_t idx : indices) {
        ++counts[map_index_to_pc(idx, cfg)];
    }
    const std::size_t max_count = *std::max_element(counts.begin(), counts.end());
    return static_cast<double>(max_count) * static_cast<double>(cfg.kv_pc_count) /
           static_cast<double>(indices.size());
}

double effective_bandwidth(AccessPattern pattern, const HbmConfig& cfg) {
    return pattern == AccessPattern::sequential ? cfg.beta_pre : cfg.beta_att;
}

IndexDistribution distribution_from_name(const std::string& name) {
    if (name == "uniform") return IndexDistribution::uniform;
    if (name == "clustered") return IndexDistribution::clustered;
    if (name == "consecutive") return IndexDistribution::consecutive;
    throw ParamError("unknown index distribution: " + name);
}

std::string distribution_name(IndexDistribution dist) {
    switch (dist) {
        case IndexDistribution::uniform: return "uniform";
        case IndexDistribution::clustered: return "clustered";
        case IndexDistribution::consecutive: return "consecutive";
    }
    throw ParamError("invalid index distribution value");
}

std::vector<std::size_t> make_index_window(Rng& rng, std::size_t count, IndexDistribution dist,
                                           double cluster_run) {
    if (count == 0) {
        throw ParamError("make_index_window: count must be positive");
    }
    if (dist == IndexDistribution::clustered && !(cluster_run >= 1.0)) {
        throw ParamError("make_index_window: cluster_run must be >= 1");
    }

    constexpr std::uint64_t kStartRange = 1ull << 30;
    std::vector<std::size_t> window;
    window.reserve(count);

    switch (dist) {
        case IndexDistribution::uniform:
            for (std::size_t i = 0; i < count; ++i) {
                window.push_back(static_cast<std::size_t>(rng.next_below(kStartRange)));
            }
            break;
        case IndexDistribution::consecutive: {
            const std::size_t start = static_cast<std::size_t>(rng.next_below(kStartRange));
            for (std::size_t i = 0; i < count; ++i) {
                window.push_back(start + i);
            }
            break;
        }
        case IndexDistribution::clustered: {
            const double extend_prob = 1.0 - 1.0 / cluster_run;
            while (window.size() < count) {
                std::size_t idx = static_cast<std::size_t>(rng.next_below(kStartRange));
                window.push_back(idx);
                while (window.size() < count && rng.next_unit() < extend_prob) {
                    window.push_back(++idx);
                }
            }
            break;
        }
    }
    return window;
}

void RegionParams::validate() const {
    if (!(core_bits_per_token > 0.0) || !(kv_bits_per_token > 0.0)) {
        throw ParamError("region: per-token footprints must be positive");
    }
    if (!(region0_fraction > 0.0) || !(region0_fraction < 1.0)) {
        throw ParamError("region: region0_fraction must lie in (0, 1)");
    }
    if (baseline_pre_pcs == 0 || baseline_att_pcs == 0) {
        throw ParamError("region: baseline PC counts must be positive");
    }
}

RegionTrace region_swap_sim(std::size_t total_tokens, double stack_capacity_bits,
                            const RegionParams& params) {
    params.validate();
    if (!(stack_capacity_bits > 0.0)) {
        throw ParamError("region: stack capacity must be positive");
    }

    const double region0_cap = stack_capacity_bits * params.region0_fraction;
    const double region1_cap = stack_capacity_bits - region0_cap;

    // used[stack][region]
    double used[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    int core_stack = 0;
    int kv_stack = 1;

    RegionTrace trace;
    for (std::size_t t = 0; t < total_tokens; ++t) {
        const bool fits = used[core_stack][0] + params.core_bits_per_token <= region0_cap &&
                          used[kv_stack][1] + params.kv_bits_per_token <= region1_cap;
        if (!fits) {
            // Capacity boundary: flip the assignment so the fresh regions of
            // the opposite stacks take over. If they are occupied too, the
            // layout is full.
            std::swap(core_stack, kv_stack);
            const bool fits_after =
                used[core_stack][0] + params.core_bits_per_token <= region0_cap &&
                used[kv_stack][1] + params.kv_bits_per_token <= region1_cap;
            if (!fits_after) {
                trace.capacity_exhausted = true;
                break;
            }
            trace.swaps.push_back({t, core_stack, kv_stack});
        }
        used[core_stack][0] += params.core_bits_per_token;
        used[kv_stack][1] += params.kv_bits_per_token;
        ++trace.tokens_stored;
    }

    const double stored = used[0][0] + used[0][1] + used[1][0] + used[1][1];
    trace.utilization = stored / (2.0 * stack_capacity_bits);

    // Partitioned baseline at its own fill cap: the K/V channels fill
    // completely while the feature channels only ever hold core data.
    const double pre = static_cast<double>(params.baseline_pre_pcs);
    const double att = static_cast<double>(params.baseline_att_pcs);
    const double kv_share = att / (pre + att);
    trace.baseline_utilization =
        kv_share * (1.0 + params.core_bits_per_token / params.kv_bits_per_token);
    return trace;
}

}  // namespace salca
