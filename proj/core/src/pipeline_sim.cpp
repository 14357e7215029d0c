#include "salca/pipeline_sim.hpp"

#include <algorithm>
#include <cmath>

#include "salca/errors.hpp"
#include "salca/rng.hpp"

namespace salca {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::size_t ceil_ratio(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-12)); }

// Sorted unique token positions for one head's selection. The clustered
// walk alternates geometric gaps and geometric runs sized so the expected
// density matches k/n; a front-to-back backfill covers the rare case where
// the walk exhausts the sequence early.
std::vector<std::size_t> make_selection(Rng& rng, std::size_t n, std::size_t k,
                                        IndexDistribution dist, double cluster_run) {
    std::vector<std::size_t> out;
    out.reserve(k);
    switch (dist) {
        case IndexDistribution::uniform:
            return rng.sample_without_replacement(n, k);
        case IndexDistribution::consecutive: {
            const std::size_t start =
                k >= n ? 0 : static_cast<std::size_t>(rng.next_below(n - k + 1));
            for (std::size_t i = 0; i < k; ++i) {
                out.push_back(start + i);
            }
            return out;
        }
        case IndexDistribution::clustered:
            break;
    }

    const double r = static_cast<double>(k) / static_cast<double>(n);
    std::vector<bool> picked(n, false);
    std::size_t count = 0;
    if (r >= 1.0) {
        count = n;
        picked.assign(n, true);
    } else {
        const double gap_mean = cluster_run * (1.0 - r) / r;
        const double gap_extend = gap_mean / (gap_mean + 1.0);
        const double run_extend = 1.0 - 1.0 / cluster_run;
        std::size_t pos = 0;
        while (pos < n && count < k) {
            while (pos < n && rng.next_unit() < gap_extend) {
                ++pos;
            }
            if (pos >= n || count >= k) {
                break;
            }
            do {
                picked[pos++] = true;
                ++count;
            } while (pos < n && count < k && rng.next_unit() < run_extend);
        }
        for (std::size_t p = 0; p < n && count < k; ++p) {
            if (!picked[p]) {
                picked[p] = true;
                ++count;
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (picked[p]) {
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace

void PipelineConfig::validate() const {
    hbm.validate();
    if (d == 0) {
        throw ParamError("pipeline: d must be positive");
    }
    if (m_pre == 0 || m_att == 0 || p_pre == 0 || p_att == 0) {
        throw ParamError("pipeline: parallelism values must be positive");
    }
    if (!(f_cmp > 0.0)) {
        throw ParamError("pipeline: f_cmp must be positive");
    }
    if (topk_parallelism == 0) {
        throw ParamError("pipeline: topk_parallelism must be positive");
    }
    if (pool_window == 0 || pool_window % 2 == 0) {
        throw ParamError("pipeline: pool window must be odd");
    }
    if (banks * bank_width != topk_parallelism) {
        throw ParamError("pipeline: banks * bank_width must equal topk_parallelism");
    }
    if (p_pre > ceil_ratio(static_cast<double>(m_pre) * hbm.beta_pre)) {
        throw ParamError("pipeline: p_pre outruns the delivered pre-compute stream");
    }
    if (p_att > ceil_ratio(static_cast<double>(m_att) * hbm.beta_att)) {
        throw ParamError("pipeline: p_att outruns the delivered attention stream");
    }
    if (heads == 0) {
        throw ParamError("pipeline: heads must be positive");
    }
    if (index_buffer_depth < hbm.reorder_range) {
        throw ParamError("pipeline: index buffer must hold at least one reorder window");
    }
    if (distribution == IndexDistribution::clustered && !(cluster_run >= 1.0)) {
        throw ParamError("pipeline: cluster_run must be >= 1");
    }
    if (sram_writeback_latency == 0) {
        throw ParamError("pipeline: sram_writeback_latency must be positive");
    }
}

ThresholdUnit::ThresholdUnit(std::size_t writeback_latency) : latency_(writeback_latency) {
    if (latency_ == 0) {
        throw ParamError("threshold unit: write-back latency must be positive");
    }
}

void ThresholdUnit::commit_oldest() {
    if (pipe_.empty()) {
        return;
    }
    const Pending& p = pipe_.front();
    if (p.valid) {
        sram_[p.addr] = Entry{p.layer, p.head, p.count, true};
    }
    pipe_.erase(pipe_.begin());
}

std::uint64_t ThresholdUnit::step(std::uint32_t layer, std::uint32_t head, std::uint8_t addr) {
    if (pipe_.size() == latency_) {
        commit_oldest();
    }

    // Bypass from the newest matching in-flight write; the tag comparison is
    // part of the match, so a pending count from another head never leaks.
    std::uint64_t count = 0;
    bool hit = false;
    for (auto it = pipe_.rbegin(); it != pipe_.rend(); ++it) {
        if (it->valid && it->addr == addr && it->layer == layer && it->head == head) {
            count = it->count;
            hit = true;
            break;
        }
    }
    if (!hit) {
        const Entry& e = sram_[addr];
        if (e.valid && e.layer == layer && e.head == head) {
            count = e.count;
        }
    }

    pipe_.push_back(Pending{layer, head, addr, count + 1, true});
    return count + 1;
}

void ThresholdUnit::drain() {
    while (!pipe_.empty()) {
        commit_oldest();
    }
}

std::array<std::uint64_t, 256> ThresholdUnit::histogram(std::uint32_t layer, std::uint32_t head) {
    drain();
    std::array<std::uint64_t, 256> out{};
    for (std::size_t addr = 0; addr < out.size(); ++addr) {
        const Entry& e = sram_[addr];
        out[addr] = (e.valid && e.layer == layer && e.head == head) ? e.count : 0;
    }
    return out;
}

TopkStageCycles topk_stage_cycles(std::size_t n, std::size_t parallelism,
                                  std::size_t scan_cycles) {
    if (n == 0 || parallelism == 0) {
        throw ParamError("topk_stage_cycles: n and parallelism must be positive");
    }
    TopkStageCycles c;
    c.histogram_pass = ceil_div(n, parallelism);
    c.filter_pass = ceil_div(n, parallelism);
    c.threshold_scan = std::min<std::size_t>(scan_cycles, 256);
    c.total = c.histogram_pass + c.filter_pass + c.threshold_scan;
    return c;
}

DenseStoreResult dense_store_sim(std::span<const std::size_t> valid_counts, std::size_t banks,
                                 std::size_t width) {
    if (banks == 0 || width == 0) {
        throw ParamError("dense store: banks and width must be positive");
    }
    DenseStoreResult res;
    res.bank_contents.assign(banks, {});

    std::uint64_t next_id = 0;
    std::size_t bank_cursor = 0;
    std::vector<std::uint64_t> fragment;
    fragment.reserve(width);

    for (std::size_t cycle = 0; cycle < valid_counts.size(); ++cycle) {
        const std::size_t t = valid_counts[cycle];
        if (t > banks * width) {
            throw ParamError("dense store: per-cycle count exceeds banks * width");
        }
        const std::size_t full = t / width;
        for (std::size_t c = 0; c < full; ++c) {
            auto& bank = res.bank_contents[bank_cursor];
            bank_cursor = (bank_cursor + 1) % banks;
            for (std::size_t e = 0; e < width; ++e) {
                bank.push_back(next_id++);
            }
        }
        for (std::size_t e = full * width; e < t; ++e) {
            fragment.push_back(next_id++);
            if (fragment.size() == width) {
                res.fragment_contents.insert(res.fragment_contents.end(), fragment.begin(),
                                             fragment.end());
                res.fragment_flush_cycles.push_back(cycle);
                fragment.clear();
            }
        }
    }
    if (!fragment.empty()) {
        res.fragment_contents.insert(res.fragment_contents.end(), fragment.begin(),
                                     fragment.end());
        res.fragment_flush_cycles.push_back(valid_counts.size());
        fragment.clear();
    }
    res.cycles = valid_counts.size();
    return res;
}

DecodeStepTrace simulate_decode_step(std::size_t n, double r_q, const PipelineConfig& cfg) {
    cfg.validate();
    if (n == 0) {
        throw ParamError("simulate: n must be positive");
    }
    if (!(r_q > 0.0) || r_q > 1.0) {
        throw ParamError("simulate: retention must lie in (0, 1]");
    }

    const std::size_t window_size = cfg.hbm.reorder_range;
    const double hbm_per_cmp = cfg.hbm.f_hbm / cfg.f_cmp;
    const std::uint64_t row_hbm = row_transfer_cycles(8 * cfg.d, cfg.hbm);
    const std::uint64_t row_cmp =
        std::max<std::uint64_t>(1, ceil_ratio(static_cast<double>(row_hbm) / hbm_per_cmp));
    // Gather throughput is set by channel geometry: kv_pc_count rows land
    // every row_cmp compute cycles when the window is balanced.
    const double m_att_geom = static_cast<double>(cfg.hbm.kv_pc_count) / row_cmp;

    const std::uint64_t fetch_useful = ceil_div(n, cfg.m_pre);
    const std::uint64_t fetch_dur = ceil_ratio(static_cast<double>(fetch_useful) / cfg.hbm.beta_pre);
    const std::uint64_t score_dur = ceil_div(n, cfg.p_pre);
    const std::uint64_t hist_dur = ceil_div(n, cfg.topk_parallelism);
    const std::uint64_t phase_a_busy = std::max({fetch_dur, score_dur, hist_dur});
    const std::uint64_t filter_dur = ceil_div(n, cfg.topk_parallelism);

    // Reverse bin scan covers roughly the retained fraction of the 256 bins,
    // after the write-back pipe settles.
    const std::size_t scan =
        std::min<std::size_t>(256, static_cast<std::size_t>(256.0 * r_q) + 1) +
        cfg.sram_writeback_latency;

    const std::size_t k_target =
        std::min<std::size_t>(n, std::max<std::size_t>(1, std::llround(r_q * static_cast<double>(n))));
    const std::size_t cap_windows = cfg.index_buffer_depth / window_size;

    Rng rng(cfg.seed);

    DecodeStepTrace trace;
    trace.n = n;
    trace.r_q = r_q;
    trace.heads = cfg.heads;
    trace.scan_cycles = scan;
    trace.stages = {StageStats{"fetch"}, StageStats{"score"}, StageStats{"topk"},
                    StageStats{"gather"}, StageStats{"attention"}};

    std::uint64_t end_a_prev = 0;
    std::vector<std::uint64_t> filter_ends;
    std::uint64_t gather_free = 0;
    std::uint64_t att_free = 0;
    std::uint64_t att_end_last = 0;
    std::uint64_t att_end_prev = 0;
    std::uint64_t att_end_first = 0;

    // Global window bookkeeping for the shared index buffer.
    std::vector<std::uint64_t> window_gather_end;
    std::vector<std::uint64_t> window_tokens_prefix{0};

    double sum_max_count = 0.0;
    double sum_window_tokens = 0.0;

    for (std::size_t h = 0; h < cfg.heads; ++h) {
        // The score store is double-buffered: head h reuses the bank that
        // head h-2's filter pass finished reading.
        const std::uint64_t bank_free = h >= 2 ? filter_ends[h - 2] : 0;
        const std::uint64_t start_a = std::max(end_a_prev, bank_free);
        const std::uint64_t end_a = start_a + phase_a_busy;
        end_a_prev = end_a;
        // Handoff registers delay the data, not the unit.
        const std::uint64_t scores_ready = end_a + 2 * cfg.fill_per_stage;

        trace.stages[0].busy_cycles += fetch_useful;
        trace.stages[0].stall_cycles += fetch_dur - fetch_useful;
        trace.stages[0].items += n;
        trace.stages[1].busy_cycles += score_dur;
        trace.stages[1].items += n;

        const auto selection = make_selection(rng, n, k_target, cfg.distribution, cfg.cluster_run);
        trace.selected_tokens += selection.size();

        const std::uint64_t filter_start =
            std::max(scores_ready + scan, filter_ends.empty() ? 0 : filter_ends.back());
        const std::size_t head_windows =
            (selection.size() + window_size - 1) / window_size;

        std::uint64_t block_delay = 0;
        std::uint64_t gather_end_prev = gather_free;
        std::uint64_t att_end_prev_window = att_free;
        std::uint64_t produced_last = filter_start;
        double beta_carry = 0.0;

        for (std::size_t w = 0; w < head_windows; ++w) {
            const std::size_t lo = w * window_size;
            const std::size_t hi = std::min(selection.size(), lo + window_size);
            const std::span<const std::size_t> widx(selection.data() + lo, hi - lo);

            const auto sched = schedule_window(widx, cfg.hbm);
            sum_max_count += static_cast<double>(sched.max_count);
            sum_window_tokens += static_cast<double>(widx.size());

            // Producer: the filter pass emits this window's last index after
            // scanning its position; a full buffer stalls the emission until
            // the slot-freeing window has been gathered.
            const std::size_t global_idx = window_gather_end.size();
            std::uint64_t produced =
                filter_start + ceil_div(selection[hi - 1] + 1, cfg.topk_parallelism) + block_delay;
            if (global_idx >= cap_windows) {
                const std::uint64_t slot_free = window_gather_end[global_idx - cap_windows];
                if (slot_free > produced) {
                    block_delay += slot_free - produced;
                    produced = slot_free;
                }
            }
            produced_last = produced;

            // Buffer occupancy at the emission instant.
            const auto consumed_it = std::upper_bound(window_gather_end.begin(),
                                                      window_gather_end.end(), produced);
            const std::size_t consumed =
                static_cast<std::size_t>(consumed_it - window_gather_end.begin());
            const std::uint64_t occupancy_tokens =
                window_tokens_prefix.back() + widx.size() - window_tokens_prefix[consumed];
            trace.max_buffer_tokens =
                std::max(trace.max_buffer_tokens, static_cast<std::size_t>(occupancy_tokens));

            // Consumer: the window drains in max_count row slots; transfer
            // efficiency below 1 shows up as deterministic stall padding.
            const std::uint64_t useful = sched.max_count * row_cmp;
            beta_carry += static_cast<double>(useful) * (1.0 / cfg.hbm.beta_att - 1.0);
            const std::uint64_t pad = static_cast<std::uint64_t>(beta_carry);
            beta_carry -= static_cast<double>(pad);
            const std::uint64_t gather_start = std::max(produced, gather_end_prev);
            const std::uint64_t gather_end = gather_start + useful + pad;
            gather_end_prev = gather_end;
            window_gather_end.push_back(gather_end);
            window_tokens_prefix.push_back(window_tokens_prefix.back() + widx.size());

            trace.stages[3].busy_cycles += useful;
            trace.stages[3].stall_cycles += pad;
            trace.stages[3].items += widx.size();

            const std::uint64_t att_dur = ceil_div(widx.size(), cfg.p_att);
            const std::uint64_t att_start = std::max(gather_end, att_end_prev_window);
            att_end_prev_window = att_start + att_dur;
            trace.stages[4].busy_cycles += att_dur;
            trace.stages[4].items += widx.size();
        }

        const std::uint64_t filter_end =
            std::max(filter_start + filter_dur + block_delay, produced_last);
        filter_ends.push_back(filter_end);
        gather_free = gather_end_prev;
        att_free = att_end_prev_window;

        trace.stages[2].busy_cycles += hist_dur + scan + filter_dur;
        trace.stages[2].stall_cycles += block_delay;
        trace.stages[2].items += n;

        att_end_prev = att_end_last;
        att_end_last = att_end_prev_window;
        if (h == 0) {
            att_end_first = att_end_prev_window;
        }
    }

    trace.windows = window_gather_end.size();
    trace.total_cycles = att_end_last + cfg.fill_per_stage;
    trace.head0_latency = att_end_first + cfg.fill_per_stage;
    trace.steady_cycles_per_head =
        cfg.heads >= 2 ? att_end_last - att_end_prev : trace.total_cycles;

    trace.measured_alpha = sum_window_tokens > 0.0
                               ? sum_max_count /
                                     (sum_window_tokens / static_cast<double>(cfg.hbm.kv_pc_count))
                               : 1.0;
    trace.t_pre_cycles_per_head =
        static_cast<double>(n) / (cfg.hbm.beta_pre * static_cast<double>(cfg.m_pre));
    const double k_avg =
        static_cast<double>(trace.selected_tokens) / static_cast<double>(cfg.heads);
    trace.t_att_cycles_per_head =
        k_avg * trace.measured_alpha / (cfg.hbm.beta_att * m_att_geom);
    trace.analytic_total = static_cast<double>(cfg.heads) *
                           std::max(trace.t_pre_cycles_per_head, trace.t_att_cycles_per_head);
    trace.tokens_per_sec = cfg.f_cmp / static_cast<double>(trace.total_cycles);
    return trace;
}

}  // namespace salca
