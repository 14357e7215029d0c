#pragma once

// Cycle-approximate model of the five-stage decode pipeline:
//   1. core-feature fetch        (sequential HBM stream, beta_pre)
//   2. relevance + maxpool       (p_pre lanes)
//   3. top-k histogram/filter    (topk_parallelism lanes, threshold scan)
//   4. K/V gather                (indexed HBM access, window reordering)
//   5. attention                 (p_att lanes)
//
// Heads flow through with double-buffered handoffs, so stage s of head h+1
// overlaps stage s+1 of head h. Stages 1-3a stream into each other and are
// modeled as one fused segment per head; the threshold scan is a hard
// barrier; stages 3b-5 exchange work at reorder-window granularity through a
// bounded index buffer with back-pressure.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "salca/hbm_model.hpp"

namespace salca {

struct PipelineConfig {
    std::size_t d = 128;

    // Memory and compute parallelism (tokens per compute cycle). Defaults
    // are the refined operating point of the shipped design.
    std::size_t m_pre = 17;
    std::size_t m_att = 2;
    std::size_t p_pre = 16;
    std::size_t p_att = 1;

    double f_cmp = 500e6;

    std::size_t topk_parallelism = 64;
    std::size_t pool_window = 7;

    // Dense score store geometry; banks * bank_width must equal the top-k
    // lane count feeding it.
    std::size_t banks = 8;
    std::size_t bank_width = 8;

    std::size_t heads = 8;
    std::size_t index_buffer_depth = 256;  // tokens; must hold a full window
    std::size_t fill_per_stage = 8;        // handoff latency between units
    std::size_t sram_writeback_latency = 2;

    // Shape of the selected-token index stream driving the gather stage.
    IndexDistribution distribution = IndexDistribution::clustered;
    double cluster_run = 4.0;
    std::uint64_t seed = 1;

    HbmConfig hbm;

    void validate() const;
};

// Read-accumulate-write histogram unit: 256 SRAM counters tagged with
// <layer, head>, a write-back pipe of configurable depth, and bypass from
// the in-flight writes. A read whose tags mismatch yields 0, which is what
// retires stale counts when the pipeline moves to the next head.
class ThresholdUnit {
  public:
    explicit ThresholdUnit(std::size_t writeback_latency = 2);

    // Accumulates one request and returns the count it observed + 1.
    std::uint64_t step(std::uint32_t layer, std::uint32_t head, std::uint8_t addr);

    // Flushes in-flight writes to the SRAM.
    void drain();

    // Drains, then reads all 256 counters under the given tags.
    std::array<std::uint64_t, 256> histogram(std::uint32_t layer, std::uint32_t head);

  private:
    struct Entry {
        std::uint32_t layer = 0;
        std::uint32_t head = 0;
        std::uint64_t count = 0;
        bool valid = false;
    };
    struct Pending {
        std::uint32_t layer = 0;
        std::uint32_t head = 0;
        std::uint8_t addr = 0;
        std::uint64_t count = 0;
        bool valid = false;
    };

    void commit_oldest();

    std::array<Entry, 256> sram_;
    std::vector<Pending> pipe_;  // index 0 is oldest
    std::size_t latency_;
};

struct TopkStageCycles {
    std::uint64_t histogram_pass = 0;
    std::uint64_t filter_pass = 0;
    std::uint64_t threshold_scan = 0;
    std::uint64_t total = 0;
};

// Two full passes over the n scores plus the bin scan; the scan never
// exceeds the 256 histogram bins.
TopkStageCycles topk_stage_cycles(std::size_t n, std::size_t parallelism,
                                  std::size_t scan_cycles = 256);

struct DenseStoreResult {
    std::vector<std::vector<std::uint64_t>> bank_contents;  // element ids
    std::vector<std::uint64_t> fragment_contents;
    std::vector<std::size_t> fragment_flush_cycles;
    std::size_t cycles = 0;
};

// Chunked writer behind the compaction network: each cycle delivers
// valid_count elements, full chunks of `width` go straight to the banks in
// round-robin order, leftovers accumulate in a fragment register that
// flushes to the fragment RAM whenever it fills (and once more at the end).
DenseStoreResult dense_store_sim(std::span<const std::size_t> valid_counts, std::size_t banks,
                                 std::size_t width);

struct StageStats {
    std::string name;
    std::uint64_t busy_cycles = 0;
    std::uint64_t stall_cycles = 0;
    std::uint64_t items = 0;
};

struct DecodeStepTrace {
    std::array<StageStats, 5> stages;

    std::uint64_t total_cycles = 0;
    std::uint64_t head0_latency = 0;
    std::uint64_t steady_cycles_per_head = 0;

    // Conflict factor actually seen by the gather windows, and the
    // throughput-formula latencies evaluated with it.
    double measured_alpha = 1.0;
    double t_pre_cycles_per_head = 0.0;
    double t_att_cycles_per_head = 0.0;
    double analytic_total = 0.0;  // heads * max(t_pre, t_att)

    double tokens_per_sec = 0.0;

    std::size_t n = 0;
    double r_q = 0.0;
    std::size_t heads = 0;
    std::size_t selected_tokens = 0;
    std::size_t windows = 0;
    std::size_t scan_cycles = 0;
    std::size_t max_buffer_tokens = 0;
};

// Runs one decode step (all heads) at sequence length n and retention r_q.
DecodeStepTrace simulate_decode_step(std::size_t n, double r_q, const PipelineConfig& cfg);

}  // namespace salca
