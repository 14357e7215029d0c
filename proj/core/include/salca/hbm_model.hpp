#pragma once

// Memory-system model: pseudo-channel mapping for K/V rows, the
// range-extension reordering scheduler that eliminates channel conflicts
// inside a bounded window, empirical transfer-efficiency constants, and the
// interleaved two-stack region layout.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "salca/rng.hpp"

namespace salca {

struct HbmConfig {
    // Pseudo-channels in the stack and bits each one moves per HBM cycle.
    // 128 bits/PC/cycle corresponds to 512 GB/s split over 32 PCs at 1 GHz.
    std::size_t pc_count = 32;
    std::size_t pc_bits_per_cycle = 128;
    double f_hbm = 1e9;

    // PCs striped for K/V rows and the reordering window size. A row lives
    // entirely in one PC, so the scheduler only has to balance whole rows.
    std::size_t kv_pc_count = 8;
    std::size_t reorder_range = 128;

    // Measured transfer efficiencies for streaming (pre-compute) and indexed
    // (attention) access. These are model constants, never derived.
    double beta_pre = 0.95;
    double beta_att = 0.55;

    void validate() const;
};

// The low bits of the token index select the channel, so a contiguous run of
// kv_pc_count tokens touches every K/V channel exactly once.
std::size_t map_index_to_pc(std::size_t token_index, const HbmConfig& cfg);

// HBM cycles to deliver one row of row_bits from its single channel.
std::size_t row_transfer_cycles(std::size_t row_bits, const HbmConfig& cfg);

constexpr std::size_t kNoRequest = static_cast<std::size_t>(-1);

struct AccessSchedule {
    // slots[cycle][pc] holds the position of the request served there, or
    // kNoRequest. The schedule is conflict-free by construction: one request
    // per PC per cycle.
    std::vector<std::vector<std::size_t>> slots;
    std::vector<std::size_t> per_pc_counts;
    std::size_t max_count = 0;
    double conflict_rate = 1.0;
};

// Groups the window's requests by channel (stable, so arrival order is kept
// within a channel) and advances one cursor per channel each cycle. Lasts
// max_count cycles; conflict_rate = max_count / (|indices| / kv_pc_count).
AccessSchedule schedule_window(std::span<const std::size_t> indices, const HbmConfig& cfg);

// Same conflict_rate as schedule_window without materializing the slot
// matrix; meant for Monte Carlo sweeps over many windows.
double window_conflict_rate(std::span<const std::size_t> indices, const HbmConfig& cfg);

enum class AccessPattern { sequential, indexed };

// Returns the configured beta for the pattern.
double effective_bandwidth(AccessPattern pattern, const HbmConfig& cfg);

enum class IndexDistribution { uniform, clustered, consecutive };

IndexDistribution distribution_from_name(const std::string& name);
std::string distribution_name(IndexDistribution dist);

// Synthesizes one window of token indices. The clustered distribution emits
// geometric runs of consecutive indices with the given mean length, which is
// what maxpool-widened selections look like; cluster_run 1 degenerates to
// uniform.
std::vector<std::size_t> make_index_window(Rng& rng, std::size_t count, IndexDistribution dist,
                                           double cluster_run = 4.0);

struct RegionParams {
    // Storage footprint per decoded token. The core-feature slot is padded to
    // 1/8 of the K/V row so that Region0's 1/8 capacity share fills at the
    // same rate as Region1; the raw codes (2 bits x retained channels plus
    // two f16 factors) are smaller than the slot.
    double core_bits_per_token = 256.0;
    double kv_bits_per_token = 2048.0;
    double region0_fraction = 0.125;

    // Channel split of the partitioned baseline the interleaved layout is
    // compared against: feature PCs hold only core data and sit 7/8 empty.
    std::size_t baseline_pre_pcs = 11;
    std::size_t baseline_att_pcs = 16;

    void validate() const;
};

struct RegionSwapEvent {
    std::size_t token_index;  // first token stored under the new assignment
    int core_stack = 0;       // stack whose Region0 takes core features
    int kv_stack = 1;         // stack whose Region1 takes K/V rows
};

struct RegionTrace {
    std::vector<RegionSwapEvent> swaps;
    std::size_t tokens_stored = 0;
    bool capacity_exhausted = false;
    // Fraction of the two stacks' combined capacity actually holding data,
    // and the same accounting for the partitioned baseline at its cap.
    double utilization = 0.0;
    double baseline_utilization = 0.0;
};

// Streams total_tokens through the two-stack layout: core features land in
// one stack's Region0 while K/V rows land in the other stack's Region1, and
// the assignment swaps whenever the active K/V region hits its capacity
// boundary. Reader streams therefore never share a stack.
RegionTrace region_swap_sim(std::size_t total_tokens, double stack_capacity_bits,
                            const RegionParams& params = {});

}  // namespace salca
