#pragma once

// Compute/memory co-design solver. Picks the memory parallelism pair
// (m_pre, m_att) that maximizes sustained data supply under the HBM
// bandwidth budget and a target retention rate, then derives channel
// allocation, utilization-corrected compute parallelism, and the balance
// retention r_min. refine() re-derives the operating point from hand-picked
// compute widths without leaving the feasible region.

#include <cstddef>

namespace salca {

struct PerfConfig {
    std::size_t d = 128;    // head dimension
    std::size_t chn = 32;   // pseudo-channels
    std::size_t bw = 128;   // bits per PC per HBM cycle
    double s_f = 0.5;       // feature sparsity of the relevance estimate
    double s_q = 0.95;      // target token sparsity; retention r_q = 1 - s_q
    double alpha = 1.17;    // channel conflict factor for indexed access
    double beta_pre = 0.95;
    double beta_att = 0.55;
    double f_cmp = 500e6;
    double f_hbm = 1e9;

    double r_q() const { return 1.0 - s_q; }
    // Pre-compute reads per key: 2-bit codes on the retained channels plus
    // two f16 factors. Attention reads an INT8 K and V row pair.
    double key_bits() const { return 2.0 * static_cast<double>(d) * s_f + 32.0; }
    double att_bits() const { return 16.0 * static_cast<double>(d); }
    // HBM budget translated to bits per compute cycle.
    double bits_per_cmp_cycle() const {
        return static_cast<double>(bw) * static_cast<double>(chn) * f_hbm / f_cmp;
    }

    void validate() const;
};

struct PerfSolution {
    std::size_t m_pre = 0;  // keys fetched per compute cycle, pre-compute
    std::size_t m_att = 0;  // K/V pairs fetched per compute cycle, attention
    std::size_t p_pre = 0;  // compute lanes, pre-compute
    std::size_t p_att = 0;  // compute lanes, attention
    std::size_t h_pre = 0;  // PCs allocated to pre-compute
    std::size_t h_att = 0;  // PCs allocated to attention
    double h_pre_exact = 0.0;
    double h_att_exact = 0.0;
    double u_pre = 0.0;
    double u_att = 0.0;
    double r_min = 0.0;        // retention at which both stages balance
    double supply_rate = 0.0;  // min of effective pre supply and attention
                               // capability at the target retention
    double bandwidth_used = 0.0;
    double bandwidth_available = 0.0;
};

// Scans integer (m_pre, m_att) pairs inside the bandwidth budget and channel
// count, keeps those able to serve the target retention, and returns the
// pair with the highest supply rate (ties broken toward larger m_pre, then
// larger m_att). Throws InfeasibleError naming the binding constraint.
PerfSolution solve(const PerfConfig& cfg);

// Recomputes the solution from overridden compute widths p_pre, p_att. The
// overrides must not exceed the frontier's widths; memory parallelism is
// re-derived as ceil(p / beta) but never beyond the frontier values, so the
// bandwidth inequality keeps holding and refining with the frontier's own
// widths is the identity.
PerfSolution refine(const PerfSolution& frontier, std::size_t p_pre, std::size_t p_att,
                    const PerfConfig& cfg);

struct CriticalPath {
    enum class Bottleneck { pre, att };
    Bottleneck bottleneck = Bottleneck::pre;
    double t_pre_cycles = 0.0;
    double t_att_cycles = 0.0;
    double t_cycles = 0.0;  // max of the two
};

// Analytic per-step latency at sequence length n and retention r_q:
// pre-compute touches every key, attention touches the retained fraction
// inflated by the conflict factor.
CriticalPath critical_path(const PerfConfig& cfg, const PerfSolution& sol, std::size_t n,
                           double r_q);

}  // namespace salca
