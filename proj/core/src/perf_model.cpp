#include "salca/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "salca/errors.hpp"

namespace salca {

namespace {

std::size_t ceil_div_to_count(double x) {
    return static_cast<std::size_t>(std::ceil(x - 1e-12));
}

double exact_h(double bits, std::size_t m, const PerfConfig& cfg) {
    return bits * static_cast<double>(m) * cfg.f_cmp /
           (static_cast<double>(cfg.bw) * cfg.f_hbm);
}

double balance_retention(std::size_t m_pre, std::size_t m_att, const PerfConfig& cfg) {
    return cfg.beta_att * static_cast<double>(m_att) /
           (cfg.beta_pre * static_cast<double>(m_pre) * cfg.alpha);
}

// Effective rows per cycle the weaker stage can sustain at the target
// retention. Pre-compute delivers beta_pre * m_pre keys per cycle; attention
// can keep up with beta_att * m_att / (alpha * r_q) keys' worth of selection
// pressure.
double supply_rate(std::size_t m_pre, std::size_t m_att, const PerfConfig& cfg) {
    const double pre = cfg.beta_pre * static_cast<double>(m_pre);
    const double att = cfg.beta_att * static_cast<double>(m_att) / (cfg.alpha * cfg.r_q());
    return std::min(pre, att);
}

PerfSolution make_solution(std::size_t m_pre, std::size_t m_att, const PerfConfig& cfg) {
    PerfSolution s;
    s.m_pre = m_pre;
    s.m_att = m_att;
    s.h_pre_exact = exact_h(cfg.key_bits(), m_pre, cfg);
    s.h_att_exact = exact_h(cfg.att_bits(), m_att, cfg);
    s.h_pre = ceil_div_to_count(s.h_pre_exact);
    s.h_att = ceil_div_to_count(s.h_att_exact);
    const double eff_pre = static_cast<double>(m_pre) * cfg.beta_pre;
    const double eff_att = static_cast<double>(m_att) * cfg.beta_att;
    s.p_pre = ceil_div_to_count(eff_pre);
    s.p_att = ceil_div_to_count(eff_att);
    s.u_pre = eff_pre / static_cast<double>(s.p_pre);
    s.u_att = eff_att / static_cast<double>(s.p_att);
    s.r_min = balance_retention(m_pre, m_att, cfg);
    s.supply_rate = supply_rate(m_pre, m_att, cfg);
    s.bandwidth_used =
        cfg.key_bits() * static_cast<double>(m_pre) + cfg.att_bits() * static_cast<double>(m_att);
    s.bandwidth_available = cfg.bits_per_cmp_cycle();
    return s;
}

}  // namespace

void PerfConfig::validate() const {
    if (d == 0 || chn == 0 || bw == 0) {
        throw ParamError("perf: d, chn and bw must be positive");
    }
    if (!(s_f > 0.0) || s_f > 1.0) {
        throw ParamError("perf: s_f must lie in (0, 1]");
    }
    if (!(s_q >= 0.0) || !(s_q < 1.0)) {
        throw ParamError("perf: s_q must lie in [0, 1)");
    }
    if (!(alpha >= 1.0)) {
        throw ParamError("perf: alpha must be >= 1");
    }
    if (!(beta_pre > 0.0) || beta_pre > 1.0 || !(beta_att > 0.0) || beta_att > 1.0) {
        throw ParamError("perf: beta values must lie in (0, 1]");
    }
    if (!(f_cmp > 0.0) || !(f_hbm > 0.0)) {
        throw ParamError("perf: frequencies must be positive");
    }
}

PerfSolution solve(const PerfConfig& cfg) {
    cfg.validate();
    const double budget = cfg.bits_per_cmp_cycle();

    if (cfg.key_bits() + cfg.att_bits() > budget) {
        throw InfeasibleError(
            "perf: bandwidth budget cannot even cover one key fetch plus one K/V pair "
            "(binding constraint: bandwidth)");
    }

    bool any_within_channels = false;
    double best_reachable_r_min = 1e300;

    bool found = false;
    PerfSolution best;
    const std::size_t m_att_limit =
        static_cast<std::size_t>((budget - cfg.key_bits()) / cfg.att_bits());
    for (std::size_t m_att = 1; m_att <= m_att_limit; ++m_att) {
        std::size_t m_pre = static_cast<std::size_t>(
            (budget - cfg.att_bits() * static_cast<double>(m_att)) / cfg.key_bits());
        // The ceiled channel counts can overshoot chn even when the raw
        // bandwidth fits; shrink m_pre until the allocation is realizable.
        PerfSolution cand = make_solution(m_pre, m_att, cfg);
        while (m_pre > 1 && cand.h_pre + cand.h_att > cfg.chn) {
            cand = make_solution(--m_pre, m_att, cfg);
        }
        if (cand.h_pre + cand.h_att > cfg.chn) {
            continue;
        }
        any_within_channels = true;
        best_reachable_r_min = std::min(best_reachable_r_min, cand.r_min);
        if (cand.r_min > cfg.r_q()) {
            continue;
        }
        const bool better =
            !found || cand.supply_rate > best.supply_rate ||
            (cand.supply_rate == best.supply_rate &&
             (cand.m_pre > best.m_pre || (cand.m_pre == best.m_pre && cand.m_att > best.m_att)));
        if (better) {
            best = cand;
            found = true;
        }
    }

    if (!found) {
        if (!any_within_channels) {
            throw InfeasibleError(
                "perf: no parallelism pair fits into " + std::to_string(cfg.chn) +
                " channels (binding constraint: channels)");
        }
        throw InfeasibleError(
            "perf: target retention " + std::to_string(cfg.r_q()) +
            " is below the best reachable balance retention " +
            std::to_string(best_reachable_r_min) + " (binding constraint: retention)");
    }
    return best;
}

PerfSolution refine(const PerfSolution& frontier, std::size_t p_pre, std::size_t p_att,
                    const PerfConfig& cfg) {
    cfg.validate();
    if (p_pre == 0 || p_att == 0) {
        throw ParamError("refine: compute widths must be positive");
    }
    if (p_pre > frontier.p_pre || p_att > frontier.p_att) {
        throw ParamError("refine: override exceeds the frontier compute width");
    }

    // ceil(p / beta) keys of memory parallelism keep p lanes fed; the cap at
    // the frontier value preserves the bandwidth inequality and makes
    // refinement with the frontier widths a no-op.
    const std::size_t m_pre =
        std::min(frontier.m_pre,
                 static_cast<std::size_t>(std::ceil(static_cast<double>(p_pre) / cfg.beta_pre)));
    const std::size_t m_att =
        std::min(frontier.m_att,
                 static_cast<std::size_t>(std::ceil(static_cast<double>(p_att) / cfg.beta_att)));

    PerfSolution refined = make_solution(m_pre, m_att, cfg);
    refined.p_pre = p_pre;
    refined.p_att = p_att;
    refined.u_pre = std::min(1.0, cfg.beta_pre * static_cast<double>(m_pre) /
                                      static_cast<double>(p_pre));
    refined.u_att = std::min(1.0, cfg.beta_att * static_cast<double>(m_att) /
                                      static_cast<double>(p_att));
    return refined;
}

CriticalPath critical_path(const PerfConfig& cfg, const PerfSolution& sol, std::size_t n,
                           double r_q) {
    if (n == 0) {
        throw ParamError("critical_path: n must be positive");
    }
    if (!(r_q > 0.0) || r_q > 1.0) {
        throw ParamError("critical_path: retention must lie in (0, 1]");
    }
    CriticalPath path;
    path.t_pre_cycles =
        static_cast<double>(n) / (cfg.beta_pre * static_cast<double>(sol.m_pre));
    path.t_att_cycles = static_cast<double>(n) * r_q * cfg.alpha /
                        (cfg.beta_att * static_cast<double>(sol.m_att));
    path.bottleneck = path.t_att_cycles >= path.t_pre_cycles ? CriticalPath::Bottleneck::att
                                                             : CriticalPath::Bottleneck::pre;
    path.t_cycles = std::max(path.t_pre_cycles, path.t_att_cycles);
    return path;
}

}  // namespace salca
