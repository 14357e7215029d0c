#include "salca/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "salca/errors.hpp"
#include "salca/rng.hpp"

namespace salca {

namespace {

// Run starts are drawn without replacement, then each run extends
// geometrically so the mean length is cluster_run. Overlapping runs merge.
std::vector<std::size_t> place_salient_runs(Rng& rng, const SyntheticSpec& spec) {
    const std::size_t target = static_cast<std::size_t>(
        std::llround(spec.salient_fraction * static_cast<double>(spec.n)));
    if (target == 0) {
        return {};
    }
    const double mean_run = std::max(1.0, spec.cluster_run);
    const std::size_t runs = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(target) / mean_run)));
    const auto starts = rng.sample_without_replacement(spec.n, std::min(runs, spec.n));

    std::vector<char> mark(spec.n, 0);
    const double extend_prob = 1.0 - 1.0 / mean_run;
    for (const std::size_t start : starts) {
        std::size_t len = 1;
        while (rng.next_unit() < extend_prob) {
            ++len;
        }
        for (std::size_t i = start; i < std::min(start + len, spec.n); ++i) {
            mark[i] = 1;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (mark[i]) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n == 0 || d == 0) {
        throw ParamError("synthetic spec: n and d must be positive");
    }
    if (heavy_count > d) {
        throw ParamError("synthetic spec: heavy_count exceeds d");
    }
    if (heavy_gain < 1.0) {
        throw ParamError("synthetic spec: heavy_gain must be >= 1");
    }
    if (cluster_run < 1.0) {
        throw ParamError("synthetic spec: cluster_run must be >= 1");
    }
    if (salient_fraction < 0.0 || salient_fraction > 1.0) {
        throw ParamError("synthetic spec: salient_fraction must be in [0, 1]");
    }
    if (salient_boost < 0.0) {
        throw ParamError("synthetic spec: salient_boost must be >= 0");
    }
}

Workload generate_workload(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t n = spec.n;
    const std::size_t d = spec.d;

    const auto heavy = rng.sample_without_replacement(d, spec.heavy_count);
    std::vector<char> is_heavy(d, 0);
    for (const std::size_t j : heavy) {
        is_heavy[j] = 1;
    }

    // Channel means: heavy channels sit at +-heavy_gain with some spread so
    // row ranges are not perfectly symmetric; the rest are ordinary normals.
    std::vector<double> mu(d);
    for (std::size_t j = 0; j < d; ++j) {
        if (is_heavy[j]) {
            const double sign = rng.next_unit() < 0.5 ? -1.0 : 1.0;
            mu[j] = sign * spec.heavy_gain * (1.0 + 0.25 * std::abs(rng.next_normal()));
        } else {
            mu[j] = rng.next_normal();
        }
    }

    std::vector<float> key(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            key[i * d + j] = static_cast<float>(mu[j] + rng.next_normal());
        }
    }

    const auto salient = place_salient_runs(rng, spec);

    std::vector<float> query(d);
    for (std::size_t j = 0; j < d; ++j) {
        query[j] = static_cast<float>(rng.next_normal());
    }

    // Salient rows get a rank-one bump along the query, confined to the heavy
    // channels (or all channels when none are planted), sized so the score
    // gain is salient_boost times the base score stddev sqrt(sum q_j^2).
    if (!salient.empty() && spec.salient_boost > 0.0) {
        std::vector<std::size_t> bump_channels = heavy;
        if (bump_channels.empty()) {
            bump_channels.resize(d);
            for (std::size_t j = 0; j < d; ++j) {
                bump_channels[j] = j;
            }
        }
        double q_norm2_all = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            q_norm2_all += static_cast<double>(query[j]) * query[j];
        }
        double q_norm2_bump = 0.0;
        for (const std::size_t j : bump_channels) {
            q_norm2_bump += static_cast<double>(query[j]) * query[j];
        }
        if (q_norm2_bump > 0.0) {
            const double c = spec.salient_boost * std::sqrt(q_norm2_all) / q_norm2_bump;
            for (const std::size_t i : salient) {
                for (const std::size_t j : bump_channels) {
                    key[i * d + j] += static_cast<float>(c * query[j]);
                }
            }
        }
    }

    // Enforce the heavy-channel contract exactly: rescale each heavy channel
    // so its mean |value| is heavy_gain times the largest non-heavy one. The
    // tiny relative nudge keeps the >= comparison safe under f32 rounding.
    if (!heavy.empty() && heavy.size() < d) {
        std::vector<double> mean_abs(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                mean_abs[j] += std::abs(static_cast<double>(key[i * d + j]));
            }
        }
        double max_other = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            mean_abs[j] /= static_cast<double>(n);
            if (!is_heavy[j]) {
                max_other = std::max(max_other, mean_abs[j]);
            }
        }
        for (const std::size_t j : heavy) {
            if (mean_abs[j] <= 0.0) {
                continue;
            }
            const double factor = spec.heavy_gain * max_other / mean_abs[j] * (1.0 + 1e-6);
            for (std::size_t i = 0; i < n; ++i) {
                key[i * d + j] = static_cast<float>(key[i * d + j] * factor);
            }
        }
    }

    std::vector<float> value(n * d);
    for (auto& v : value) {
        v = static_cast<float>(rng.next_normal());
    }

    Workload w;
    w.query = Tensor::from_f32({d}, std::move(query));
    w.key = Tensor::from_f32({n, d}, std::move(key));
    w.value = Tensor::from_f32({n, d}, std::move(value));
    w.heavy_channels = heavy;
    w.salient_tokens = salient;
    return w;
}

}  // namespace salca
