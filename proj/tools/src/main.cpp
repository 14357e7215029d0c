// salca: command-line driver for the sparse-attention decode models.
//
// Subcommands:
//   sparsify     run the selection + attention path on tensors or a
//                synthetic workload and report fidelity metrics
//   plan         solve the compute/memory co-design model for a config
//   simulate     run the cycle-approximate pipeline model
//   conflict     Monte Carlo sweep of the channel-conflict rate
//   quant-sweep  ranking fidelity of quantization schemes
//
// Exit codes: 0 success, 2 parameter error, 3 infeasible plan, 4 I/O error.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "salca/attention.hpp"
#include "salca/config_file.hpp"
#include "salca/errors.hpp"
#include "salca/hbm_model.hpp"
#include "salca/metrics.hpp"
#include "salca/perf_model.hpp"
#include "salca/pipeline_sim.hpp"
#include "salca/quantizer.hpp"
#include "salca/rng.hpp"
#include "salca/sparse_select.hpp"
#include "salca/tensor.hpp"
#include "salca/tensor_io.hpp"
#include "salca/workload.hpp"

namespace {

using nlohmann::json;
using namespace salca;
using cli::RunManifest;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
    const char* env = std::getenv("SALCA_SEED");
    if (env == nullptr || *env == '\0') {
        return flag_seed;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
        throw ParamError(std::string("SALCA_SEED is not an integer: ") + env);
    }
    return static_cast<std::uint64_t>(v);
}

Tensor load_f32_matrix(const std::string& path, std::size_t expect_rank) {
    Tensor t = read_tensor(path);
    if (t.rank() != expect_rank) {
        throw ParamError(path + ": expected rank-" + std::to_string(expect_rank) + " tensor");
    }
    std::vector<std::size_t> shape;
    for (std::size_t a = 0; a < t.rank(); ++a) {
        shape.push_back(t.dim(a));
    }
    return Tensor::from_f32(shape, t.widen());
}

// Column gather of the heavy channels, giving the [n, r] core-feature view.
Tensor gather_columns(const Tensor& m, const std::vector<std::size_t>& cols) {
    const std::size_t n = m.dim(0);
    const std::size_t d = m.dim(1);
    const auto data = m.f32();
    std::vector<float> out;
    out.reserve(n * cols.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c : cols) {
            out.push_back(data[i * d + c]);
        }
    }
    return Tensor::from_f32({n, cols.size()}, std::move(out));
}

std::vector<float> dense_scores(std::span<const float> q, const Tensor& keys) {
    const std::size_t n = keys.dim(0);
    const std::size_t d = keys.dim(1);
    const auto data = keys.f32();
    std::vector<float> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            acc += static_cast<double>(q[j]) * static_cast<double>(data[i * d + j]);
        }
        scores[i] = static_cast<float>(acc);
    }
    return scores;
}

json solution_to_json(const PerfSolution& s) {
    json j;
    j["m_pre"] = s.m_pre;
    j["m_att"] = s.m_att;
    j["p_pre"] = s.p_pre;
    j["p_att"] = s.p_att;
    j["h_pre"] = s.h_pre;
    j["h_att"] = s.h_att;
    j["h_pre_exact"] = s.h_pre_exact;
    j["h_att_exact"] = s.h_att_exact;
    j["u_pre"] = s.u_pre;
    j["u_att"] = s.u_att;
    j["r_min"] = s.r_min;
    j["supply_rate"] = s.supply_rate;
    j["bandwidth_used_bits_per_cycle"] = s.bandwidth_used;
    j["bandwidth_available_bits_per_cycle"] = s.bandwidth_available;
    return j;
}

void print_solution_table(const char* label, const PerfSolution& s) {
    std::printf("%s\n", label);
    std::printf("  stage   m_par   p_par   PCs   PCs(exact)   util\n");
    std::printf("  pre   %7zu %7zu %5zu %12.3f %6.3f\n", s.m_pre, s.p_pre, s.h_pre,
                s.h_pre_exact, s.u_pre);
    std::printf("  att   %7zu %7zu %5zu %12.3f %6.3f\n", s.m_att, s.p_att, s.h_att,
                s.h_att_exact, s.u_att);
    std::printf("  r_min %.4f%%   supply %.3f keys/cycle   bandwidth %.0f/%.0f bits/cycle\n",
                s.r_min * 100.0, s.supply_rate, s.bandwidth_used, s.bandwidth_available);
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) {
                out.push_back(cur);
            }
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

PerfConfig perf_config_from_file(const ConfigFile& cf) {
    PerfConfig cfg;
    cfg.d = static_cast<std::size_t>(cf.get_uint("d", cfg.d));
    cfg.chn = static_cast<std::size_t>(cf.get_uint("chn", cfg.chn));
    cfg.bw = static_cast<std::size_t>(cf.get_uint("bw", cfg.bw));
    cfg.s_f = cf.get_double("s_f", cfg.s_f);
    cfg.s_q = cf.get_double("s_q", cfg.s_q);
    cfg.alpha = cf.get_double("alpha", cfg.alpha);
    cfg.beta_pre = cf.get_double("beta_pre", cfg.beta_pre);
    cfg.beta_att = cf.get_double("beta_att", cfg.beta_att);
    cfg.f_cmp = cf.get_double("f_cmp", cfg.f_cmp);
    cfg.f_hbm = cf.get_double("f_hbm", cfg.f_hbm);
    return cfg;
}

PipelineConfig pipeline_config_from_file(const ConfigFile& cf, std::uint64_t seed) {
    PipelineConfig cfg;
    cfg.d = static_cast<std::size_t>(cf.get_uint("d", cfg.d));
    cfg.m_pre = static_cast<std::size_t>(cf.get_uint("m_pre", cfg.m_pre));
    cfg.m_att = static_cast<std::size_t>(cf.get_uint("m_att", cfg.m_att));
    cfg.p_pre = static_cast<std::size_t>(cf.get_uint("p_pre", cfg.p_pre));
    cfg.p_att = static_cast<std::size_t>(cf.get_uint("p_att", cfg.p_att));
    cfg.f_cmp = cf.get_double("f_cmp", cfg.f_cmp);
    cfg.topk_parallelism =
        static_cast<std::size_t>(cf.get_uint("topk_parallelism", cfg.topk_parallelism));
    cfg.pool_window = static_cast<std::size_t>(cf.get_uint("pool_window", cfg.pool_window));
    cfg.banks = static_cast<std::size_t>(cf.get_uint("banks", cfg.banks));
    cfg.bank_width = static_cast<std::size_t>(cf.get_uint("bank_width", cfg.bank_width));
    cfg.heads = static_cast<std::size_t>(cf.get_uint("heads", cfg.heads));
    cfg.index_buffer_depth =
        static_cast<std::size_t>(cf.get_uint("index_buffer_depth", cfg.index_buffer_depth));
    cfg.fill_per_stage =
        static_cast<std::size_t>(cf.get_uint("fill_per_stage", cfg.fill_per_stage));
    cfg.sram_writeback_latency = static_cast<std::size_t>(
        cf.get_uint("sram_writeback_latency", cfg.sram_writeback_latency));
    cfg.distribution = distribution_from_name(cf.get_string("distribution", "clustered"));
    cfg.cluster_run = cf.get_double("cluster_run", cfg.cluster_run);
    cfg.seed = seed;
    cfg.hbm.pc_count = static_cast<std::size_t>(cf.get_uint("pc_count", cfg.hbm.pc_count));
    cfg.hbm.pc_bits_per_cycle =
        static_cast<std::size_t>(cf.get_uint("pc_bits_per_cycle", cfg.hbm.pc_bits_per_cycle));
    cfg.hbm.f_hbm = cf.get_double("f_hbm", cfg.hbm.f_hbm);
    cfg.hbm.kv_pc_count =
        static_cast<std::size_t>(cf.get_uint("kv_pc_count", cfg.hbm.kv_pc_count));
    cfg.hbm.reorder_range =
        static_cast<std::size_t>(cf.get_uint("reorder_range", cfg.hbm.reorder_range));
    cfg.hbm.beta_pre = cf.get_double("beta_pre", cfg.hbm.beta_pre);
    cfg.hbm.beta_att = cf.get_double("beta_att", cfg.hbm.beta_att);
    return cfg;
}

void snapshot_config(RunManifest& manifest, const ConfigFile& cf) {
    for (const auto& [k, v] : cf.entries()) {
        manifest.config.emplace_back(k, v);
    }
}

// ---------------------------------------------------------------------------

int cmd_sparsify(const std::string& query_path, const std::string& keys_path,
                 const std::string& values_path, std::size_t n, std::size_t d,
                 std::size_t heavy_count, double heavy_gain, double s_f, std::size_t k_flag,
                 double retention, bool no_pool, std::size_t pool, bool exact,
                 std::uint64_t seed, const std::string& out_prefix) {
    const bool from_files = !keys_path.empty();
    if (from_files && (query_path.empty() || values_path.empty())) {
        throw ParamError("sparsify: query, keys and values files must be given together");
    }
    if (pool % 2 == 0) {
        throw ParamError("sparsify: pool window must be odd");
    }

    RunManifest manifest;
    manifest.subcommand = "sparsify";
    manifest.seed = seed;

    Tensor query, keys, values;
    if (from_files) {
        query = load_f32_matrix(query_path, 1);
        keys = load_f32_matrix(keys_path, 2);
        values = load_f32_matrix(values_path, 2);
        manifest.input_digests.emplace_back(query_path, cli::file_digest(query_path));
        manifest.input_digests.emplace_back(keys_path, cli::file_digest(keys_path));
        manifest.input_digests.emplace_back(values_path, cli::file_digest(values_path));
        if (keys.dim(1) != query.dim(0) || values.dim(0) != keys.dim(0) ||
            values.dim(1) != keys.dim(1)) {
            throw ParamError("sparsify: tensor shapes are inconsistent");
        }
    } else {
        SyntheticSpec spec;
        spec.n = n;
        spec.d = d;
        spec.heavy_count = heavy_count;
        spec.heavy_gain = heavy_gain;
        spec.seed = seed;
        Workload w = generate_workload(spec);
        query = std::move(w.query);
        keys = std::move(w.key);
        values = std::move(w.value);
    }
    const std::size_t seq = keys.dim(0);

    std::size_t k_target = k_flag;
    if (k_target == 0) {
        k_target = retention_to_k(retention, seq);
    }
    if (k_target > seq) {
        throw ParamError("sparsify: k exceeds sequence length");
    }

    manifest.config.emplace_back("source", from_files ? "files" : "synthetic");
    manifest.config.emplace_back("n", std::to_string(seq));
    manifest.config.emplace_back("d", std::to_string(keys.dim(1)));
    manifest.config.emplace_back("s_f", format_double(s_f));
    manifest.config.emplace_back("k_target", std::to_string(k_target));
    manifest.config.emplace_back("pool", no_pool ? "off" : std::to_string(pool));
    manifest.config.emplace_back("exact", exact ? "true" : "false");

    const HeavyChannelSet heavy = find_heavy_channels(keys, s_f);
    const Tensor key_core = gather_columns(keys, heavy.indices);
    const auto q_full = query.f32();
    std::vector<float> q_core;
    q_core.reserve(heavy.r());
    for (std::size_t c : heavy.indices) {
        q_core.push_back(q_full[c]);
    }

    json selection_json;
    std::vector<std::size_t> selected;
    if (exact) {
        const std::vector<float> core_scores = dense_scores(q_core, key_core);
        selected = exact_topk(core_scores, k_target);
        std::sort(selected.begin(), selected.end());
        selection_json["mode"] = "exact";
        selection_json["selected"] = selected.size();
        selection_json["k_target"] = k_target;
    } else {
        const QuantizedKeyCore qkeys = quant_key_2bit_asym(key_core);
        const QuantizedQuery qquery = quant_query_3bit_sym(q_core);
        const std::vector<float> est = estimate_relevance(qquery, qkeys);
        const Int8Scores codes = quant_scores_int8(est);
        std::vector<std::uint8_t> pooled(codes.codes.begin(), codes.codes.end());
        if (!no_pool) {
            pooled = maxpool_stride1(pooled, pool);
        }
        SelectionResult sel = histogram_topk(pooled, k_target);

        bool superset_ok = sel.indices.size() >= sel.k_target;
        std::size_t above = 0;
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            if (pooled[i] >= sel.threshold) {
                ++above;
            }
        }
        superset_ok = superset_ok && above == sel.indices.size();

        selection_json["mode"] = "histogram";
        selection_json["selected"] = sel.indices.size();
        selection_json["k_target"] = sel.k_target;
        selection_json["threshold"] = sel.threshold;
        selection_json["excess"] = sel.excess;
        selection_json["data_passes"] = sel.data_passes;
        selection_json["superset_check"] = superset_ok ? "pass" : "fail";
        selected = std::move(sel.indices);
    }

    // Fidelity against the full-precision dense ranking.
    const std::vector<float> base = dense_scores(q_full, keys);
    const auto base_top = exact_topk(base, k_target);
    const double overlap = index_overlap(selected, base_top);
    const std::size_t half_k = std::max<std::size_t>(1, k_target / 2);
    const auto base_half = exact_topk(base, half_k);
    const double coverage = index_overlap(selected, base_half);

    const QuantizedRows k_rows = quant_rows_int8(keys);
    const QuantizedRows v_rows = quant_rows_int8(values);
    const QuantizedRows gk = gather(k_rows, selected);
    const QuantizedRows gv = gather(v_rows, selected);
    const AttentionOutput att = attention(q_full, gk, gv);

    const std::string report_path = out_prefix + ".json";
    const std::string tensor_path = out_prefix + ".out.t";
    manifest.outputs = {report_path, tensor_path};

    write_tensor(tensor_path, Tensor::from_f32({att.out.size()}, att.out));

    json body;
    body["selection"] = selection_json;
    body["metrics"] = {{"overlap", overlap},
                       {"coverage_top_half", coverage},
                       {"heavy_channels", heavy.r()}};
    body["attention"] = {{"qk_max", att.qk_max}, {"denom", att.denom}};
    cli::write_report(report_path, manifest, std::move(body));

    std::printf("sparsify: selected %zu of %zu tokens, overlap %.4f, coverage %.4f\n",
                selected.size(), seq, overlap, coverage);
    return 0;
}

int cmd_plan(const std::string& config_path, std::optional<std::size_t> p_pre,
             std::optional<std::size_t> p_att, const std::string& out_path,
             std::uint64_t seed) {
    const ConfigFile cf = ConfigFile::parse_file(config_path);
    const PerfConfig cfg = perf_config_from_file(cf);

    RunManifest manifest;
    manifest.subcommand = "plan";
    manifest.seed = seed;
    snapshot_config(manifest, cf);
    manifest.input_digests.emplace_back(config_path, cli::file_digest(config_path));
    manifest.outputs = {out_path};

    if (p_pre.has_value() != p_att.has_value()) {
        throw ParamError("plan: --p-pre and --p-att must be given together");
    }

    const PerfSolution frontier = solve(cfg);
    print_solution_table("frontier", frontier);

    json body;
    body["frontier"] = solution_to_json(frontier);
    if (p_pre.has_value()) {
        const PerfSolution refined = refine(frontier, *p_pre, *p_att, cfg);
        print_solution_table("refined", refined);
        body["refined"] = solution_to_json(refined);
    }
    cli::write_report(out_path, manifest, std::move(body));
    return 0;
}

int cmd_simulate(const std::string& config_path, std::size_t n, double retention,
                 const std::string& out_path, std::uint64_t seed) {
    const ConfigFile cf = ConfigFile::parse_file(config_path);
    PipelineConfig cfg = pipeline_config_from_file(cf, seed);
    double r_q = retention;
    if (r_q <= 0.0) {
        r_q = 1.0 - cf.get_double("s_q", 0.95);
    }

    RunManifest manifest;
    manifest.subcommand = "simulate";
    manifest.seed = seed;
    snapshot_config(manifest, cf);
    manifest.config.emplace_back("n", std::to_string(n));
    manifest.config.emplace_back("retention", format_double(r_q));
    manifest.input_digests.emplace_back(config_path, cli::file_digest(config_path));
    manifest.outputs = {out_path};

    const DecodeStepTrace trace = simulate_decode_step(n, r_q, cfg);

    json stages = json::array();
    for (const auto& st : trace.stages) {
        stages.push_back({{"name", st.name},
                          {"busy_cycles", st.busy_cycles},
                          {"stall_cycles", st.stall_cycles},
                          {"items", st.items}});
    }
    json body;
    body["stages"] = stages;
    body["total_cycles"] = trace.total_cycles;
    body["head0_latency"] = trace.head0_latency;
    body["steady_cycles_per_head"] = trace.steady_cycles_per_head;
    body["measured_alpha"] = trace.measured_alpha;
    body["t_pre_cycles_per_head"] = trace.t_pre_cycles_per_head;
    body["t_att_cycles_per_head"] = trace.t_att_cycles_per_head;
    body["analytic_total"] = trace.analytic_total;
    body["tokens_per_sec"] = trace.tokens_per_sec;
    body["selected_tokens"] = trace.selected_tokens;
    body["windows"] = trace.windows;
    body["scan_cycles"] = trace.scan_cycles;
    body["max_buffer_tokens"] = trace.max_buffer_tokens;
    body["heads"] = trace.heads;
    body["n"] = trace.n;
    body["r_q"] = trace.r_q;
    cli::write_report(out_path, manifest, std::move(body));

    std::printf("simulate: n=%zu r_q=%.4f total %llu cycles, %.1f tokens/s, alpha %.3f\n",
                trace.n, trace.r_q, static_cast<unsigned long long>(trace.total_cycles),
                trace.tokens_per_sec, trace.measured_alpha);
    return 0;
}

int cmd_conflict(const std::string& ranges_csv, std::size_t windows,
                 const std::string& distribution, double cluster_run, std::uint64_t seed,
                 const std::string& out_path) {
    const auto range_tokens = split_csv(ranges_csv);
    if (range_tokens.empty()) {
        throw ParamError("conflict: empty range list");
    }
    if (windows == 0) {
        throw ParamError("conflict: window count must be positive");
    }
    const IndexDistribution dist = distribution_from_name(distribution);

    RunManifest manifest;
    manifest.subcommand = "conflict";
    manifest.seed = seed;
    manifest.config.emplace_back("ranges", ranges_csv);
    manifest.config.emplace_back("windows", std::to_string(windows));
    manifest.config.emplace_back("distribution", distribution);
    manifest.config.emplace_back("cluster_run", format_double(cluster_run));
    manifest.outputs = {out_path};

    std::string csv = "# manifest " + manifest.to_json().dump() + "\n";
    csv += "reorder_range,mean_rate,p95_rate,windows\n";

    Rng rng(seed);
    std::vector<double> rates(windows);
    for (const std::string& tok : range_tokens) {
        const std::size_t range = static_cast<std::size_t>(std::stoull(tok));
        HbmConfig cfg;
        cfg.reorder_range = range;
        cfg.validate();
        double sum = 0.0;
        for (std::size_t w = 0; w < windows; ++w) {
            const auto window = make_index_window(rng, range, dist, cluster_run);
            rates[w] = window_conflict_rate(window, cfg);
            sum += rates[w];
        }
        std::sort(rates.begin(), rates.end());
        const double mean = sum / static_cast<double>(windows);
        const double p95 = rates[std::min(windows - 1, static_cast<std::size_t>(
                                                           std::ceil(0.95 * windows)) - 1)];
        csv += std::to_string(range) + "," + format_double(mean) + "," + format_double(p95) +
               "," + std::to_string(windows) + "\n";
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open report for writing: " + out_path);
    }
    out << csv;
    if (!out) {
        throw IoError("write failure on report: " + out_path);
    }
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_quant_sweep(const std::string& schemes_csv, const std::string& metric,
                    const std::string& keys_path, const std::string& query_path,
                    std::size_t trials, std::size_t n, std::size_t d, double s_f,
                    double retention, std::uint64_t seed, const std::string& out_path) {
    const auto scheme_names = split_csv(schemes_csv);
    if (scheme_names.empty()) {
        throw ParamError("quant-sweep: empty scheme list");
    }
    if (metric != "overlap" && metric != "coverage") {
        throw ParamError("quant-sweep: metric must be overlap or coverage");
    }
    std::vector<QuantScheme> schemes;
    for (const auto& name : scheme_names) {
        schemes.push_back(scheme_from_name(name));
    }
    const bool from_files = !keys_path.empty();
    if (from_files && query_path.empty()) {
        throw ParamError("quant-sweep: a query tensor is required with a keys tensor");
    }
    if (trials == 0) {
        throw ParamError("quant-sweep: trials must be positive");
    }
    if (from_files) {
        trials = 1;
    }

    RunManifest manifest;
    manifest.subcommand = "quant-sweep";
    manifest.seed = seed;
    manifest.config.emplace_back("schemes", schemes_csv);
    manifest.config.emplace_back("metric", metric);
    manifest.config.emplace_back("trials", std::to_string(trials));
    manifest.config.emplace_back("retention", format_double(retention));
    manifest.config.emplace_back("s_f", format_double(s_f));
    if (from_files) {
        manifest.input_digests.emplace_back(keys_path, cli::file_digest(keys_path));
        manifest.input_digests.emplace_back(query_path, cli::file_digest(query_path));
    } else {
        manifest.config.emplace_back("n", std::to_string(n));
        manifest.config.emplace_back("d", std::to_string(d));
    }
    manifest.outputs = {out_path};

    // Per-trial core features and full-precision baseline ranking.
    struct Trial {
        Tensor key_core;
        std::vector<float> q_core;
        std::vector<float> base_scores;
        std::size_t k = 0;
    };
    std::vector<Trial> prepared(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Tensor keys, query;
        if (from_files) {
            keys = load_f32_matrix(keys_path, 2);
            query = load_f32_matrix(query_path, 1);
            if (keys.dim(1) != query.dim(0)) {
                throw ParamError("quant-sweep: query length does not match key width");
            }
        } else {
            SyntheticSpec spec;
            spec.n = n;
            spec.d = d;
            spec.seed = seed + t;
            Workload w = generate_workload(spec);
            keys = std::move(w.key);
            query = std::move(w.query);
        }
        const HeavyChannelSet heavy = find_heavy_channels(keys, s_f);
        Trial& trial = prepared[t];
        trial.key_core = gather_columns(keys, heavy.indices);
        const auto qf = query.f32();
        for (std::size_t c : heavy.indices) {
            trial.q_core.push_back(qf[c]);
        }
        trial.base_scores = dense_scores(trial.q_core, trial.key_core);
        trial.k = retention_to_k(retention, keys.dim(0));
    }

    std::string csv = "# manifest " + manifest.to_json().dump() + "\n";
    csv += "scheme," + metric + "_mean," + metric + "_min,trials\n";

    for (const QuantScheme& scheme : schemes) {
        double sum = 0.0;
        double min_v = 1.0;
        for (const Trial& trial : prepared) {
            Tensor kq = trial.key_core;
            std::vector<float> qq = trial.q_core;
            if (scheme.target == QuantScheme::Target::key) {
                kq = apply_scheme(trial.key_core, scheme);
            } else {
                const Tensor q_round = apply_scheme(
                    Tensor::from_f32({trial.q_core.size()}, trial.q_core), scheme);
                const auto qs = q_round.f32();
                qq.assign(qs.begin(), qs.end());
            }
            const std::vector<float> approx = dense_scores(qq, kq);

            double value = 0.0;
            if (metric == "overlap") {
                value = topk_overlap(approx, trial.base_scores, trial.k);
            } else {
                const std::size_t half = std::max<std::size_t>(1, trial.k / 2);
                value = index_overlap(exact_topk(approx, trial.k),
                                      exact_topk(trial.base_scores, half));
            }
            sum += value;
            min_v = std::min(min_v, value);
        }
        const double mean = sum / static_cast<double>(trials);
        csv += scheme_name(scheme) + "," + format_double(mean) + "," + format_double(min_v) +
               "," + std::to_string(trials) + "\n";
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open report for writing: " + out_path);
    }
    out << csv;
    if (!out) {
        throw IoError("write failure on report: " + out_path);
    }
    std::fputs(csv.c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse-attention decode models: selection, planning, simulation"};
    app.require_subcommand(1);

    // sparsify
    auto* sp = app.add_subcommand("sparsify", "run selection + attention and report fidelity");
    std::string sp_query, sp_keys, sp_values, sp_out = "sparsify";
    std::size_t sp_n = 10240, sp_d = 128, sp_heavy = 32, sp_k = 0, sp_pool = 7;
    double sp_gain = 10.0, sp_sf = 0.5, sp_retention = 0.1;
    bool sp_nopool = false, sp_exact = false;
    std::uint64_t sp_seed = 1;
    sp->add_option("--query", sp_query, "query tensor file");
    sp->add_option("--keys", sp_keys, "key tensor file");
    sp->add_option("--values", sp_values, "value tensor file");
    sp->add_option("--n", sp_n, "synthetic sequence length");
    sp->add_option("--d", sp_d, "synthetic feature dimension");
    sp->add_option("--heavy-count", sp_heavy, "synthetic heavy channel count");
    sp->add_option("--heavy-gain", sp_gain, "synthetic heavy channel gain");
    sp->add_option("--sf", sp_sf, "feature sparsity for the relevance estimate");
    sp->add_option("--k", sp_k, "selection size (overrides --retention)");
    sp->add_option("--retention", sp_retention, "selection size as a fraction");
    sp->add_option("--pool", sp_pool, "maxpool window (odd)");
    sp->add_flag("--no-pool", sp_nopool, "disable maxpool widening");
    sp->add_flag("--exact", sp_exact, "full-precision exact top-k selection");
    sp->add_option("--seed", sp_seed, "random seed");
    sp->add_option("--out", sp_out, "output path prefix");

    // plan
    auto* pl = app.add_subcommand("plan", "solve the co-design model");
    std::string pl_config, pl_out = "plan.json";
    std::size_t pl_ppre = 0, pl_patt = 0;
    std::uint64_t pl_seed = 1;
    pl->add_option("--config", pl_config, "key=value config file")->required();
    pl->add_option("--p-pre", pl_ppre, "override pre-compute width");
    pl->add_option("--p-att", pl_patt, "override attention width");
    pl->add_option("--out", pl_out, "report path");
    pl->add_option("--seed", pl_seed, "random seed");

    // simulate
    auto* si = app.add_subcommand("simulate", "run the pipeline model");
    std::string si_config, si_out = "sim.json";
    std::size_t si_n = 65536;
    double si_retention = 0.0;
    std::uint64_t si_seed = 1;
    si->add_option("--config", si_config, "key=value config file")->required();
    si->add_option("--n", si_n, "sequence length");
    si->add_option("--retention", si_retention, "retained token fraction");
    si->add_option("--out", si_out, "report path");
    si->add_option("--seed", si_seed, "random seed");

    // conflict
    auto* cf = app.add_subcommand("conflict", "channel-conflict Monte Carlo sweep");
    std::string cf_ranges = "8,16,32,64,128,256", cf_dist = "clustered",
                cf_out = "conflict.csv";
    std::size_t cf_windows = 100000;
    double cf_run = 4.0;
    std::uint64_t cf_seed = 1;
    cf->add_option("--ranges", cf_ranges, "comma-separated reorder ranges");
    cf->add_option("--windows", cf_windows, "windows per range");
    cf->add_option("--distribution", cf_dist, "uniform, clustered or consecutive");
    cf->add_option("--cluster-run", cf_run, "mean run length for clustered");
    cf->add_option("--seed", cf_seed, "random seed");
    cf->add_option("--out", cf_out, "CSV path");

    // quant-sweep
    auto* qs = app.add_subcommand("quant-sweep", "ranking fidelity per quantization scheme");
    std::string qs_schemes = "full,k_4_asy,k_2_asy,k_2_sym,k_msb2_asy,k_msb3_sym,k_1,q_4_sym,q_3_sym,q_2_sym";
    std::string qs_metric = "overlap", qs_keys, qs_query, qs_out = "quant_sweep.csv";
    std::size_t qs_trials = 20, qs_n = 4096, qs_d = 128;
    double qs_sf = 0.5, qs_retention = 0.1;
    std::uint64_t qs_seed = 1;
    qs->add_option("--schemes", qs_schemes, "comma-separated scheme names");
    qs->add_option("--metric", qs_metric, "overlap or coverage");
    qs->add_option("--keys", qs_keys, "key tensor file (default synthetic)");
    qs->add_option("--query", qs_query, "query tensor file");
    qs->add_option("--trials", qs_trials, "synthetic trials");
    qs->add_option("--n", qs_n, "synthetic sequence length");
    qs->add_option("--d", qs_d, "synthetic feature dimension");
    qs->add_option("--sf", qs_sf, "feature sparsity");
    qs->add_option("--retention", qs_retention, "baseline top fraction");
    qs->add_option("--seed", qs_seed, "random seed");
    qs->add_option("--out", qs_out, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sp->parsed()) {
            return cmd_sparsify(sp_query, sp_keys, sp_values, sp_n, sp_d, sp_heavy, sp_gain,
                                sp_sf, sp_k, sp_retention, sp_nopool, sp_pool, sp_exact,
                                resolve_seed(sp_seed), sp_out);
        }
        if (pl->parsed()) {
            std::optional<std::size_t> ppre, patt;
            if (pl->count("--p-pre") > 0) {
                ppre = pl_ppre;
            }
            if (pl->count("--p-att") > 0) {
                patt = pl_patt;
            }
            return cmd_plan(pl_config, ppre, patt, pl_out, resolve_seed(pl_seed));
        }
        if (si->parsed()) {
            return cmd_simulate(si_config, si_n, si_retention, si_out, resolve_seed(si_seed));
        }
        if (cf->parsed()) {
            return cmd_conflict(cf_ranges, cf_windows, cf_dist, cf_run, resolve_seed(cf_seed),
                                cf_out);
        }
        if (qs->parsed()) {
            return cmd_quant_sweep(qs_schemes, qs_metric, qs_keys, qs_query, qs_trials, qs_n,
                                   qs_d, qs_sf, qs_retention, resolve_seed(qs_seed), qs_out);
        }
        throw ParamError("no subcommand selected");
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
