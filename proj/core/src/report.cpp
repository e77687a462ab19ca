#include "scrn/report.hpp"

#include <algorithm>
#include <charconv>
#include <ctime>
#include <system_error>

#include <json.hpp>

namespace scrn {

namespace {

using json = nlohmann::ordered_json;

// shortest round-trip decimal, matching the JSON encoder's determinism
std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json js_state(const state& x) {
    json a = json::array();
    for (auto c : x) a.push_back(c);
    return a;
}

json js_states(const std::vector<state>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(js_state(x));
    return a;
}

json js_matrix(const std::vector<std::vector<std::int64_t>>& rows) {
    json a = json::array();
    for (const auto& r : rows) {
        json row = json::array();
        for (auto v : r) row.push_back(v);
        a.push_back(row);
    }
    return a;
}

json js_manifest(const run_manifest& m) {
    json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["command"] = m.command;
    j["arguments"] = m.arguments;
    j["seed"] = m.seed;
    j["threads"] = m.threads;
    json inputs = json::array();
    for (const auto& [path, digest] : m.input_digests)
        inputs.push_back(json{{"path", path}, {"fnv1a64", digest}});
    j["inputs"] = std::move(inputs);
    if (!m.timestamp.empty()) j["timestamp"] = m.timestamp;
    return j;
}

json js_estimate(const mfpt_estimate& e) {
    json j;
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["n_samples"] = e.n_samples;
    j["n_censored"] = e.n_censored;
    return j;
}

std::string finish(json j) { return j.dump(2) + "\n"; }

const char* mode_name(coupling_mode m) {
    return m == coupling_mode::per_index ? "per_index" : "grouped";
}

const char* record_name(record_policy r) {
    return r == record_policy::accepted_jumps_only ? "accepted" : "potential";
}

const char* direction_name(set_direction d) {
    switch (d) {
        case set_direction::automatic: return "automatic";
        case set_direction::increasing: return "increasing";
        case set_direction::decreasing: return "decreasing";
    }
    return "unknown";
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[std::size_t(i)] = digits[h & 0xf];
    return out;
}

std::string iso8601_utc(std::int64_t unix_seconds) {
    std::time_t t = unix_seconds;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void coupled_batch_summary::add(std::int64_t replicate, const coupled_run& run) {
    ++replicates;
    if (run.ordered_throughout) {
        ++ordered_throughout;
    } else if (run.first_violation_time.has_value() &&
               (!first_violation_time.has_value() ||
                *run.first_violation_time < *first_violation_time)) {
        first_violation_time = run.first_violation_time;
        first_violation_replicate = replicate;
    }
    switch (run.base.terminal) {
        case terminal_status::reached_horizon: ++reached_horizon; break;
        case terminal_status::exited_truncation: ++exited_truncation; break;
        case terminal_status::hit_target: ++hit_target; break;
    }
    potential_jumps += run.potential_jumps;
    accepted_base += run.accepted_base;
    accepted_variant += run.accepted_variant;
    lambda_max = std::max(lambda_max, run.lambda_final);
    box_expansions += run.expansions;
}

std::string condition_document(const condition_report& report, const run_manifest& manifest) {
    json j;
    j["manifest"] = js_manifest(manifest);
    j["condition"] = condition_kind_name(report.kind);
    j["pass"] = report.pass;
    j["states"] = report.states;
    j["pairs_checked"] = report.pairs_checked;
    j["comparisons"] = report.comparisons;
    j["equality_flags"] = report.equality_flags;
    j["tolerance"] = json{{"rel", report.tolerance.rel}, {"abs", report.tolerance.abs}};
    if (report.truncation) j["truncation"] = *report.truncation;
    if (report.witness) {
        const auto& w = *report.witness;
        json wj;
        wj["x"] = js_state(w.x);
        wj["y"] = js_state(w.y);
        if (w.row) wj["row"] = *w.row;
        if (w.net_index) wj["net_index"] = *w.net_index;
        if (w.block) wj["block"] = *w.block;
        wj["relation"] = w.relation;
        wj["lhs"] = w.lhs;
        wj["rhs"] = w.rhs;
        j["witness"] = std::move(wj);
    }
    if (report.failure_note) j["failure_note"] = *report.failure_note;
    return finish(std::move(j));
}

std::string simulate_document(const coupled_batch_summary& batch, const simulate_context& ctx,
                              const run_manifest& manifest) {
    json j;
    j["manifest"] = js_manifest(manifest);
    j["horizon"] = ctx.horizon;
    j["mode"] = mode_name(ctx.mode);
    j["record"] = record_name(ctx.record);
    j["replicates"] = batch.replicates;
    j["ordered_throughout"] = batch.ordered_throughout;
    j["ordered_fraction"] =
        batch.replicates > 0 ? double(batch.ordered_throughout) / double(batch.replicates) : 0.0;
    if (batch.first_violation_time) {
        j["first_violation"] = json{{"replicate", *batch.first_violation_replicate},
                                    {"time", *batch.first_violation_time}};
    }
    j["terminals"] = json{{"reached_horizon", batch.reached_horizon},
                          {"exited_truncation", batch.exited_truncation},
                          {"hit_target", batch.hit_target}};
    j["counters"] = json{{"potential_jumps", batch.potential_jumps},
                         {"accepted_base", batch.accepted_base},
                         {"accepted_variant", batch.accepted_variant},
                         {"box_expansions", batch.box_expansions}};
    j["lambda_max"] = batch.lambda_max;
    if (ctx.paths_file) j["paths_file"] = *ctx.paths_file;
    return finish(std::move(j));
}

std::string mfpt_document(const mfpt_estimate& estimate, const mfpt_context& ctx,
                          const run_manifest& manifest) {
    json j;
    j["manifest"] = js_manifest(manifest);
    j["target"] = ctx.target;
    j["horizon"] = ctx.horizon;
    j["replicates"] = ctx.replicates;
    j["estimate"] = js_estimate(estimate);
    return finish(std::move(j));
}

std::string mfpt_compare_document(const mfpt_compare_report& report, const mfpt_context& ctx,
                                  const run_manifest& manifest) {
    json j;
    j["manifest"] = js_manifest(manifest);
    j["target"] = ctx.target;
    j["horizon"] = ctx.horizon;
    j["replicates"] = report.n;
    j["direction"] = direction_name(report.direction);
    j["base"] = js_estimate(report.base);
    j["variant"] = js_estimate(report.variant);
    j["pathwise"] = json{{"ok", report.pathwise_ok},
                         {"violations", report.pathwise_violations},
                         {"both_hit", report.n_both_hit}};
    j["paired"] =
        json{{"mean_diff", report.paired_mean_diff}, {"std_error", report.paired_std_error}};
    j["cdf"] = json{{"dominates", report.cdf.dominates},
                    {"max_violation", report.cdf.max_violation}};
    return finish(std::move(j));
}

std::string stationary_document(const distribution_table& dist, const stationary_context& ctx,
                                const run_manifest& manifest) {
    json j;
    j["manifest"] = js_manifest(manifest);
    if (ctx.total_time > 0) {
        j["burn_in"] = ctx.burn_in;
        j["total_time"] = ctx.total_time;
    }
    j["states"] = dist.support.size();
    if (!ctx.set_masses.empty()) {
        json m;
        for (const auto& [name, mass] : ctx.set_masses) m[name] = mass;
        j["set_masses"] = std::move(m);
    }
    if (ctx.tv_distance) {
        json tv;
        if (ctx.tv_against) tv["against"] = *ctx.tv_against;
        tv["value"] = *ctx.tv_distance;
        j["tv_distance"] = std::move(tv);
    }
    if (dist.support.size() <= ctx.inline_limit) {
        json rows = json::array();
        for (std::size_t i = 0; i < dist.support.size(); ++i)
            rows.push_back(json{{"state", js_state(dist.support[i])}, {"mass", dist.mass[i]}});
        j["support"] = std::move(rows);
    }
    if (ctx.csv_file) j["csv_file"] = *ctx.csv_file;
    return finish(std::move(j));
}

std::string drift_document(const drift_report& report, const lyapunov_spec& spec,
                           const run_manifest& manifest) {
    json j;
    j["manifest"] = js_manifest(manifest);
    j["v"] = spec.v_text;
    j["mode"] =
        report.mode == drift_mode::exponential ? "exponential" : "negative_outside_set";
    j["pass"] = report.pass;
    j["states"] = report.states;
    j["truncation"] = report.truncation;
    if (report.mode == drift_mode::exponential) {
        j["bound"] = json{{"c_prime", report.c_prime}, {"d_prime", report.d_prime}};
    } else {
        json b;
        b["c"] = report.c;
        b["d"] = report.d;
        b["set_size"] = report.set_c.size();
        b["set_interior"] = report.set_interior;
        if (report.set_c.size() <= 200) b["set"] = js_states(report.set_c);
        j["bound"] = std::move(b);
    }
    if (report.worst_state) {
        j["worst"] = json{{"state", js_state(*report.worst_state)},
                          {"margin", report.worst_margin}};
    }
    if (report.note) j["note"] = *report.note;
    return finish(std::move(j));
}

std::string demo_document(const example_bundle& bundle, const std::vector<std::string>& files,
                          const run_manifest& manifest) {
    json j;
    j["manifest"] = js_manifest(manifest);
    j["id"] = bundle.id;
    j["summary"] = bundle.summary;
    j["species"] = bundle.net.species();
    json params;
    for (const auto& [name, value] : bundle.params) params[name] = value;
    j["params"] = std::move(params);
    j["defaulted"] = bundle.defaulted;
    json orders;
    for (const auto& [name, order] : bundle.orders) orders[name] = js_matrix(order.matrix());
    j["orders"] = std::move(orders);
    if (!bundle.partitions.empty()) {
        json parts;
        for (const auto& [name, partition] : bundle.partitions) {
            json blocks = json::array();
            for (const auto& block : partition.blocks) blocks.push_back(block);
            parts[name] = std::move(blocks);
        }
        j["partitions"] = std::move(parts);
    }
    json states;
    for (const auto& [name, x] : bundle.states) states[name] = js_state(x);
    j["states"] = std::move(states);
    if (!bundle.targets.empty()) {
        json targets;
        for (const auto& [name, text] : bundle.targets) targets[name] = text;
        j["targets"] = std::move(targets);
    }
    j["variant_param"] = bundle.variant_param;
    j["variant_note"] = bundle.variant_note;
    if (!files.empty()) j["files"] = files;
    return finish(std::move(j));
}

std::string paths_csv_header(int dim) {
    std::string line = "replicate,chain,time";
    for (int i = 1; i <= dim; ++i) line += ",x" + std::to_string(i);
    return line + "\n";
}

void append_path_csv(std::ostream& out, std::int64_t replicate, const std::string& chain,
                     const sample_path& path) {
    for (const auto& [t, x] : path.events) {
        out << replicate << ',' << chain << ',' << fmt_double(t);
        for (auto c : x) out << ',' << c;
        out << '\n';
    }
}

std::string distribution_csv_header(int dim) {
    std::string line;
    for (int i = 1; i <= dim; ++i) {
        if (!line.empty()) line += ',';
        line += "x" + std::to_string(i);
    }
    return line + ",mass\n";
}

void append_distribution_csv(std::ostream& out, const distribution_table& dist) {
    for (std::size_t i = 0; i < dist.support.size(); ++i) {
        for (auto c : dist.support[i]) out << c << ',';
        out << fmt_double(dist.mass[i]) << '\n';
    }
}

}  // namespace scrn
