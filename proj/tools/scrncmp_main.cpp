#include <array>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scrn/analysis.hpp"
#include "scrn/bundles.hpp"
#include "scrn/conditions.hpp"
#include "scrn/coupling.hpp"
#include "scrn/errors.hpp"
#include "scrn/model_io.hpp"
#include "scrn/order.hpp"
#include "scrn/report.hpp"

namespace {

using namespace scrn;
namespace fs = std::filesystem;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;   // condition failed or an ordering violation was seen
constexpr int exit_usage = 2;  // bad input, bad flags, unmet preconditions

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot read '" + path + "'");
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << body;
}

// reads inputs while collecting the digests the manifest reports
struct input_tracker {
    std::vector<std::pair<std::string, std::string>> digests;

    std::string read(const std::string& path) {
        std::string body = read_file(path);
        digests.emplace_back(path, fnv1a64_hex(body));
        return body;
    }
};

run_manifest make_run_manifest(std::string command, const std::vector<std::string>& args,
                               std::uint64_t seed, int threads, const input_tracker& inputs) {
    run_manifest m;
    m.command = std::move(command);
    m.arguments = args;
    m.seed = seed;
    m.threads = threads;
    m.input_digests = inputs.digests;
    m.timestamp = iso8601_utc(std::int64_t(std::time(nullptr)));
    return m;
}

void emit(const std::string& doc, const std::string& report_file) {
    std::cout << doc;
    if (!report_file.empty()) write_file(report_file, doc);
}

std::uint64_t env_seed() {
    const char* text = std::getenv("SCRN_SEED");
    if (!text || !*text) return 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(text, &end, 10);
    if (end == text || *end != '\0')
        throw validation_error("SCRN_SEED must be a nonnegative integer");
    return std::uint64_t(v);
}

int default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : int(n);
}

state parse_state_text(const std::string& text, int dim) {
    state x;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos)
            throw validation_error("empty coordinate in state '" + text + "'");
        item = item.substr(first, last - first + 1);
        try {
            std::size_t pos = 0;
            x.push_back(std::stoll(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw validation_error("state coordinate '" + item + "' is not an integer");
        }
    }
    if (int(x.size()) != dim)
        throw validation_error("state '" + text + "' has " + std::to_string(x.size()) +
                               " coordinates; the model has " + std::to_string(dim));
    return x;
}

std::pair<std::string, double> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw validation_error("expected name=value, got '" + text + "'");
    const std::string name = text.substr(0, eq);
    const std::string value = text.substr(eq + 1);
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return {name, v};
    } catch (const std::exception&) {
        throw validation_error("expected a numeric value in '" + text + "'");
    }
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& item : items) out.insert(parse_assignment(item));
    return out;
}

group_partition parse_groups(const std::string& body) {
    auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_object() && parsed.contains("blocks")) parsed = parsed["blocks"];
    if (!parsed.is_array())
        throw validation_error("a groups file holds an array of integer-index blocks");
    group_partition partition;
    for (const auto& row : parsed) {
        if (!row.is_array())
            throw validation_error("each block in a groups file is an array of indices");
        std::vector<int> block;
        for (const auto& v : row) block.push_back(v.get<int>());
        partition.blocks.push_back(std::move(block));
    }
    return partition;
}

// target given as predicate text, or as a file holding either a JSON state
// listing or predicate text
state_predicate resolve_target(const network& net, const std::string& spec,
                               input_tracker& inputs) {
    std::string text = spec;
    if (fs::exists(spec) && fs::is_regular_file(spec)) {
        const std::string body = inputs.read(spec);
        const auto parsed = nlohmann::json::parse(body, nullptr, false);
        if (parsed.is_array()) {
            std::vector<state> states;
            for (const auto& row : parsed) {
                if (!row.is_array())
                    throw validation_error("a state listing is an array of integer arrays");
                state x;
                for (const auto& c : row) x.push_back(c.get<std::int64_t>());
                if (int(x.size()) != net.dim())
                    throw validation_error("listed state dimension does not match the model");
                states.push_back(std::move(x));
            }
            if (states.empty()) throw validation_error("the state listing is empty");
            return in_set(std::move(states));
        }
        const auto first = body.find_first_not_of(" \t\r\n");
        const auto last = body.find_last_not_of(" \t\r\n");
        if (first == std::string::npos)
            throw validation_error("target file '" + spec + "' is empty");
        text = body.substr(first, last - first + 1);
    }
    return predicate_from_text(net, text);
}

distribution_table parse_distribution_csv(const std::string& body) {
    std::map<state, double> weights;
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == 'x') continue;  // header or blank
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2)
            throw validation_error("distribution rows need coordinates and a mass");
        state x;
        try {
            for (std::size_t i = 0; i + 1 < fields.size(); ++i)
                x.push_back(std::stoll(fields[i]));
            weights[x] += std::stod(fields.back());
        } catch (const std::exception&) {
            throw validation_error("bad distribution row '" + line + "'");
        }
    }
    return make_distribution(weights);
}

void write_distribution_csv(const std::string& path, const distribution_table& dist, int dim) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << distribution_csv_header(dim);
    append_distribution_csv(out, dist);
}

// shared flags for the coupled-simulation commands
struct coupling_options {
    std::string mode = "per-index";
    std::string groups_file;
    std::int64_t trunc_init = 16;
    double trunc_growth = 2.0;
    std::int64_t trunc_cap = 1 << 20;
    std::size_t max_box_states = 4'000'000;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--mode", mode, "coupling map: per-index or grouped")
            ->check(CLI::IsMember({"per-index", "grouped"}));
        cmd->add_option("--groups", groups_file,
                        "JSON blocks of net-vector indices (grouped mode scan order)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--truncation-init", trunc_init, "initial box cap for open spaces");
        cmd->add_option("--truncation-growth", trunc_growth, "box growth factor on exit");
        cmd->add_option("--truncation-cap", trunc_cap, "hard box cap before giving up");
        cmd->add_option("--max-box-states", max_box_states, "enumeration budget per box");
    }

    void fill(coupled_sim_config& cfg, const coupled_pair& pair,
              input_tracker& inputs) const {
        cfg.mode = mode == "grouped" ? coupling_mode::grouped : coupling_mode::per_index;
        if (cfg.mode == coupling_mode::grouped) {
            cfg.partition = groups_file.empty() ? suggest_groups(pair.order, pair.nets)
                                                : parse_groups(inputs.read(groups_file));
        } else if (!groups_file.empty()) {
            throw validation_error("--groups needs --mode grouped");
        }
        cfg.truncation = truncation_policy{trunc_init, trunc_growth, trunc_cap};
        cfg.max_box_states = max_box_states;
    }
};

// loads a base/variant pair; the order matrix comes from model-a when it
// has one, from model-b otherwise
coupled_pair load_pair(const std::string& path_a, const std::string& path_b,
                       input_tracker& inputs) {
    model_document a = parse_model(inputs.read(path_a));
    model_document b =
        path_b.empty() || path_b == path_a ? a : parse_model(inputs.read(path_b));
    const auto& rows = a.order_rows ? a.order_rows : b.order_rows;
    if (!rows)
        throw validation_error("neither model file carries an order_matrix");
    return coupled_pair::make(std::move(a.net), std::move(b.net),
                              order_spec::from_rows(*rows));
}

struct check_options {
    std::string model_a, model_b, condition, groups_file, report_file;
    std::optional<std::int64_t> truncation;
    double tol_rel = 1e-9, tol_abs = 1e-12;
    std::size_t max_states = 10'000'000;
};

int run_check(const check_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    coupled_pair pair = load_pair(o.model_a, o.model_b, inputs);
    if (o.truncation) pair = pair.truncated(*o.truncation);
    const rate_tolerance tol{o.tol_rel, o.tol_abs};

    condition_report report;
    if (o.condition == "direct") {
        report = check_direct(pair, tol, o.max_states);
    } else if (o.condition == "facet") {
        report = check_facet(pair, tol, o.max_states);
    } else if (o.condition == "grouped") {
        if (!o.groups_file.empty())
            throw validation_error("grouped derives its blocks; --groups applies to sequential");
        report = check_grouped_sums(pair, tol, o.max_states);
    } else {
        const group_partition partition = o.groups_file.empty()
                                              ? suggest_groups(pair.order, pair.nets)
                                              : parse_groups(inputs.read(o.groups_file));
        report = check_sequential_sums(pair, partition, tol, o.max_states);
    }
    emit(condition_document(report, make_run_manifest("check", args, 0, 1, inputs)),
         o.report_file);
    return report.pass ? exit_pass : exit_fail;
}

struct simulate_options {
    std::string model_a, model_b, x0_text, x0b_text, record = "accepted";
    std::string paths_file, report_file;
    double horizon = 1.0;
    std::int64_t reps = 1;
    std::uint64_t seed = 0;
    int threads = 1;
    coupling_options coupling;
};

int run_simulate(const simulate_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    coupled_pair pair = load_pair(o.model_a, o.model_b, inputs);
    const state x0 = parse_state_text(o.x0_text, pair.base.dim());
    const state x0b =
        o.x0b_text.empty() ? x0 : parse_state_text(o.x0b_text, pair.base.dim());
    if (o.reps < 1) throw validation_error("--reps must be at least 1");

    coupled_sim_config cfg;
    cfg.horizon = o.horizon;
    cfg.seed = o.seed;
    cfg.record = o.record == "potential" ? record_policy::all_potential_jumps
                                         : record_policy::accepted_jumps_only;
    o.coupling.fill(cfg, pair, inputs);

    coupled_batch_summary batch;
    if (!o.paths_file.empty()) {
        // streaming the CSV keeps memory flat, so path runs stay sequential
        std::ofstream out(o.paths_file, std::ios::binary);
        if (!out) throw validation_error("cannot write '" + o.paths_file + "'");
        out << paths_csv_header(pair.base.dim());
        for (std::int64_t r = 0; r < o.reps; ++r) {
            coupled_sim_config rep = cfg;
            rep.stream = std::uint64_t(r);
            coupled_run run = simulate_coupled(pair, x0, x0b, rep);
            append_path_csv(out, r, "base", run.base);
            append_path_csv(out, r, "variant", run.variant);
            batch.add(r, run);
        }
    } else {
        std::vector<coupled_run> runs;
        runs.resize(std::size_t(o.reps));
        run_replicates(o.reps, o.threads, [&](std::int64_t r) {
            coupled_sim_config rep = cfg;
            rep.stream = std::uint64_t(r);
            rep.keep_paths = false;
            runs[std::size_t(r)] = simulate_coupled(pair, x0, x0b, rep);
        });
        for (std::int64_t r = 0; r < o.reps; ++r) batch.add(r, runs[std::size_t(r)]);
    }

    simulate_context ctx;
    ctx.horizon = o.horizon;
    ctx.mode = cfg.mode;
    ctx.record = cfg.record;
    if (!o.paths_file.empty()) ctx.paths_file = o.paths_file;
    emit(simulate_document(batch, ctx,
                           make_run_manifest("simulate", args, o.seed, o.threads, inputs)),
         o.report_file);
    return batch.ordered_throughout == batch.replicates ? exit_pass : exit_fail;
}

struct mfpt_options {
    std::string model, x0_text, gamma, report_file;
    double horizon = 100.0;
    std::int64_t reps = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
};

int run_mfpt(const mfpt_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    const model_document doc = parse_model(inputs.read(o.model));
    const state x0 = parse_state_text(o.x0_text, doc.net.dim());
    const state_predicate gamma = resolve_target(doc.net, o.gamma, inputs);

    const mfpt_estimate est =
        estimate_mfpt(doc.net, x0, gamma, o.horizon, o.reps, o.seed, o.threads);
    mfpt_context ctx{o.gamma, o.horizon, o.reps};
    emit(mfpt_document(est, ctx, make_run_manifest("mfpt", args, o.seed, o.threads, inputs)),
         o.report_file);
    return exit_pass;
}

struct compare_options {
    std::string model_a, model_b, x0_text, x0b_text, gamma, report_file;
    std::string direction = "auto";
    double horizon = 100.0;
    std::int64_t reps = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::size_t max_states = 10'000'000;
    coupling_options coupling;
};

int run_mfpt_compare(const compare_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    coupled_pair pair = load_pair(o.model_a, o.model_b, inputs);
    const state x0 = parse_state_text(o.x0_text, pair.base.dim());
    const state x0b =
        o.x0b_text.empty() ? x0 : parse_state_text(o.x0b_text, pair.base.dim());
    const state_predicate gamma = resolve_target(pair.base, o.gamma, inputs);
    const set_direction direction = o.direction == "increasing" ? set_direction::increasing
                                    : o.direction == "decreasing"
                                        ? set_direction::decreasing
                                        : set_direction::automatic;

    coupled_sim_config cfg;
    cfg.horizon = o.horizon;
    cfg.seed = o.seed;
    o.coupling.fill(cfg, pair, inputs);

    const mfpt_compare_report report = compare_mfpt_coupled(
        pair, x0, x0b, gamma, cfg, o.reps, direction, o.max_states, o.threads);
    mfpt_context ctx{o.gamma, o.horizon, o.reps};
    emit(mfpt_compare_document(
             report, ctx, make_run_manifest("mfpt-compare", args, o.seed, o.threads, inputs)),
         o.report_file);
    return report.pathwise_violations == 0 ? exit_pass : exit_fail;
}

struct stationary_options {
    std::string model, x0_text, tv_csv, csv_file, report_file;
    double total_time = 0.0;
    double burn_in_frac = 0.1;
    std::optional<double> burn_in;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    std::size_t inline_limit = 64;
};

int run_stationary(const stationary_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    const model_document doc = parse_model(inputs.read(o.model));
    const state x0 = parse_state_text(o.x0_text, doc.net.dim());
    if (o.burn_in_frac < 0.0 || o.burn_in_frac >= 1.0)
        throw validation_error("--burn-in-frac must lie in [0, 1)");
    const double burn = o.burn_in ? *o.burn_in : o.burn_in_frac * o.total_time;

    const distribution_table dist =
        empirical_stationary(doc.net, x0, burn, o.total_time, o.seed);

    stationary_context ctx;
    ctx.burn_in = burn;
    ctx.total_time = o.total_time;
    ctx.inline_limit = o.inline_limit;
    for (const auto& item : o.sets) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw validation_error("expected name=predicate, got '" + item + "'");
        const std::string name = item.substr(0, eq);
        const std::string pred = item.substr(eq + 1);
        ctx.set_masses.emplace_back(
            name, stationary_set_mass(dist, predicate_from_text(doc.net, pred)));
    }
    if (!o.tv_csv.empty()) {
        const distribution_table reference = parse_distribution_csv(inputs.read(o.tv_csv));
        ctx.tv_distance = tv_distance(dist, reference);
        ctx.tv_against = o.tv_csv;
    }
    if (!o.csv_file.empty()) {
        write_distribution_csv(o.csv_file, dist, doc.net.dim());
        ctx.csv_file = o.csv_file;
    }
    emit(stationary_document(dist, ctx,
                             make_run_manifest("stationary", args, o.seed, 1, inputs)),
         o.report_file);
    return exit_pass;
}

struct oracle_options {
    std::int64_t etot = 0;
    std::array<double, 6> kappa{1, 1, 1, 1, 1, 1};
    std::int64_t cap_x1 = 0, cap_x2 = 0;
    std::string csv_file, report_file;
    std::size_t inline_limit = 64;
};

int run_stationary_oracle(const oracle_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    const distribution_table dist =
        product_form_stationary(o.etot, o.kappa, o.cap_x1, o.cap_x2);
    stationary_context ctx;
    ctx.inline_limit = o.inline_limit;
    if (!o.csv_file.empty()) {
        write_distribution_csv(o.csv_file, dist, 4);
        ctx.csv_file = o.csv_file;
    }
    emit(stationary_document(dist, ctx,
                             make_run_manifest("stationary-oracle", args, 0, 1, inputs)),
         o.report_file);
    return exit_pass;
}

struct drift_options {
    std::string model, v_text, set_file, report_file;
    std::string mode = "exp";
    double cprime = 0.0, dprime = 0.0, c = 0.0, d = 0.0;
    std::int64_t truncation = 0;
    double tol_rel = 1e-9, tol_abs = 1e-12;
    std::size_t max_states = 10'000'000;
};

int run_drift(const drift_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    const model_document doc = parse_model(inputs.read(o.model));

    lyapunov_spec spec;
    spec.v_text = o.v_text;
    if (o.mode == "exp") {
        spec.mode = drift_mode::exponential;
        spec.c_prime = o.cprime;
        spec.d_prime = o.dprime;
    } else {
        spec.mode = drift_mode::negative_outside_set;
        spec.c = o.c;
        spec.d = o.d;
        if (!o.set_file.empty()) {
            const auto parsed = nlohmann::json::parse(inputs.read(o.set_file), nullptr, false);
            if (!parsed.is_array())
                throw validation_error("a set file holds a JSON array of states");
            std::vector<state> states;
            for (const auto& row : parsed) {
                state x;
                for (const auto& cval : row) x.push_back(cval.get<std::int64_t>());
                states.push_back(std::move(x));
            }
            spec.set_c = std::move(states);
        }
    }
    const drift_report report = verify_drift(doc.net, spec, o.truncation,
                                             rate_tolerance{o.tol_rel, o.tol_abs}, o.max_states);
    emit(drift_document(report, spec, make_run_manifest("drift", args, 0, 1, inputs)),
         o.report_file);
    return report.pass ? exit_pass : exit_fail;
}

struct demo_options {
    std::string id, order_name = "default", out_dir, report_file;
    std::vector<std::string> params, variants;
};

int run_demo(const demo_options& o, const std::vector<std::string>& args) {
    input_tracker inputs;
    const example_bundle bundle = build_bundle(o.id, parse_assignments(o.params));
    const auto order = bundle.orders.find(o.order_name);
    if (order == bundle.orders.end())
        throw invalid_params("bundle '" + o.id + "' has no order '" + o.order_name + "'");

    model_document doc{bundle.net, order->second.matrix()};
    if (o.out_dir.empty()) {
        if (!o.variants.empty())
            throw validation_error("--variant needs --out to have somewhere to write");
        std::cout << serialize_model(doc);
        return exit_pass;
    }

    fs::create_directories(o.out_dir);
    const auto out_path = [&](const std::string& name) {
        return (fs::path(o.out_dir) / name).string();
    };
    std::vector<std::string> files;
    files.push_back(out_path(o.id + ".json"));
    write_file(files.back(), serialize_model(doc));
    if (!o.variants.empty()) {
        const coupled_pair pair =
            bundle_pair(bundle, parse_assignments(o.variants), o.order_name);
        files.push_back(out_path(o.id + "-variant.json"));
        write_file(files.back(), serialize_model(model_document{pair.variant, doc.order_rows}));
    }
    for (const auto& [name, partition] : bundle.partitions) {
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& block : partition.blocks) blocks.push_back(block);
        files.push_back(out_path(o.id + "-groups-" + name + ".json"));
        write_file(files.back(), blocks.dump(2) + "\n");
    }
    emit(demo_document(bundle, files, make_run_manifest("demo", args, 0, 1, inputs)),
         o.report_file);
    return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);

    std::uint64_t seed = 0;
    try {
        seed = env_seed();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    const int threads = default_threads();

    CLI::App app{"comparison machinery for stochastic reaction networks"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    check_options co;
    auto* check_cmd =
        app.add_subcommand("check", "evaluate an ordering condition on a model pair");
    check_cmd->add_option("--model-a", co.model_a, "base model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    check_cmd->add_option("--model-b", co.model_b, "variant model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    check_cmd
        ->add_option("--condition", co.condition,
                     "direct, facet, grouped, or sequential rate comparison")
        ->required()
        ->check(CLI::IsMember({"direct", "facet", "grouped", "sequential"}));
    check_cmd->add_option("--truncation", co.truncation, "cap every coordinate for the sweep");
    check_cmd->add_option("--groups", co.groups_file, "JSON blocks for the sequential scan")
        ->check(CLI::ExistingFile);
    check_cmd->add_option("--tol-rel", co.tol_rel, "relative rate tolerance");
    check_cmd->add_option("--tol-abs", co.tol_abs, "absolute rate tolerance");
    check_cmd->add_option("--max-states", co.max_states, "state enumeration budget");
    check_cmd->add_option("--report", co.report_file, "also write the JSON document here");

    simulate_options so;
    so.seed = seed;
    so.threads = threads;
    auto* sim_cmd = app.add_subcommand("simulate", "run coupled replicates of a model pair");
    sim_cmd->add_option("--model-a", so.model_a, "base model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("--model-b", so.model_b, "variant model JSON (defaults to model-a)")
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("--x0", so.x0_text, "base start, comma-separated counts")->required();
    sim_cmd->add_option("--x0b", so.x0b_text, "variant start (defaults to --x0)");
    sim_cmd->add_option("-T,--horizon", so.horizon, "time horizon")->required();
    sim_cmd->add_option("--reps", so.reps, "replicates");
    sim_cmd->add_option("--seed", so.seed, "RNG seed (SCRN_SEED, then 0)");
    sim_cmd->add_option("--record", so.record, "events to record: accepted or potential")
        ->check(CLI::IsMember({"accepted", "potential"}));
    sim_cmd->add_option("--paths", so.paths_file, "write trajectories to this CSV");
    sim_cmd->add_option("--threads", so.threads, "replicate workers; results are unchanged");
    sim_cmd->add_option("--report", so.report_file, "also write the JSON document here");
    so.coupling.add_flags(sim_cmd);

    mfpt_options mo;
    mo.seed = seed;
    mo.threads = threads;
    auto* mfpt_cmd =
        app.add_subcommand("mfpt", "estimate a mean first passage time by simulation");
    mfpt_cmd->add_option("--model", mo.model, "model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    mfpt_cmd->add_option("--x0", mo.x0_text, "start, comma-separated counts")->required();
    mfpt_cmd->add_option("--gamma", mo.gamma, "target predicate or listing file")->required();
    mfpt_cmd->add_option("-T,--horizon", mo.horizon, "censoring horizon");
    mfpt_cmd->add_option("--reps", mo.reps, "replicates");
    mfpt_cmd->add_option("--seed", mo.seed, "RNG seed (SCRN_SEED, then 0)");
    mfpt_cmd->add_option("--threads", mo.threads, "replicate workers; results are unchanged");
    mfpt_cmd->add_option("--report", mo.report_file, "also write the JSON document here");

    compare_options po;
    po.seed = seed;
    po.threads = threads;
    auto* cmp_cmd = app.add_subcommand(
        "mfpt-compare", "compare first passage times with one coupled run per replicate");
    cmp_cmd->add_option("--model-a", po.model_a, "base model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmp_cmd->add_option("--model-b", po.model_b, "variant model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmp_cmd->add_option("--x0", po.x0_text, "base start, comma-separated counts")->required();
    cmp_cmd->add_option("--x0b", po.x0b_text, "variant start (defaults to --x0)");
    cmp_cmd->add_option("--gamma", po.gamma, "target predicate or listing file")->required();
    cmp_cmd->add_option("--direction", po.direction, "target monotonicity under the order")
        ->check(CLI::IsMember({"auto", "increasing", "decreasing"}));
    cmp_cmd->add_option("-T,--horizon", po.horizon, "censoring horizon");
    cmp_cmd->add_option("--reps", po.reps, "replicates");
    cmp_cmd->add_option("--seed", po.seed, "RNG seed (SCRN_SEED, then 0)");
    cmp_cmd->add_option("--max-states", po.max_states, "state enumeration budget");
    cmp_cmd->add_option("--threads", po.threads, "replicate workers; results are unchanged");
    cmp_cmd->add_option("--report", po.report_file, "also write the JSON document here");
    po.coupling.add_flags(cmp_cmd);

    stationary_options to;
    to.seed = seed;
    auto* stat_cmd = app.add_subcommand(
        "stationary", "occupation-time stationary estimate from one long run");
    stat_cmd->add_option("--model", to.model, "model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    stat_cmd->add_option("--x0", to.x0_text, "start, comma-separated counts")->required();
    stat_cmd->add_option("--total-time", to.total_time, "trajectory length")->required();
    stat_cmd->add_option("--burn-in-frac", to.burn_in_frac,
                         "fraction of the run discarded from the front");
    stat_cmd->add_option("--burn-in", to.burn_in, "absolute burn-in; overrides the fraction");
    stat_cmd->add_option("--set", to.sets, "name=predicate: report the set's mass")
        ->take_all();
    stat_cmd->add_option("--tv-against", to.tv_csv,
                         "distribution CSV to compare against in total variation")
        ->check(CLI::ExistingFile);
    stat_cmd->add_option("--csv", to.csv_file, "write the distribution table here");
    stat_cmd->add_option("--seed", to.seed, "RNG seed (SCRN_SEED, then 0)");
    stat_cmd->add_option("--inline-limit", to.inline_limit,
                         "largest support inlined into the JSON document");
    stat_cmd->add_option("--report", to.report_file, "also write the JSON document here");

    oracle_options oo;
    auto* oracle_cmd = app.add_subcommand(
        "stationary-oracle",
        "closed-form stationary law of the open enzyme network on a truncation");
    oracle_cmd->add_option("--etot", oo.etot, "conserved enzyme total")->required();
    oracle_cmd->add_option("--k1", oo.kappa[0], "binding rate");
    oracle_cmd->add_option("--k2", oo.kappa[1], "unbinding rate");
    oracle_cmd->add_option("--k3", oo.kappa[2], "conversion rate");
    oracle_cmd->add_option("--k4", oo.kappa[3], "product rebinding rate");
    oracle_cmd->add_option("--k5", oo.kappa[4], "substrate inflow rate");
    oracle_cmd->add_option("--k6", oo.kappa[5], "substrate outflow rate");
    oracle_cmd->add_option("--cap-x1", oo.cap_x1, "substrate cap")->required();
    oracle_cmd->add_option("--cap-x2", oo.cap_x2, "product cap")->required();
    oracle_cmd->add_option("--csv", oo.csv_file, "write the distribution table here");
    oracle_cmd->add_option("--inline-limit", oo.inline_limit,
                           "largest support inlined into the JSON document");
    oracle_cmd->add_option("--report", oo.report_file, "also write the JSON document here");

    drift_options dr;
    auto* drift_cmd =
        app.add_subcommand("drift", "verify a Lyapunov drift bound on a truncation");
    drift_cmd->add_option("--model", dr.model, "model JSON")
        ->required()
        ->check(CLI::ExistingFile);
    drift_cmd->add_option("--v", dr.v_text, "Lyapunov observable, e.g. \"x3\"")->required();
    drift_cmd->add_option("--mode", dr.mode, "exp: QV <= -cprime*V + dprime; negdrift: "
                                             "QV <= -c outside a finite set")
        ->check(CLI::IsMember({"exp", "negdrift"}));
    drift_cmd->add_option("--cprime", dr.cprime, "exponential decay constant");
    drift_cmd->add_option("--dprime", dr.dprime, "exponential offset");
    drift_cmd->add_option("--c", dr.c, "negative drift outside the set");
    drift_cmd->add_option("--d", dr.d, "allowance inside a given set");
    drift_cmd->add_option("--set", dr.set_file, "JSON state array; omit to derive the set")
        ->check(CLI::ExistingFile);
    drift_cmd->add_option("--truncation", dr.truncation, "cap every coordinate for the sweep")
        ->required();
    drift_cmd->add_option("--tol-rel", dr.tol_rel, "relative tolerance");
    drift_cmd->add_option("--tol-abs", dr.tol_abs, "absolute tolerance");
    drift_cmd->add_option("--max-states", dr.max_states, "state enumeration budget");
    drift_cmd->add_option("--report", dr.report_file, "also write the JSON document here");

    demo_options de;
    auto* demo_cmd =
        app.add_subcommand("demo", "emit a bundled example model, ready for the other commands");
    demo_cmd->add_option("id", de.id, "bundle id; see --help for the list")
        ->required()
        ->check(CLI::IsMember(bundle_ids()));
    demo_cmd->add_option("--param", de.params, "override a bundle parameter, name=value")
        ->take_all();
    demo_cmd->add_option("--variant", de.variants,
                         "also write a variant model with these name=value overrides")
        ->take_all();
    demo_cmd->add_option("--order", de.order_name, "which order matrix to embed");
    demo_cmd->add_option("--out", de.out_dir, "write model and groups files to this directory");
    demo_cmd->add_option("--report", de.report_file, "also write the JSON document here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        if (check_cmd->parsed()) return run_check(co, args);
        if (sim_cmd->parsed()) return run_simulate(so, args);
        if (mfpt_cmd->parsed()) return run_mfpt(mo, args);
        if (cmp_cmd->parsed()) return run_mfpt_compare(po, args);
        if (stat_cmd->parsed()) return run_stationary(to, args);
        if (oracle_cmd->parsed()) return run_stationary_oracle(oo, args);
        if (drift_cmd->parsed()) return run_drift(dr, args);
        if (demo_cmd->parsed()) return run_demo(de, args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
