#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scrn/analysis.hpp"
#include "scrn/bundles.hpp"
#include "scrn/conditions.hpp"
#include "scrn/coupling.hpp"

namespace scrn {

inline constexpr const char* tool_name = "scrncmp";
inline constexpr const char* tool_version = "0.1.0";

// 64-bit FNV-1a over raw bytes; stable across platforms
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string iso8601_utc(std::int64_t unix_seconds);

// Every document embeds its manifest: the command that produced it, the
// resolved arguments, seed, thread count, and one digest per input file.
// Runs with equal manifests render byte-identical documents, timestamp
// field aside.
struct run_manifest {
    std::string command;
    std::vector<std::string> arguments;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<std::pair<std::string, std::string>> input_digests;  // path, fnv1a64
    std::string timestamp;  // iso8601_utc; empty omits the field
};

// tallies over a batch of coupled replicates
struct coupled_batch_summary {
    std::int64_t replicates = 0;
    std::int64_t ordered_throughout = 0;
    std::optional<std::int64_t> first_violation_replicate;
    std::optional<double> first_violation_time;
    std::int64_t reached_horizon = 0;  // replicates by terminal status
    std::int64_t exited_truncation = 0;
    std::int64_t hit_target = 0;
    std::uint64_t potential_jumps = 0;
    std::uint64_t accepted_base = 0;
    std::uint64_t accepted_variant = 0;
    double lambda_max = 0.0;
    std::int64_t box_expansions = 0;

    void add(std::int64_t replicate, const coupled_run& run);
};

struct simulate_context {
    double horizon = 0.0;
    coupling_mode mode = coupling_mode::per_index;
    record_policy record = record_policy::accepted_jumps_only;
    std::optional<std::string> paths_file;
};

struct mfpt_context {
    std::string target;  // predicate text or listing file
    double horizon = 0.0;
    std::int64_t replicates = 0;
};

struct stationary_context {
    double burn_in = 0.0;
    double total_time = 0.0;  // zero for closed-form tables
    std::vector<std::pair<std::string, double>> set_masses;
    std::optional<double> tv_distance;      // distance to a reference law
    std::optional<std::string> tv_against;  // what the distance compares to
    std::optional<std::string> csv_file;
    std::size_t inline_limit = 64;  // support rows inlined into the document
};

// pretty JSON, newline terminated, manifest embedded
std::string condition_document(const condition_report& report, const run_manifest& manifest);
std::string simulate_document(const coupled_batch_summary& batch, const simulate_context& ctx,
                              const run_manifest& manifest);
std::string mfpt_document(const mfpt_estimate& estimate, const mfpt_context& ctx,
                          const run_manifest& manifest);
std::string mfpt_compare_document(const mfpt_compare_report& report, const mfpt_context& ctx,
                                  const run_manifest& manifest);
std::string stationary_document(const distribution_table& dist, const stationary_context& ctx,
                                const run_manifest& manifest);
std::string drift_document(const drift_report& report, const lyapunov_spec& spec,
                           const run_manifest& manifest);
std::string demo_document(const example_bundle& bundle, const std::vector<std::string>& files,
                          const run_manifest& manifest);

// trajectory CSV: replicate,chain,time,x1..xd; one row per recorded event
std::string paths_csv_header(int dim);
void append_path_csv(std::ostream& out, std::int64_t replicate, const std::string& chain,
                     const sample_path& path);

// distribution CSV: x1..xd,mass
std::string distribution_csv_header(int dim);
void append_distribution_csv(std::ostream& out, const distribution_table& dist);

}  // namespace scrn
