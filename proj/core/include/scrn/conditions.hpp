#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrn/model.hpp"
#include "scrn/order.hpp"

namespace scrn {

// Two networks over the same species, state space, and jump directions,
// compared through a cone order. base carries the reference rates and
// variant the perturbed ones; all checkers ask whether variant paths can
// be kept above base paths in the order.
struct coupled_pair {
    network base;
    network variant;
    net_structure nets;
    order_spec order;
    std::optional<std::int64_t> truncation; // cap applied by truncated(), if any

    static coupled_pair make(network base, network variant, order_spec order);
    coupled_pair truncated(std::int64_t cap) const;
};

// Ordered blocks of net-vector indices; the order inside a block and the
// block sequence together define the scan order used by the grouped
// coupling map and the sequential checker.
struct group_partition {
    std::vector<std::vector<int>> blocks;

    std::vector<int> sigma() const; // concatenation of blocks
    void validate(int n_vectors) const;
};

// blocks of equal A*v image, deterministic order (images sorted lex)
group_partition suggest_groups(const order_spec& order, const net_structure& ns);

// Within each block the per-row images must repeat the block's leading
// value until they drop to zero and stay there; this is what lets prefix
// sums of rates align across the two chains.
struct alignment_violation {
    int block = 0;
    int position = 0; // index within the block where the pattern breaks
    int row = 0;
};
std::optional<alignment_violation> check_alignment(const order_spec& order,
                                                   const net_structure& ns,
                                                   const group_partition& partition);

struct rate_tolerance {
    double rel = 1e-9;
    double abs = 1e-12;
};

enum class condition_kind { direct, facet, grouped_sums, sequential_sums };

const char* condition_kind_name(condition_kind k);

struct condition_witness {
    state x;                      // base-chain state
    state y;                      // variant-chain state, x precedes y
    std::optional<int> row;       // facet row, when facet-indexed
    std::optional<int> net_index; // single-direction comparisons
    std::optional<int> block;     // grouped comparisons
    std::string relation;         // the inequality that failed: "<=" or ">="
    double lhs = 0.0;             // variant-side value
    double rhs = 0.0;             // base-side value
};

struct condition_report {
    condition_kind kind = condition_kind::direct;
    bool pass = false;
    std::uint64_t states = 0;         // states in the checked space
    std::uint64_t pairs_checked = 0;  // ordered related pairs
    std::uint64_t comparisons = 0;    // rate inequalities evaluated
    std::uint64_t equality_flags = 0; // pairs forced to equality by opposing rows
    rate_tolerance tolerance;
    std::optional<std::int64_t> truncation; // cap used to bound the sweep, if any
    std::optional<condition_witness> witness;
    std::optional<std::string> failure_note; // structural failures
};

// all related pairs, per-direction comparisons gated by cone membership
condition_report check_direct(const coupled_pair& pair, rate_tolerance tol = {},
                              std::size_t max_states = 10'000'000);

// facet-indexed per-direction comparisons; requires unit A*v images
condition_report check_facet(const coupled_pair& pair, rate_tolerance tol = {},
                             std::size_t max_states = 10'000'000);

// facet-indexed sums over blocks of equal A*v image
condition_report check_grouped_sums(const coupled_pair& pair, rate_tolerance tol = {},
                                    std::size_t max_states = 10'000'000);

// facet-indexed signed sums over an aligned partition
condition_report check_sequential_sums(const coupled_pair& pair,
                                       const group_partition& partition,
                                       rate_tolerance tol = {},
                                       std::size_t max_states = 10'000'000);

} // namespace scrn
