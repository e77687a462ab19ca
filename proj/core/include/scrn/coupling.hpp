#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "scrn/conditions.hpp"
#include "scrn/model.hpp"
#include "scrn/rng.hpp"

namespace scrn {

// per_index: one interval slot per net direction, shared by both chains.
// grouped: slots are blocks of a partition; within a block the intervals
// pack contiguously in block order, so only block sums must be ordered.
enum class coupling_mode { per_index, grouped };

// accepted_jumps_only records an event when a state changes; all ticks of
// the Poisson clock are recorded otherwise, including self-loops
enum class record_policy { accepted_jumps_only, all_potential_jumps };

// hit_target means the run stopped early because every tracked chain had
// reached its stop_target; first-hit times are recorded either way
enum class terminal_status { reached_horizon, exited_truncation, hit_target };

// expanding-box scheme for spaces too large to bound globally: the rate
// bound is taken over the current box, a jump leaving the box enlarges it
// by growth and the run resumes with the same random stream
struct truncation_policy {
    std::int64_t initial_cap = 16;
    double growth = 2.0;
    std::int64_t hard_cap = 1 << 20; // needing more than this throws truncation_limit
};

// smallest uniformization constant used: strictly dominates n times the
// total jump rate of either chain over the given states
double choose_lambda(const coupled_pair& pair, const std::vector<state>& states);

// one uniformization step x -> x + v_j or x; slot j covers
// [j/n, j/n + rate_j/lambda), so a step never leaves the state space
state phi_map(const network& net, const net_structure& ns, double lambda, const state& x,
              double u);

// grouped variant: block k owns [p_{k-1}/n, p_k/n) and its members pack
// contiguously from the left edge in block order
state psi_map(const network& net, const net_structure& ns, const group_partition& partition,
              double lambda, const state& x, double u);

struct sample_path {
    std::vector<std::pair<double, state>> events; // nondecreasing times, first at t=0
    terminal_status terminal = terminal_status::reached_horizon;
    double exit_time = 0.0;  // set when terminal == exited_truncation
    state final_state;       // filled even when events are not kept
    double final_time = 0.0;
    std::optional<double> hit_time; // first time in stop_target; tracked only when one is given
};

struct coupled_run {
    sample_path base;    // lower chain
    sample_path variant; // upper chain
    bool ordered_throughout = false;
    std::optional<double> first_violation_time;
    std::uint64_t potential_jumps = 0; // Poisson clock ticks
    std::uint64_t accepted_base = 0;   // ticks that moved the lower chain
    std::uint64_t accepted_variant = 0;
    double lambda_final = 0.0;  // rate bound in effect at the end
    std::int64_t cap_final = 0; // box cap in effect at the end; 0 when global
    int expansions = 0;         // box growth events
};

struct coupled_sim_config {
    double horizon = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0; // replicate index; each stream is independent
    coupling_mode mode = coupling_mode::per_index;
    std::optional<group_partition> partition; // required in grouped mode
    record_policy record = record_policy::accepted_jumps_only;
    bool keep_paths = true; // when false only counters and finals are filled
    truncation_policy truncation;
    std::size_t max_box_states = 4'000'000; // enumeration budget per box
    // when set, each chain latches its first entry time into the target and
    // the run stops once both chains have one (first-passage extraction)
    std::function<bool(const state&)> stop_target;
};

// shared-clock, shared-uniform pair simulation; starts must satisfy
// x0 preceq x0_variant under the pair's order
coupled_run simulate_coupled(const coupled_pair& pair, const state& x0,
                             const state& x0_variant, const coupled_sim_config& cfg);

// exact single-chain simulation, used as the distribution oracle; a
// stop_target ends the run at the first state satisfying it
sample_path simulate_ssa(const network& net, const state& x0, double horizon,
                         std::uint64_t seed, std::uint64_t stream, bool keep_path = true,
                         const std::function<bool(const state&)>& stop_target = {});

} // namespace scrn
