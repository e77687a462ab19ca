#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scrn/coupling.hpp"
#include "scrn/model.hpp"
#include "scrn/order.hpp"

namespace scrn {

using state_predicate = std::function<bool(const state&)>;

// membership predicate for an explicit state list
state_predicate in_set(std::vector<state> states);
// predicate compiled from a condition over x1..xd, e.g. "x2 >= 3"
state_predicate predicate_from_text(const network& net, const std::string& text);

// first time a recorded path satisfies gamma; nullopt when censored.
// The path must carry events (simulated with keep_path).
std::optional<double> first_passage(const sample_path& path, const state_predicate& gamma);

struct mfpt_estimate {
    double mean = 0.0;      // over uncensored replicates
    double std_error = 0.0; // sample standard error of the mean
    std::int64_t n_samples = 0;  // replicates run
    std::int64_t n_censored = 0; // replicates that never hit gamma before the horizon
};

// runs fn(replicate) for replicate in [0, n) over up to `threads` workers;
// callers store results in per-replicate slots so the aggregation order
// stays fixed. The first worker exception is rethrown after the join.
void run_replicates(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

// Monte Carlo mean first passage time to gamma; each replicate is an exact
// simulation stopped at its first hit. Replicates are keyed by stream, so
// the estimate is identical for every thread count.
mfpt_estimate estimate_mfpt(const network& net, const state& x0, const state_predicate& gamma,
                            double horizon, std::int64_t n, std::uint64_t seed,
                            int threads = 1);

// empirical CDF dominance F_a(t) >= F_b(t) on the merged sample grid,
// decided in exact integer arithmetic. total_a/total_b widen the
// denominators past the listed samples (censored mass beyond the grid).
struct stochastic_order_report {
    bool dominates = false;     // samples_a below samples_b in the usual order
    double max_violation = 0.0; // largest F_b - F_a overshoot seen
};
stochastic_order_report usual_stochastic_order_test(const std::vector<double>& samples_a,
                                                    const std::vector<double>& samples_b,
                                                    std::int64_t total_a = 0,
                                                    std::int64_t total_b = 0);

enum class set_direction { automatic, increasing, decreasing };

struct mfpt_compare_report {
    set_direction direction = set_direction::increasing; // resolved direction
    std::int64_t n = 0;
    mfpt_estimate base;    // per-chain marginal summaries
    mfpt_estimate variant;
    // (T base, T variant) per replicate; nullopt marks a censored hit
    std::vector<std::pair<std::optional<double>, std::optional<double>>> pairs;
    std::int64_t pathwise_ok = 0; // replicates consistent with the coupled inequality
    std::int64_t pathwise_violations = 0;
    std::int64_t n_both_hit = 0;
    double paired_mean_diff = 0.0; // mean of T_base - T_variant over both-hit replicates
    double paired_std_error = 0.0;
    stochastic_order_report cdf; // dominance test, claimed-smaller side vs the other
};

// coupled first-passage comparison: per replicate one coupled run stopped
// once both chains hit, with the pathwise inequality asserted exactly.
// gamma's direction is verified on the enumerated space; automatic tries
// increasing first, then decreasing, and throws direction_unknown when the
// requested (or either) verification fails. Replicates are keyed by
// stream, so the report is identical for every thread count.
mfpt_compare_report compare_mfpt_coupled(const coupled_pair& pair, const state& x0,
                                         const state& x0_variant, const state_predicate& gamma,
                                         const coupled_sim_config& cfg, std::int64_t n,
                                         set_direction direction = set_direction::automatic,
                                         std::size_t max_states = 10'000'000, int threads = 1);

struct distribution_table {
    std::vector<state> support; // lex ascending
    std::vector<double> mass;   // nonnegative, sums to 1 within 1e-12
};

// normalized table from nonnegative weights; zero-weight states are dropped
distribution_table make_distribution(const std::map<state, double>& weight);

// time-averaged occupation frequencies of one long exact trajectory,
// weighted by holding times clipped to [burn_in, total_time]
distribution_table empirical_stationary(const network& net, const state& x0, double burn_in,
                                        double total_time, std::uint64_t seed,
                                        std::uint64_t stream = 0);

// closed-form stationary law of the open enzyme system on species
// (S, P, E, SE): Poisson(c1) x Poisson(c2) on (x1, x2) and a binomial-type
// factor on the conserved pair x3 + x4 = e_tot, truncated to the cap box
// and renormalized. kappa holds the six rate constants in index order.
distribution_table product_form_stationary(std::int64_t e_tot, const std::array<double, 6>& kappa,
                                           std::int64_t cap_x1, std::int64_t cap_x2);

// total mass of the states satisfying gamma
double stationary_set_mass(const distribution_table& dist, const state_predicate& gamma);

// total variation distance on the union support
double tv_distance(const distribution_table& a, const distribution_table& b);

// generator applied to an observable: QV(x) = sum_j rate_j(x) (V(x+v_j) - V(x))
double drift_value(const network& net, const std::string& v_text, const state& x);

enum class drift_mode { negative_outside_set, exponential };

struct lyapunov_spec {
    std::string v_text; // numeric observable, must be nonnegative on the space
    drift_mode mode = drift_mode::exponential;
    // negative_outside_set: QV(x) <= -c + d on set_c and QV(x) <= -c elsewhere.
    // With set_c absent the checker derives set_c = {x : QV(x) > -c} and the
    // smallest workable d; the verdict then requires the derived set to lie
    // strictly inside the truncation box.
    double c = 0.0;
    double d = 0.0;
    std::optional<std::vector<state>> set_c;
    // exponential: QV(x) <= -c_prime V(x) + d_prime
    double c_prime = 0.0;
    double d_prime = 0.0;
};

struct drift_report {
    drift_mode mode = drift_mode::exponential;
    bool pass = false;
    std::int64_t states = 0;             // states swept
    std::optional<state> worst_state;    // maximizer of lhs - rhs
    double worst_margin = 0.0;           // its margin; <= 0 on pass
    std::vector<state> set_c;            // set in force (given or derived)
    double c = 0.0, d = 0.0;             // effective constants, d possibly derived
    double c_prime = 0.0, d_prime = 0.0;
    bool set_interior = false;           // set_c strictly inside the truncation box
    std::int64_t truncation = 0;
    std::optional<std::string> note;     // structural failure, e.g. V negative
};

// sweeps the truncated enumeration while evaluating rates on the original
// space, so the drift is that of the untruncated generator
drift_report verify_drift(const network& net, const lyapunov_spec& spec, std::int64_t truncation,
                          rate_tolerance tol = {}, std::size_t max_states = 10'000'000);

// states reachable from x0 through positive-rate jumps, lex sorted;
// throws cap_exceeded when the frontier outgrows max_states
std::vector<state> reachable_states(const network& net, const state& x0,
                                    std::size_t max_states = 1'000'000);

} // namespace scrn
