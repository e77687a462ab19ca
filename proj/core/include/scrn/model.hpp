#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scrn/expr.hpp"
#include "scrn/rational.hpp"

namespace scrn {

// molecule counts, one entry per species
using state = std::vector<std::int64_t>;

// parameter with an optional exact value; exactness comes from integer or
// decimal-literal origins and lets checkers compare rates without rounding
struct param_value {
    double value = 0.0;
    std::optional<rational> exact;

    static param_value from_double(double v);
    static param_value from_int(std::int64_t v);
    static param_value from_rational(const rational& r);
};

// <coeffs, x> == value (equality) or <coeffs, x> <= value (inequality)
struct linear_constraint {
    std::vector<std::int64_t> coeffs;
    std::int64_t value = 0;

    bool operator==(const linear_constraint&) const = default;
};

// Subset of Z+^d given either as an explicit list, as the solution set of
// linear equalities/inequalities with optional per-coordinate caps, or as
// a plain box of caps. Nonnegativity is always implied.
class state_space {
public:
    enum class kind_t { enumerated, constrained, box };

    static state_space enumerated(std::vector<state> states);
    static state_space constrained(int dim,
                                   std::vector<linear_constraint> equalities,
                                   std::vector<linear_constraint> inequalities,
                                   std::vector<std::optional<std::int64_t>> caps = {});
    static state_space box(int dim, std::vector<std::optional<std::int64_t>> caps);

    kind_t kind() const { return kind_; }
    int dim() const { return dim_; }
    bool contains(const state& x) const;

    // caps every coordinate at min(existing cap, cap); enumerated lists are filtered
    state_space truncated(std::int64_t cap) const;

    const std::vector<state>& states() const { return states_; }
    const std::vector<linear_constraint>& equalities() const { return equalities_; }
    const std::vector<linear_constraint>& inequalities() const { return inequalities_; }
    const std::vector<std::optional<std::int64_t>>& caps() const { return caps_; }

    bool operator==(const state_space&) const = default;

private:
    kind_t kind_ = kind_t::box;
    int dim_ = 0;
    std::vector<state> states_;                    // enumerated, lex sorted
    std::vector<linear_constraint> equalities_;
    std::vector<linear_constraint> inequalities_;
    std::vector<std::optional<std::int64_t>> caps_;
};

struct rate_law {
    enum class kind_t { mass_action, expr };
    kind_t kind = kind_t::mass_action;
    std::string param_name;  // mass_action with a named constant
    param_value literal;     // mass_action with an inline constant
    std::string expr_text;   // expr
};

struct reaction {
    state reactant;
    state product;
    rate_law rate;
};

// Reaction network over species counts. Construction validates structure
// and compiles all rate expressions; instances are immutable.
class network {
public:
    network(std::vector<std::string> species,
            std::vector<std::pair<std::string, param_value>> params,
            std::vector<reaction> reactions,
            state_space space);

    int dim() const { return int(species_.size()); }
    const std::vector<std::string>& species() const { return species_; }
    const std::vector<reaction>& reactions() const { return reactions_; }
    const state_space& space() const { return space_; }

    const std::vector<std::string>& param_names() const { return param_names_; }
    const std::vector<double>& param_values() const { return param_values_; }
    const std::vector<std::optional<rational>>& param_exacts() const { return param_exacts_; }
    bool has_param(const std::string& name) const;
    double param(const std::string& name) const;

    network with_param(const std::string& name, param_value v) const;
    network truncated(std::int64_t cap) const;

    // propensity of reaction r at x; no membership zeroing here
    double reaction_rate(int r, const state& x) const;
    std::optional<rational> reaction_rate_exact(int r, const state& x) const;

    // compile a predicate such as "x1 == 0 && x2 >= 3" against this model
    expression compile_predicate(const std::string& text) const;
    // compile a numeric observable such as a Lyapunov function
    expression compile_observable(const std::string& text) const;

private:
    std::vector<std::string> species_;
    std::vector<std::string> param_names_;   // sorted
    std::vector<double> param_values_;
    std::vector<std::optional<rational>> param_exacts_;
    std::vector<reaction> reactions_;
    state_space space_;

    struct compiled_rate {
        bool mass_action = true;
        double kappa = 0.0;
        std::optional<rational> kappa_exact;
        expression expr;
    };
    std::vector<compiled_rate> compiled_;

    void validate_and_compile();
};

// distinct nonzero net jump vectors in lexicographic order, with the
// reactions contributing to each
struct net_structure {
    std::vector<state> vectors;
    std::vector<std::vector<int>> members;
    int count() const { return int(vectors.size()); }
};

net_structure derive_net_structure(const network& net);

// Summed propensity per net direction at x. Directions whose jump leaves
// the state space are forced to zero, so the vector already describes the
// generator row. Requires x in the space.
std::vector<double> rate_vector(const network& net, const net_structure& ns, const state& x);
void rate_vector_into(const network& net, const net_structure& ns, const state& x,
                      std::vector<double>& out);

// exact counterpart; entry is nullopt where exactness is unavailable
std::vector<std::optional<rational>> rate_vector_exact(const network& net,
                                                       const net_structure& ns, const state& x);

struct generator_row {
    std::vector<std::pair<state, double>> transitions; // target, rate; rate > 0
    double diagonal = 0.0;
};

generator_row generator_row_at(const network& net, const net_structure& ns, const state& x);

// all states of the space in lexicographic order; throws infinite_space
// when no finite description exists and cap_exceeded past max_states
std::vector<state> enumerate_states(const network& net, std::size_t max_states = 10'000'000);
std::vector<state> enumerate_space(const state_space& space, std::size_t max_states = 10'000'000);

// falling factorial x(x-1)...(x-k+1)
std::int64_t falling_factorial(std::int64_t x, std::int64_t k);

} // namespace scrn
