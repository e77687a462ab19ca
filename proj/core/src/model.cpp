#include "scrn/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "scrn/errors.hpp"

namespace scrn {

namespace {

std::string state_str(const state& x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(x[i]);
    }
    return s + ")";
}

} // namespace

param_value param_value::from_double(double v) {
    param_value p;
    p.value = v;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec == std::errc()) {
        p.exact = rat_from_decimal(std::string(buf, res.ptr));
    }
    return p;
}

param_value param_value::from_int(std::int64_t v) {
    param_value p;
    p.value = double(v);
    p.exact = rational::from_int(v);
    return p;
}

param_value param_value::from_rational(const rational& r) {
    param_value p;
    p.value = r.to_double();
    p.exact = r;
    return p;
}

// ---------------------------------------------------------------- state_space

state_space state_space::enumerated(std::vector<state> states) {
    if (states.empty()) throw validation_error("enumerated state space is empty");
    const std::size_t d = states.front().size();
    if (d == 0) throw validation_error("states must have at least one coordinate");
    for (const auto& x : states) {
        if (x.size() != d)
            throw dimension_mismatch("states of mixed dimension in enumerated space");
        for (auto v : x)
            if (v < 0) throw validation_error("negative count in state " + state_str(x));
    }
    std::sort(states.begin(), states.end());
    auto dup = std::adjacent_find(states.begin(), states.end());
    if (dup != states.end())
        throw validation_error("duplicate state " + state_str(*dup) + " in enumerated space");
    state_space s;
    s.kind_ = kind_t::enumerated;
    s.dim_ = int(d);
    s.states_ = std::move(states);
    return s;
}

state_space state_space::constrained(int dim, std::vector<linear_constraint> equalities,
                                     std::vector<linear_constraint> inequalities,
                                     std::vector<std::optional<std::int64_t>> caps) {
    if (dim < 1) throw validation_error("state space needs dim >= 1");
    for (const auto* cs : {&equalities, &inequalities})
        for (const auto& c : *cs)
            if (int(c.coeffs.size()) != dim)
                throw dimension_mismatch("constraint coefficient count != dim");
    if (!caps.empty() && int(caps.size()) != dim)
        throw dimension_mismatch("cap count != dim");
    for (const auto& c : caps)
        if (c && *c < 0) throw validation_error("negative coordinate cap");
    state_space s;
    s.kind_ = kind_t::constrained;
    s.dim_ = dim;
    s.equalities_ = std::move(equalities);
    s.inequalities_ = std::move(inequalities);
    s.caps_ = std::move(caps);
    if (s.caps_.empty()) s.caps_.assign(dim, std::nullopt);
    return s;
}

state_space state_space::box(int dim, std::vector<std::optional<std::int64_t>> caps) {
    auto s = constrained(dim, {}, {}, std::move(caps));
    s.kind_ = kind_t::box;
    return s;
}

bool state_space::contains(const state& x) const {
    if (int(x.size()) != dim_) throw dimension_mismatch("state has wrong dimension");
    for (auto v : x)
        if (v < 0) return false;
    if (kind_ == kind_t::enumerated)
        return std::binary_search(states_.begin(), states_.end(), x);
    for (std::size_t i = 0; i < caps_.size(); ++i)
        if (caps_[i] && x[i] > *caps_[i]) return false;
    for (const auto& c : equalities_) {
        std::int64_t acc = 0;
        for (int i = 0; i < dim_; ++i) acc += c.coeffs[i] * x[i];
        if (acc != c.value) return false;
    }
    for (const auto& c : inequalities_) {
        std::int64_t acc = 0;
        for (int i = 0; i < dim_; ++i) acc += c.coeffs[i] * x[i];
        if (acc > c.value) return false;
    }
    return true;
}

state_space state_space::truncated(std::int64_t cap) const {
    if (cap < 0) throw validation_error("truncation cap must be nonnegative");
    state_space s = *this;
    if (kind_ == kind_t::enumerated) {
        std::vector<state> kept;
        for (const auto& x : states_) {
            bool inside = true;
            for (auto v : x)
                if (v > cap) inside = false;
            if (inside) kept.push_back(x);
        }
        if (kept.empty())
            throw validation_error("truncation cap " + std::to_string(cap) +
                                   " removes every state");
        s.states_ = std::move(kept);
        return s;
    }
    if (s.caps_.empty()) s.caps_.assign(dim_, std::nullopt);
    for (auto& c : s.caps_) c = c ? std::min(*c, cap) : cap;
    return s;
}

// ------------------------------------------------------------------- network

network::network(std::vector<std::string> species,
                 std::vector<std::pair<std::string, param_value>> params,
                 std::vector<reaction> reactions, state_space space)
    : species_(std::move(species)), reactions_(std::move(reactions)), space_(std::move(space)) {
    std::sort(params.begin(), params.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < params.size(); ++i)
        if (params[i].first == params[i + 1].first)
            throw validation_error("duplicate parameter '" + params[i].first + "'");
    for (const auto& [name, pv] : params) {
        param_names_.push_back(name);
        param_values_.push_back(pv.value);
        param_exacts_.push_back(pv.exact);
    }
    validate_and_compile();
}

void network::validate_and_compile() {
    const int d = dim();
    if (d == 0) throw validation_error("network needs at least one species");
    {
        std::set<std::string> seen;
        for (const auto& s : species_) {
            if (s.empty()) throw validation_error("empty species name");
            if (!seen.insert(s).second)
                throw validation_error("duplicate species name '" + s + "'");
        }
    }
    for (const auto& name : param_names_) {
        if (name.empty()) throw validation_error("empty parameter name");
        if (name.size() >= 2 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos)
            throw validation_error("parameter name '" + name +
                                   "' collides with a state variable");
    }
    for (std::size_t i = 0; i < param_values_.size(); ++i)
        if (!std::isfinite(param_values_[i]))
            throw validation_error("parameter '" + param_names_[i] + "' is not finite");
    if (reactions_.empty()) throw validation_error("network has no reactions");
    if (space_.dim() != d)
        throw dimension_mismatch("state space dimension != species count");

    compiled_.clear();
    compiled_.reserve(reactions_.size());
    for (std::size_t r = 0; r < reactions_.size(); ++r) {
        const reaction& rx = reactions_[r];
        if (int(rx.reactant.size()) != d || int(rx.product.size()) != d)
            throw dimension_mismatch("reaction " + std::to_string(r + 1) +
                                     " has wrong complex dimension");
        for (auto v : rx.reactant)
            if (v < 0) throw validation_error("negative reactant count");
        for (auto v : rx.product)
            if (v < 0) throw validation_error("negative product count");
        if (rx.reactant == rx.product)
            throw validation_error("reaction " + std::to_string(r + 1) +
                                   " has zero net change");

        compiled_rate c;
        if (rx.rate.kind == rate_law::kind_t::mass_action) {
            c.mass_action = true;
            if (!rx.rate.param_name.empty()) {
                auto it = std::lower_bound(param_names_.begin(), param_names_.end(),
                                           rx.rate.param_name);
                if (it == param_names_.end() || *it != rx.rate.param_name)
                    throw validation_error("unknown rate constant '" + rx.rate.param_name + "'");
                auto idx = std::size_t(it - param_names_.begin());
                c.kappa = param_values_[idx];
                c.kappa_exact = param_exacts_[idx];
            } else {
                c.kappa = rx.rate.literal.value;
                c.kappa_exact = rx.rate.literal.exact;
            }
            if (!(c.kappa >= 0.0) || !std::isfinite(c.kappa))
                throw validation_error("rate constant of reaction " + std::to_string(r + 1) +
                                       " must be finite and nonnegative");
        } else {
            c.mass_action = false;
            c.expr = expression::parse(rx.rate.expr_text, d, param_names_);
            if (c.expr.is_boolean())
                throw validation_error("propensity of reaction " + std::to_string(r + 1) +
                                       " is a predicate, not a number");
        }
        compiled_.push_back(std::move(c));
    }
}

bool network::has_param(const std::string& name) const {
    return std::binary_search(param_names_.begin(), param_names_.end(), name);
}

double network::param(const std::string& name) const {
    auto it = std::lower_bound(param_names_.begin(), param_names_.end(), name);
    if (it == param_names_.end() || *it != name)
        throw validation_error("unknown parameter '" + name + "'");
    return param_values_[std::size_t(it - param_names_.begin())];
}

network network::with_param(const std::string& name, param_value v) const {
    if (!has_param(name)) throw validation_error("unknown parameter '" + name + "'");
    std::vector<std::pair<std::string, param_value>> params;
    for (std::size_t i = 0; i < param_names_.size(); ++i) {
        if (param_names_[i] == name)
            params.emplace_back(name, v);
        else
            params.emplace_back(param_names_[i],
                                param_value{param_values_[i], param_exacts_[i]});
    }
    return network(species_, std::move(params), reactions_, space_);
}

network network::truncated(std::int64_t cap) const {
    std::vector<std::pair<std::string, param_value>> params;
    for (std::size_t i = 0; i < param_names_.size(); ++i)
        params.emplace_back(param_names_[i], param_value{param_values_[i], param_exacts_[i]});
    return network(species_, std::move(params), reactions_, space_.truncated(cap));
}

std::int64_t falling_factorial(std::int64_t x, std::int64_t k) {
    std::int64_t acc = 1;
    for (std::int64_t i = 0; i < k; ++i) {
        if (x - i <= 0) return 0;
        acc *= x - i;
    }
    return acc;
}

double network::reaction_rate(int r, const state& x) const {
    const compiled_rate& c = compiled_[std::size_t(r)];
    double rate;
    if (c.mass_action) {
        const state& req = reactions_[std::size_t(r)].reactant;
        double prod = c.kappa;
        for (int i = 0; i < dim() && prod != 0.0; ++i)
            prod *= double(falling_factorial(x[std::size_t(i)], req[std::size_t(i)]));
        rate = prod;
    } else {
        rate = c.expr.eval(x.data(), param_values_);
    }
    if (std::isnan(rate) || rate < 0.0)
        throw evaluation_error("reaction " + std::to_string(r + 1) +
                               " has invalid propensity at " + state_str(x));
    return rate;
}

std::optional<rational> network::reaction_rate_exact(int r, const state& x) const {
    const compiled_rate& c = compiled_[std::size_t(r)];
    if (c.mass_action) {
        if (!c.kappa_exact) return std::nullopt;
        rational acc = *c.kappa_exact;
        const state& req = reactions_[std::size_t(r)].reactant;
        for (int i = 0; i < dim(); ++i) {
            auto f = rat_mul(acc, rational::from_int(
                                      falling_factorial(x[std::size_t(i)], req[std::size_t(i)])));
            if (!f) return std::nullopt;
            acc = *f;
            if (acc.is_zero()) break;
        }
        return acc;
    }
    return c.expr.eval_exact(x.data(), param_exacts_);
}

expression network::compile_predicate(const std::string& text) const {
    auto e = expression::parse(text, dim(), param_names_);
    if (!e.is_boolean())
        throw validation_error("predicate \"" + text + "\" is not a condition");
    return e;
}

expression network::compile_observable(const std::string& text) const {
    auto e = expression::parse(text, dim(), param_names_);
    if (e.is_boolean())
        throw validation_error("observable \"" + text + "\" must be numeric");
    return e;
}

// ------------------------------------------------------------- net structure

net_structure derive_net_structure(const network& net) {
    std::map<state, std::vector<int>> by_net;
    for (std::size_t r = 0; r < net.reactions().size(); ++r) {
        const auto& rx = net.reactions()[r];
        state v(rx.product.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = rx.product[i] - rx.reactant[i];
        by_net[v].push_back(int(r));
    }
    net_structure ns;
    for (auto& [v, members] : by_net) {
        ns.vectors.push_back(v);
        ns.members.push_back(std::move(members));
    }
    return ns;
}

// ------------------------------------------------------------------- rates

void rate_vector_into(const network& net, const net_structure& ns, const state& x,
                      std::vector<double>& out) {
    out.assign(std::size_t(ns.count()), 0.0);
    state target(x.size());
    for (int j = 0; j < ns.count(); ++j) {
        const state& v = ns.vectors[std::size_t(j)];
        for (std::size_t i = 0; i < x.size(); ++i) target[i] = x[i] + v[i];
        if (!net.space().contains(target)) continue;
        double sum = 0.0;
        for (int r : ns.members[std::size_t(j)]) sum += net.reaction_rate(r, x);
        out[std::size_t(j)] = sum;
    }
}

std::vector<double> rate_vector(const network& net, const net_structure& ns, const state& x) {
    if (!net.space().contains(x))
        throw precondition_failed("rate_vector: state " + state_str(x) +
                                  " is outside the state space");
    std::vector<double> out;
    rate_vector_into(net, ns, x, out);
    return out;
}

std::vector<std::optional<rational>> rate_vector_exact(const network& net,
                                                       const net_structure& ns, const state& x) {
    if (!net.space().contains(x))
        throw precondition_failed("rate_vector_exact: state " + state_str(x) +
                                  " is outside the state space");
    std::vector<std::optional<rational>> out(std::size_t(ns.count()), rational{0, 1});
    state target(x.size());
    for (int j = 0; j < ns.count(); ++j) {
        const state& v = ns.vectors[std::size_t(j)];
        for (std::size_t i = 0; i < x.size(); ++i) target[i] = x[i] + v[i];
        if (!net.space().contains(target)) continue;
        rational acc{0, 1};
        bool ok = true;
        for (int r : ns.members[std::size_t(j)]) {
            auto rr = net.reaction_rate_exact(r, x);
            if (!rr) { ok = false; break; }
            auto s = rat_add(acc, *rr);
            if (!s) { ok = false; break; }
            acc = *s;
        }
        out[std::size_t(j)] = ok ? std::optional<rational>(acc) : std::nullopt;
    }
    return out;
}

generator_row generator_row_at(const network& net, const net_structure& ns, const state& x) {
    if (!net.space().contains(x))
        throw precondition_failed("generator_row_at: state " + state_str(x) +
                                  " is outside the state space");
    std::vector<double> rates;
    rate_vector_into(net, ns, x, rates);
    generator_row row;
    double total = 0.0;
    for (int j = 0; j < ns.count(); ++j) {
        double r = rates[std::size_t(j)];
        if (r <= 0.0) continue;
        state target(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) target[i] = x[i] + ns.vectors[std::size_t(j)][i];
        row.transitions.emplace_back(std::move(target), r);
        total += r;
    }
    row.diagonal = -total;
    return row;
}

// -------------------------------------------------------------- enumeration

std::vector<state> enumerate_space(const state_space& space, std::size_t max_states) {
    if (space.kind() == state_space::kind_t::enumerated) {
        if (space.states().size() > max_states)
            throw cap_exceeded("enumerated space exceeds max_states");
        return space.states();
    }
    const int d = space.dim();
    std::vector<std::int64_t> ub(std::size_t(d), -1); // -1 = unbounded
    for (int i = 0; i < d; ++i)
        if (!space.caps().empty() && space.caps()[std::size_t(i)])
            ub[std::size_t(i)] = *space.caps()[std::size_t(i)];
    auto tighten = [&](const linear_constraint& c) {
        // rows with nonnegative coefficients bound every coordinate they touch
        bool nonneg = true;
        for (auto a : c.coeffs)
            if (a < 0) nonneg = false;
        if (!nonneg || c.value < 0) return;
        for (int i = 0; i < d; ++i) {
            if (c.coeffs[std::size_t(i)] > 0) {
                std::int64_t b = c.value / c.coeffs[std::size_t(i)];
                if (ub[std::size_t(i)] < 0 || b < ub[std::size_t(i)]) ub[std::size_t(i)] = b;
            }
        }
    };
    for (const auto& c : space.equalities()) tighten(c);
    for (const auto& c : space.inequalities()) tighten(c);
    for (int i = 0; i < d; ++i)
        if (ub[std::size_t(i)] < 0)
            throw infinite_space("coordinate x" + std::to_string(i + 1) +
                                 " is unbounded; supply a truncation cap");
    __int128 volume = 1;
    for (int i = 0; i < d; ++i) {
        volume *= __int128(ub[std::size_t(i)] + 1);
        if (volume > __int128(2'000'000'000))
            throw cap_exceeded("enumeration scan volume is too large");
    }
    std::vector<state> out;
    state x(std::size_t(d), 0);
    while (true) {
        if (space.contains(x)) {
            out.push_back(x);
            if (out.size() > max_states)
                throw cap_exceeded("state space has more than " +
                                   std::to_string(max_states) + " states");
        }
        int i = d - 1;
        while (i >= 0 && x[std::size_t(i)] == ub[std::size_t(i)]) {
            x[std::size_t(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++x[std::size_t(i)];
    }
    return out;
}

std::vector<state> enumerate_states(const network& net, std::size_t max_states) {
    return enumerate_space(net.space(), max_states);
}

} // namespace scrn
