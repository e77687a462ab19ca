#include "scrn/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "scrn/errors.hpp"
#include "scrn/order.hpp"

namespace scrn {

double choose_lambda(const coupled_pair& pair, const std::vector<state>& states) {
    if (states.empty()) throw precondition_failed("rate bound needs a nonempty state list");
    const int n = pair.nets.count();
    double sup = 0.0;
    std::vector<double> buf;
    for (const auto& x : states) {
        rate_vector_into(pair.base, pair.nets, x, buf);
        sup = std::max(sup, std::accumulate(buf.begin(), buf.end(), 0.0));
        rate_vector_into(pair.variant, pair.nets, x, buf);
        sup = std::max(sup, std::accumulate(buf.begin(), buf.end(), 0.0));
    }
    double lambda = 1.0 + double(n) * sup;
    if (!std::isfinite(lambda))
        throw unbounded_rates("total jump rate is not finite over the swept states");
    return lambda;
}

namespace {

// slot scan shared by both chains; returns the net index or -1 for no jump.
// The per-index slot anchors at j/n; a grouped slot anchors at the block
// edge and packs its members contiguously from there.
struct slot_map {
    int n = 0;
    bool grouped = false;
    std::vector<std::vector<int>> blocks; // grouped only, scan order
    std::vector<int> block_of_position;   // position -> block index
    std::vector<int> block_edge;          // block -> first position

    void init_per_index(int nets) {
        n = nets;
        grouped = false;
    }

    void init_grouped(int nets, const group_partition& partition) {
        n = nets;
        grouped = true;
        blocks = partition.blocks;
        block_of_position.assign(std::size_t(n), 0);
        block_edge.assign(blocks.size(), 0);
        int pos = 0;
        for (int k = 0; k < int(blocks.size()); ++k) {
            block_edge[std::size_t(k)] = pos;
            for (std::size_t q = 0; q < blocks[std::size_t(k)].size(); ++q)
                block_of_position[std::size_t(pos++)] = k;
        }
    }

    int apply(const std::vector<double>& rates, double lambda, double u) const {
        int pos = std::min(int(u * n), n - 1);
        if (!grouped) {
            double offset = u - double(pos) / n;
            return offset < rates[std::size_t(pos)] / lambda ? pos : -1;
        }
        int k = block_of_position[std::size_t(pos)];
        double offset = u - double(block_edge[std::size_t(k)]) / n;
        double cum = 0.0;
        for (int j : blocks[std::size_t(k)]) {
            cum += rates[std::size_t(j)] / lambda;
            if (offset < cum) return j;
        }
        return -1;
    }
};

state jump(const state& x, const state& v) {
    state y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += v[i];
    return y;
}

} // namespace

state phi_map(const network& net, const net_structure& ns, double lambda, const state& x,
              double u) {
    slot_map slots;
    slots.init_per_index(ns.count());
    auto rates = rate_vector(net, ns, x);
    int j = slots.apply(rates, lambda, std::min(u, std::nextafter(1.0, 0.0)));
    return j < 0 ? x : jump(x, ns.vectors[std::size_t(j)]);
}

state psi_map(const network& net, const net_structure& ns, const group_partition& partition,
              double lambda, const state& x, double u) {
    partition.validate(ns.count());
    slot_map slots;
    slots.init_grouped(ns.count(), partition);
    auto rates = rate_vector(net, ns, x);
    int j = slots.apply(rates, lambda, std::min(u, std::nextafter(1.0, 0.0)));
    return j < 0 ? x : jump(x, ns.vectors[std::size_t(j)]);
}

namespace {

std::int64_t max_coord(const state& x) {
    std::int64_t m = 0;
    for (auto c : x) m = std::max(m, c);
    return m;
}

bool within_cap(const state& x, std::int64_t cap) {
    for (auto c : x)
        if (c > cap) return false;
    return true;
}

} // namespace

coupled_run simulate_coupled(const coupled_pair& pair, const state& x0,
                             const state& x0_variant, const coupled_sim_config& cfg) {
    const auto& space = pair.base.space();
    if (!space.contains(x0) || !space.contains(x0_variant))
        throw precondition_failed("coupled start states must lie in the state space");
    if (!preceq(pair.order, x0, x0_variant))
        throw precondition_failed("coupled start states must be ordered");
    if (cfg.horizon < 0 || !std::isfinite(cfg.horizon))
        throw precondition_failed("horizon must be finite and nonnegative");

    slot_map slots;
    if (cfg.mode == coupling_mode::grouped) {
        if (!cfg.partition)
            throw precondition_failed("grouped coupling needs a group partition");
        cfg.partition->validate(pair.nets.count());
        slots.init_grouped(pair.nets.count(), *cfg.partition);
    } else {
        slots.init_per_index(pair.nets.count());
    }

    // rate bound domain: the whole space when it enumerates, otherwise an
    // expanding box that always contains both current states
    bool boxed = false;
    std::int64_t cap = 0;
    double lambda = 0.0;
    auto rebound = [&]() {
        std::vector<state> states = enumerate_space(
            boxed ? space.truncated(cap) : space, cfg.max_box_states);
        lambda = choose_lambda(pair, states);
    };
    auto start_boxed = [&]() {
        boxed = true;
        cap = std::max({cfg.truncation.initial_cap, max_coord(x0), max_coord(x0_variant)});
        rebound();
    };
    try {
        rebound();
    } catch (const infinite_space&) {
        start_boxed();
    } catch (const cap_exceeded&) {
        start_boxed();
    }

    coupled_run run;
    counter_rng rng(cfg.seed, cfg.stream);
    state xb = x0, xv = x0_variant;
    std::vector<double> rb, rv;
    rate_vector_into(pair.base, pair.nets, xb, rb);
    rate_vector_into(pair.variant, pair.nets, xv, rv);
    double t = 0.0;
    run.ordered_throughout = true;
    if (cfg.keep_paths) {
        run.base.events.emplace_back(0.0, xb);
        run.variant.events.emplace_back(0.0, xv);
    }

    // latch first entry into the stop target per chain; true once both hit
    auto note_hits = [&](double now) {
        if (!cfg.stop_target) return false;
        if (!run.base.hit_time && cfg.stop_target(xb)) run.base.hit_time = now;
        if (!run.variant.hit_time && cfg.stop_target(xv)) run.variant.hit_time = now;
        return run.base.hit_time.has_value() && run.variant.hit_time.has_value();
    };
    double end_time = cfg.horizon;
    bool stopped = note_hits(0.0);
    if (stopped) end_time = 0.0;

    while (!stopped) {
        double total = std::accumulate(rb.begin(), rb.end(), 0.0) +
                       std::accumulate(rv.begin(), rv.end(), 0.0);
        if (total == 0.0) break; // both chains absorbed; no further events
        double t_next = t + rng.next_exponential(lambda);
        if (t_next > cfg.horizon) break;
        t = t_next;
        ++run.potential_jumps;
        double u = rng.next_uniform();

        int jb = slots.apply(rb, lambda, u);
        int jv = slots.apply(rv, lambda, u);
        bool moved = false;
        if (jb >= 0) {
            xb = jump(xb, pair.nets.vectors[std::size_t(jb)]);
            rate_vector_into(pair.base, pair.nets, xb, rb);
            ++run.accepted_base;
            moved = true;
        }
        if (jv >= 0) {
            xv = jump(xv, pair.nets.vectors[std::size_t(jv)]);
            rate_vector_into(pair.variant, pair.nets, xv, rv);
            ++run.accepted_variant;
            moved = true;
        }

        if (moved && boxed && (!within_cap(xb, cap) || !within_cap(xv, cap))) {
            std::int64_t grown = std::max(
                cap + 1, std::int64_t(std::ceil(double(cap) * cfg.truncation.growth)));
            cap = std::max({grown, max_coord(xb), max_coord(xv)});
            if (cap > cfg.truncation.hard_cap)
                throw truncation_limit("expanding box needs cap " + std::to_string(cap) +
                                       " past the hard cap at time " + std::to_string(t));
            rebound();
            ++run.expansions;
        }

        if (moved && run.ordered_throughout && !preceq(pair.order, xb, xv)) {
            run.ordered_throughout = false;
            run.first_violation_time = t;
        }
        if (cfg.keep_paths) {
            bool tick = cfg.record == record_policy::all_potential_jumps;
            if (tick || jb >= 0) run.base.events.emplace_back(t, xb);
            if (tick || jv >= 0) run.variant.events.emplace_back(t, xv);
        }
        if (moved && note_hits(t)) {
            stopped = true;
            end_time = t;
        }
    }

    if (stopped)
        run.base.terminal = run.variant.terminal = terminal_status::hit_target;
    run.base.final_state = xb;
    run.variant.final_state = xv;
    run.base.final_time = run.variant.final_time = end_time;
    run.lambda_final = lambda;
    run.cap_final = boxed ? cap : 0;
    return run;
}

sample_path simulate_ssa(const network& net, const state& x0, double horizon,
                         std::uint64_t seed, std::uint64_t stream, bool keep_path,
                         const std::function<bool(const state&)>& stop_target) {
    if (!net.space().contains(x0))
        throw precondition_failed("start state must lie in the state space");
    if (horizon < 0 || !std::isfinite(horizon))
        throw precondition_failed("horizon must be finite and nonnegative");
    net_structure ns = derive_net_structure(net);
    counter_rng rng(seed, stream);
    sample_path path;
    state x = x0;
    if (keep_path) path.events.emplace_back(0.0, x);
    std::vector<double> rates;
    double t = 0.0;
    double end_time = horizon;
    bool stopped = stop_target && stop_target(x);
    if (stopped) {
        path.hit_time = 0.0;
        end_time = 0.0;
    }
    while (!stopped) {
        rate_vector_into(net, ns, x, rates);
        double total = std::accumulate(rates.begin(), rates.end(), 0.0);
        if (total == 0.0) break; // absorbed
        double t_next = t + rng.next_exponential(total);
        if (t_next > horizon) break;
        t = t_next;
        double pick = rng.next_uniform() * total;
        double cum = 0.0;
        int j = ns.count() - 1; // fall through to the last direction on float slack
        for (int i = 0; i < ns.count(); ++i) {
            cum += rates[std::size_t(i)];
            if (pick < cum) {
                j = i;
                break;
            }
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += ns.vectors[std::size_t(j)][i];
        if (keep_path) path.events.emplace_back(t, x);
        if (stop_target && stop_target(x)) {
            path.hit_time = t;
            stopped = true;
            end_time = t;
        }
    }
    if (stopped) path.terminal = terminal_status::hit_target;
    path.final_state = x;
    path.final_time = end_time;
    return path;
}

} // namespace scrn
