#include "scrn/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "scrn/errors.hpp"
#include "scrn/expr.hpp"
#include "scrn/rng.hpp"

namespace scrn {

namespace {

std::string state_text(const state& x) {
    std::string out = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(x[i]);
    }
    return out + ")";
}

struct running_stats {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        double delta = v - mean;
        mean += delta / double(n);
        m2 += delta * (v - mean);
    }
    double std_error() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / (double(n) * double(n - 1)));
    }
};


} // namespace

// results must land in per-replicate slots so that aggregation order is
// independent of scheduling
void run_replicates(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    int workers = std::max(1, threads);
    if (std::int64_t(workers) > n) workers = int(n);
    if (workers <= 1) {
        for (std::int64_t r = 0; r < n; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::int64_t r = next.fetch_add(1);
                if (r >= n) return;
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

state_predicate in_set(std::vector<state> states) {
    std::sort(states.begin(), states.end());
    return [set = std::move(states)](const state& x) {
        return std::binary_search(set.begin(), set.end(), x);
    };
}

state_predicate predicate_from_text(const network& net, const std::string& text) {
    expression pred = net.compile_predicate(text);
    return [pred = std::move(pred), params = net.param_values()](const state& x) {
        return pred.eval_bool(x.data(), params);
    };
}

std::optional<double> first_passage(const sample_path& path, const state_predicate& gamma) {
    if (path.events.empty())
        throw precondition_failed("first passage needs a path recorded with events");
    for (const auto& [t, x] : path.events)
        if (gamma(x)) return t;
    return std::nullopt;
}

mfpt_estimate estimate_mfpt(const network& net, const state& x0, const state_predicate& gamma,
                            double horizon, std::int64_t n, std::uint64_t seed, int threads) {
    if (n < 1) throw precondition_failed("at least one replicate is required");
    std::vector<std::optional<double>> hits;
    hits.resize(std::size_t(n));
    run_replicates(n, threads, [&](std::int64_t r) {
        hits[std::size_t(r)] =
            simulate_ssa(net, x0, horizon, seed, std::uint64_t(r), false, gamma).hit_time;
    });
    mfpt_estimate est;
    est.n_samples = n;
    running_stats stats;
    for (const auto& hit : hits) {
        if (hit)
            stats.add(*hit);
        else
            ++est.n_censored;
    }
    if (stats.n == 0)
        throw all_censored("no replicate reached the target before the horizon " +
                           std::to_string(horizon));
    est.mean = stats.mean;
    est.std_error = stats.std_error();
    return est;
}

stochastic_order_report usual_stochastic_order_test(const std::vector<double>& samples_a,
                                                    const std::vector<double>& samples_b,
                                                    std::int64_t total_a, std::int64_t total_b) {
    if (samples_a.empty() || samples_b.empty())
        throw precondition_failed("both sample sets must be non-empty");
    std::int64_t na = total_a > 0 ? total_a : std::int64_t(samples_a.size());
    std::int64_t nb = total_b > 0 ? total_b : std::int64_t(samples_b.size());
    if (na < std::int64_t(samples_a.size()) || nb < std::int64_t(samples_b.size()))
        throw precondition_failed("sample totals cannot be smaller than the listed samples");

    std::vector<double> a = samples_a, b = samples_b;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    stochastic_order_report report;
    report.dominates = true;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() || ib < b.size()) {
        double t;
        if (ib == b.size() || (ia < a.size() && a[ia] <= b[ib]))
            t = a[ia];
        else
            t = b[ib];
        while (ia < a.size() && a[ia] <= t) ++ia;
        while (ib < b.size() && b[ib] <= t) ++ib;
        // F_a(t) >= F_b(t) as integers: ka * nb >= kb * na
        auto ka = std::int64_t(ia), kb = std::int64_t(ib);
        if (ka * nb < kb * na) {
            report.dominates = false;
            double gap = double(kb) / double(nb) - double(ka) / double(na);
            report.max_violation = std::max(report.max_violation, gap);
        }
    }
    return report;
}

mfpt_compare_report compare_mfpt_coupled(const coupled_pair& pair, const state& x0,
                                         const state& x0_variant, const state_predicate& gamma,
                                         const coupled_sim_config& cfg, std::int64_t n,
                                         set_direction direction, std::size_t max_states,
                                         int threads) {
    if (n < 1) throw precondition_failed("at least one replicate is required");

    std::vector<state> space = enumerate_space(pair.base.space(), max_states);
    std::vector<state> members;
    for (const state& x : space)
        if (gamma(x)) members.push_back(x);
    if (members.empty())
        throw precondition_failed("the target set matches no state of the space");

    mfpt_compare_report report;
    auto resolve = [&]() {
        if (direction != set_direction::decreasing) {
            if (verify_increasing(pair.order, space, members).ok)
                return set_direction::increasing;
            if (direction == set_direction::increasing)
                throw direction_unknown("the target set is not increasing under the order");
        }
        if (verify_decreasing(pair.order, space, members).ok)
            return set_direction::decreasing;
        if (direction == set_direction::decreasing)
            throw direction_unknown("the target set is not decreasing under the order");
        throw direction_unknown("the target set is neither increasing nor decreasing");
    };
    report.direction = resolve();
    bool increasing = report.direction == set_direction::increasing;

    report.n = n;
    report.base.n_samples = n;
    report.variant.n_samples = n;
    std::vector<std::pair<std::optional<double>, std::optional<double>>> hits;
    hits.resize(std::size_t(n));
    run_replicates(n, threads, [&](std::int64_t r) {
        coupled_sim_config rep = cfg;
        rep.stream = cfg.stream + std::uint64_t(r);
        rep.keep_paths = false;
        rep.stop_target = gamma;
        coupled_run run = simulate_coupled(pair, x0, x0_variant, rep);
        hits[std::size_t(r)] = {run.base.hit_time, run.variant.hit_time};
    });
    report.pairs.reserve(std::size_t(n));
    running_stats base_stats, variant_stats, diff_stats;
    for (std::int64_t r = 0; r < n; ++r) {
        const auto& tb = hits[std::size_t(r)].first;
        const auto& tv = hits[std::size_t(r)].second;
        report.pairs.emplace_back(tb, tv);

        if (tb) base_stats.add(*tb); else ++report.base.n_censored;
        if (tv) variant_stats.add(*tv); else ++report.variant.n_censored;
        if (tb && tv) {
            ++report.n_both_hit;
            diff_stats.add(*tb - *tv);
        }

        // censor-consistent pathwise check: the smaller side may not hit
        // strictly later, and may not be the only censored one
        bool ok;
        if (tb && tv)
            ok = increasing ? *tv <= *tb : *tb <= *tv;
        else if (!tb && !tv)
            ok = true;
        else
            ok = increasing ? tv.has_value() : tb.has_value();
        if (ok) ++report.pathwise_ok; else ++report.pathwise_violations;
    }

    if (base_stats.n > 0) {
        report.base.mean = base_stats.mean;
        report.base.std_error = base_stats.std_error();
    }
    if (variant_stats.n > 0) {
        report.variant.mean = variant_stats.mean;
        report.variant.std_error = variant_stats.std_error();
    }
    if (diff_stats.n > 0) {
        report.paired_mean_diff = diff_stats.mean;
        report.paired_std_error = diff_stats.std_error();
    }

    std::vector<double> base_hits, variant_hits;
    for (const auto& [tb, tv] : report.pairs) {
        if (tb) base_hits.push_back(*tb);
        if (tv) variant_hits.push_back(*tv);
    }
    const auto& small = increasing ? variant_hits : base_hits;
    const auto& large = increasing ? base_hits : variant_hits;
    if (small.empty())
        report.cdf.dominates = large.empty();
    else if (large.empty())
        report.cdf.dominates = true;
    else
        report.cdf = usual_stochastic_order_test(small, large, n, n);
    return report;
}

distribution_table make_distribution(const std::map<state, double>& weight) {
    double sum = 0.0;
    for (const auto& [x, w] : weight) {
        if (w < 0.0)
            throw precondition_failed("negative weight at state " + state_text(x));
        sum += w;
    }
    if (!(sum > 0.0)) throw precondition_failed("total weight must be positive");
    distribution_table table;
    for (const auto& [x, w] : weight) {
        if (w == 0.0) continue;
        table.support.push_back(x);
        table.mass.push_back(w / sum);
    }
    return table;
}

distribution_table empirical_stationary(const network& net, const state& x0, double burn_in,
                                        double total_time, std::uint64_t seed,
                                        std::uint64_t stream) {
    if (!net.space().contains(x0))
        throw precondition_failed("start state must lie in the state space");
    if (!(burn_in >= 0.0) || !(total_time > burn_in) || !std::isfinite(total_time))
        throw precondition_failed("need 0 <= burn_in < total_time < infinity");

    net_structure ns = derive_net_structure(net);
    counter_rng rng(seed, stream);
    std::map<state, double> occupation;
    state x = x0;
    std::vector<double> rates;
    double t = 0.0;
    while (t < total_time) {
        rate_vector_into(net, ns, x, rates);
        double total = std::accumulate(rates.begin(), rates.end(), 0.0);
        double t_next = total == 0.0 ? total_time : t + rng.next_exponential(total);
        double hold = std::min(t_next, total_time) - std::max(t, burn_in);
        if (hold > 0.0) occupation[x] += hold;
        if (total == 0.0 || t_next >= total_time) break;
        t = t_next;
        double pick = rng.next_uniform() * total;
        double cum = 0.0;
        int j = ns.count() - 1;
        for (int i = 0; i < ns.count(); ++i) {
            cum += rates[std::size_t(i)];
            if (pick < cum) {
                j = i;
                break;
            }
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += ns.vectors[std::size_t(j)][i];
    }
    return make_distribution(occupation);
}

distribution_table product_form_stationary(std::int64_t e_tot, const std::array<double, 6>& kappa,
                                           std::int64_t cap_x1, std::int64_t cap_x2) {
    for (double k : kappa)
        if (!(k > 0.0) || !std::isfinite(k))
            throw invalid_params("all six rate constants must be positive and finite");
    if (e_tot < 0 || cap_x1 < 0 || cap_x2 < 0)
        throw invalid_params("the enzyme total and the caps must be nonnegative");

    double c1 = kappa[4] / kappa[5];
    double c2 = kappa[0] * kappa[2] * kappa[4] / (kappa[1] * kappa[3] * kappa[5]);
    double ratio = kappa[0] * kappa[4] / (kappa[1] * kappa[5]);
    double c3 = 1.0 / (1.0 + ratio);
    double c4 = ratio / (1.0 + ratio);

    distribution_table table;
    std::vector<double> logw;
    for (std::int64_t x1 = 0; x1 <= cap_x1; ++x1)
        for (std::int64_t x2 = 0; x2 <= cap_x2; ++x2)
            for (std::int64_t x3 = 0; x3 <= e_tot; ++x3) {
                std::int64_t x4 = e_tot - x3;
                double lw = double(x1) * std::log(c1) - std::lgamma(double(x1) + 1.0) +
                            double(x2) * std::log(c2) - std::lgamma(double(x2) + 1.0) +
                            std::lgamma(double(e_tot) + 1.0) + double(x3) * std::log(c3) +
                            double(x4) * std::log(c4) - std::lgamma(double(x3) + 1.0) -
                            std::lgamma(double(x4) + 1.0);
                table.support.push_back({x1, x2, x3, x4});
                logw.push_back(lw);
            }
    double top = *std::max_element(logw.begin(), logw.end());
    double sum = 0.0;
    table.mass.resize(logw.size());
    for (std::size_t i = 0; i < logw.size(); ++i) {
        table.mass[i] = std::exp(logw[i] - top);
        sum += table.mass[i];
    }
    for (double& m : table.mass) m /= sum;
    return table;
}

double stationary_set_mass(const distribution_table& dist, const state_predicate& gamma) {
    double mass = 0.0;
    for (std::size_t i = 0; i < dist.support.size(); ++i)
        if (gamma(dist.support[i])) mass += dist.mass[i];
    return mass;
}

double tv_distance(const distribution_table& a, const distribution_table& b) {
    double sum = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.support.size() || ib < b.support.size()) {
        if (ib == b.support.size() ||
            (ia < a.support.size() && a.support[ia] < b.support[ib])) {
            sum += a.mass[ia];
            ++ia;
        } else if (ia == a.support.size() || b.support[ib] < a.support[ia]) {
            sum += b.mass[ib];
            ++ib;
        } else {
            sum += std::abs(a.mass[ia] - b.mass[ib]);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * sum;
}

namespace {

// QV(x) over the net's own space: rates vanish on jumps that would leave it
double qv_at(const network& net, const net_structure& ns, const expression& v, const state& x,
             std::vector<double>& rates, state& scratch) {
    rate_vector_into(net, ns, x, rates);
    const auto& params = net.param_values();
    double vx = v.eval(x.data(), params);
    double acc = 0.0;
    for (int j = 0; j < ns.count(); ++j) {
        if (rates[std::size_t(j)] <= 0.0) continue;
        scratch = x;
        for (std::size_t i = 0; i < scratch.size(); ++i)
            scratch[i] += ns.vectors[std::size_t(j)][i];
        acc += rates[std::size_t(j)] * (v.eval(scratch.data(), params) - vx);
    }
    return acc;
}

} // namespace

double drift_value(const network& net, const std::string& v_text, const state& x) {
    expression v = net.compile_observable(v_text);
    net_structure ns = derive_net_structure(net);
    std::vector<double> rates;
    state scratch;
    return qv_at(net, ns, v, x, rates, scratch);
}

drift_report verify_drift(const network& net, const lyapunov_spec& spec, std::int64_t truncation,
                          rate_tolerance tol, std::size_t max_states) {
    if (truncation < 0) throw precondition_failed("the truncation cap must be nonnegative");
    expression v = net.compile_observable(spec.v_text);
    net_structure ns = derive_net_structure(net);
    std::vector<state> sweep = enumerate_space(net.space().truncated(truncation), max_states);

    drift_report report;
    report.mode = spec.mode;
    report.truncation = truncation;
    report.c = spec.c;
    report.d = spec.d;
    report.c_prime = spec.c_prime;
    report.d_prime = spec.d_prime;

    auto interior = [&](const std::vector<state>& set) {
        for (const state& x : set)
            for (std::int64_t coord : x)
                if (coord >= truncation) return false;
        return true;
    };
    auto slack = [&](double lhs, double rhs) {
        return std::max(tol.abs, tol.rel * std::max(std::abs(lhs), std::abs(rhs)));
    };

    std::vector<double> rates;
    state scratch;
    const auto& params = net.param_values();
    std::vector<double> qvs(sweep.size());
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        double vx = v.eval(sweep[i].data(), params);
        if (vx < -tol.abs) {
            report.note = "V is negative at state " + state_text(sweep[i]);
            report.states = std::int64_t(i);
            return report;
        }
        qvs[i] = qv_at(net, ns, v, sweep[i], rates, scratch);
    }
    report.states = std::int64_t(sweep.size());

    bool ok = true;
    auto check_state = [&](std::size_t i, double rhs) {
        double margin = qvs[i] - rhs;
        if (!report.worst_state || margin > report.worst_margin) {
            report.worst_state = sweep[i];
            report.worst_margin = margin;
        }
        if (margin > slack(qvs[i], rhs)) ok = false;
    };

    if (spec.mode == drift_mode::exponential) {
        for (std::size_t i = 0; i < sweep.size(); ++i)
            check_state(i, -spec.c_prime * v.eval(sweep[i].data(), params) + spec.d_prime);
        report.pass = ok;
        return report;
    }

    if (spec.set_c) {
        std::vector<state> members = *spec.set_c;
        std::sort(members.begin(), members.end());
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            bool inside = std::binary_search(members.begin(), members.end(), sweep[i]);
            check_state(i, -spec.c + (inside ? spec.d : 0.0));
        }
        report.set_c = std::move(members);
        report.set_interior = interior(report.set_c);
        report.pass = ok;
        return report;
    }

    // derive the exception set from the drift itself; the verdict is then
    // whether it stays strictly away from the artificial cap
    double eps = std::max(tol.abs, tol.rel * std::abs(spec.c));
    double worst_inside = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        check_state(i, -spec.c);
        if (qvs[i] > -spec.c + eps) {
            report.set_c.push_back(sweep[i]);
            worst_inside = std::max(worst_inside, qvs[i]);
        }
    }
    report.d = report.set_c.empty() ? 0.0 : spec.c + worst_inside;
    report.set_interior = interior(report.set_c);
    report.pass = report.set_interior;
    return report;
}

std::vector<state> reachable_states(const network& net, const state& x0,
                                    std::size_t max_states) {
    if (!net.space().contains(x0))
        throw precondition_failed("start state must lie in the state space");
    net_structure ns = derive_net_structure(net);
    std::set<state> seen{x0};
    std::vector<state> frontier{x0};
    std::vector<double> rates;
    while (!frontier.empty()) {
        state x = std::move(frontier.back());
        frontier.pop_back();
        rate_vector_into(net, ns, x, rates);
        for (int j = 0; j < ns.count(); ++j) {
            if (rates[std::size_t(j)] <= 0.0) continue;
            state y = x;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += ns.vectors[std::size_t(j)][i];
            if (seen.insert(y).second) {
                if (seen.size() > max_states)
                    throw cap_exceeded("reachable set exceeds " + std::to_string(max_states) +
                                       " states");
                frontier.push_back(std::move(y));
            }
        }
    }
    return {seen.begin(), seen.end()};
}

} // namespace scrn
