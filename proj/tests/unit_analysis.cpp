#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "scrn/analysis.hpp"
#include "scrn/coupling.hpp"
#include "scrn/errors.hpp"
#include "scrn/model.hpp"
#include "scrn/order.hpp"
#include "test_models.hpp"

using namespace scrn;
using namespace testnets;

namespace {

coupled_pair enzyme_pair(double k3_base, double k3_variant) {
    return coupled_pair::make(enzyme_net(3, 2, 1, 1, k3_base),
                              enzyme_net(3, 2, 1, 1, k3_variant), enzyme_order());
}

// mean hitting times onto the absorbing target by dense Gaussian elimination:
// R(x) h(x) - sum_y q(x, y) h(y) = 1 on the transient states, h(target) = 0
double solve_mfpt(const network& net, const state& x0, const state& target) {
    std::vector<state> states = enumerate_states(net);
    net_structure ns = derive_net_structure(net);
    std::map<state, int> index;
    std::vector<int> col(states.size(), -1);
    int m = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        index[states[i]] = int(i);
        if (states[i] != target) col[i] = m++;
    }
    std::vector<std::vector<double>> a(std::size_t(m), std::vector<double>(std::size_t(m) + 1));
    std::vector<double> rates;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (col[i] < 0) continue;
        auto row = std::size_t(col[i]);
        rate_vector_into(net, ns, states[i], rates);
        double total = 0.0;
        for (int j = 0; j < ns.count(); ++j) {
            double r = rates[std::size_t(j)];
            if (r <= 0.0) continue;
            total += r;
            state y = states[i];
            for (std::size_t k = 0; k < y.size(); ++k) y[k] += ns.vectors[std::size_t(j)][k];
            int yc = col[std::size_t(index.at(y))];
            if (yc >= 0) a[row][std::size_t(yc)] -= r;
        }
        a[row][row] += total;
        a[row][std::size_t(m)] = 1.0;
    }
    for (int piv = 0; piv < m; ++piv) {
        int best = piv;
        for (int r = piv + 1; r < m; ++r)
            if (std::abs(a[std::size_t(r)][std::size_t(piv)]) >
                std::abs(a[std::size_t(best)][std::size_t(piv)]))
                best = r;
        std::swap(a[std::size_t(piv)], a[std::size_t(best)]);
        for (int r = 0; r < m; ++r) {
            if (r == piv) continue;
            double f = a[std::size_t(r)][std::size_t(piv)] / a[std::size_t(piv)][std::size_t(piv)];
            if (f == 0.0) continue;
            for (int c = piv; c <= m; ++c)
                a[std::size_t(r)][std::size_t(c)] -= f * a[std::size_t(piv)][std::size_t(c)];
        }
    }
    int c0 = col[std::size_t(index.at(x0))];
    REQUIRE(c0 >= 0);
    return a[std::size_t(c0)][std::size_t(m)] / a[std::size_t(c0)][std::size_t(c0)];
}

} // namespace

TEST_CASE("first passage scans recorded paths") {
    network net = enzyme_net(3, 2, 1, 1, 1);
    state s{3, 0, 2, 0};
    sample_path path = simulate_ssa(net, s, 200.0, 42, 0);
    REQUIRE(path.events.size() > 1);

    auto done = predicate_from_text(net, "x2 == 3");
    auto t_hit = first_passage(path, done);
    REQUIRE(t_hit.has_value());
    // the product is absorbing here, so the hit is the last recorded event
    CHECK(*t_hit == path.events.back().first);
    CHECK(path.events.back().second == state{0, 3, 2, 0});

    CHECK(*first_passage(path, predicate_from_text(net, "x1 == 3")) == 0.0);
    CHECK(!first_passage(path, in_set({{3, 0, 0, 2}})).has_value());

    sample_path bare = simulate_ssa(net, s, 1.0, 42, 0, false);
    CHECK_THROWS_AS((void)first_passage(bare, done), precondition_failed);
}

TEST_CASE("stopped simulation reproduces the scanned first passage") {
    network net = enzyme_net(3, 2, 1, 1, 1);
    state s{3, 0, 2, 0};
    auto done = predicate_from_text(net, "x2 >= 2");

    sample_path full = simulate_ssa(net, s, 200.0, 9, 3);
    auto scanned = first_passage(full, done);
    REQUIRE(scanned.has_value());

    sample_path stopped = simulate_ssa(net, s, 200.0, 9, 3, true, done);
    REQUIRE(stopped.hit_time.has_value());
    CHECK(*stopped.hit_time == *scanned);
    CHECK(stopped.terminal == terminal_status::hit_target);
    CHECK(stopped.final_time == *scanned);
    CHECK(stopped.events.back().first == *scanned);
    CHECK(done(stopped.final_state));

    // initial state already in the target
    sample_path zero = simulate_ssa(net, s, 5.0, 9, 3, true, predicate_from_text(net, "x1 >= 1"));
    CHECK(zero.hit_time == 0.0);
    CHECK(zero.final_time == 0.0);
    CHECK(zero.events.size() == 1);
}

TEST_CASE("mfpt estimate matches the exponential oracle") {
    network net = network({"A", "B"}, {p("k", 2.0)},
                          {{{1, 0}, {0, 1}, ma("k")}}, state_space::box(2, {1, 1}));
    state x0{1, 0};

    mfpt_estimate est = estimate_mfpt(net, x0, in_set({{0, 1}}), 50.0, 2000, 1);
    CHECK(est.n_samples == 2000);
    CHECK(est.n_censored == 0);
    CHECK(est.std_error > 0.0);
    CHECK(est.std_error < 0.05);
    CHECK(std::abs(est.mean - 0.5) <= 3.0 * est.std_error);

    mfpt_estimate trivial = estimate_mfpt(net, x0, in_set({x0}), 1.0, 10, 1);
    CHECK(trivial.mean == 0.0);
    CHECK(trivial.std_error == 0.0);
    CHECK(trivial.n_censored == 0);

    CHECK_THROWS_AS((void)estimate_mfpt(net, x0, in_set({{1, 1}}), 2.0, 10, 1), all_censored);
    CHECK_THROWS_AS((void)estimate_mfpt(net, x0, in_set({x0}), 1.0, 0, 1), precondition_failed);
}

TEST_CASE("crossover rate does not move the transit time when the routes balance") {
    // dense solve: same mean transit for a slow and a fast crossover
    state x0{2, 0, 0, 0}, target{0, 0, 0, 2};
    double slow = solve_mfpt(braess_net(2, 1, 3, 1, 3, 0.5), x0, target);
    double fast = solve_mfpt(braess_net(2, 1, 3, 1, 3, 50.0), x0, target);
    CHECK(std::abs(slow - fast) <= 1e-9 * std::max(1.0, std::abs(slow)));

    network net = braess_net(2, 1, 3, 1, 3, 0.5);
    mfpt_estimate est = estimate_mfpt(net, x0, in_set({target}), 200.0, 3000, 3);
    CHECK(est.n_censored == 0);
    CHECK(std::abs(est.mean - slow) <= 3.0 * est.std_error);
}

TEST_CASE("usual stochastic order test compares empirical CDFs exactly") {
    std::vector<double> zeros{0.0, 0.0}, ones{1.0, 1.0};

    auto same = usual_stochastic_order_test(zeros, zeros);
    CHECK(same.dominates);
    CHECK(same.max_violation == 0.0);

    CHECK(usual_stochastic_order_test(zeros, ones).dominates);
    auto flipped = usual_stochastic_order_test(ones, zeros);
    CHECK(!flipped.dominates);
    CHECK(flipped.max_violation == 1.0);

    // ties must not break dominance
    CHECK(usual_stochastic_order_test({1.0, 1.0, 5.0}, {1.0, 3.0, 5.0}).dominates);

    // censored mass widens the denominator past the listed samples
    auto censored = usual_stochastic_order_test({1.0}, {1.0, 2.0}, 2, 2);
    CHECK(!censored.dominates);
    CHECK(censored.max_violation == doctest::Approx(0.5));

    CHECK_THROWS_AS((void)usual_stochastic_order_test({}, ones), precondition_failed);
    CHECK_THROWS_AS((void)usual_stochastic_order_test(ones, zeros, 1, 5), precondition_failed);
}

TEST_CASE("coupled mfpt comparison collapses for identical chains") {
    coupled_pair pair = enzyme_pair(1, 1);
    state s{3, 0, 2, 0};
    coupled_sim_config cfg;
    cfg.horizon = 100.0;
    cfg.seed = 5;
    auto gamma = predicate_from_text(pair.base, "x2 >= 2");

    mfpt_compare_report rep = compare_mfpt_coupled(pair, s, s, gamma, cfg, 64);
    CHECK(rep.direction == set_direction::increasing);
    CHECK(rep.n_both_hit == 64);
    CHECK(rep.pathwise_ok == 64);
    CHECK(rep.pathwise_violations == 0);
    for (const auto& [tb, tv] : rep.pairs) {
        REQUIRE(tb.has_value());
        CHECK(*tb == *tv);
    }
    CHECK(rep.paired_mean_diff == 0.0);
    CHECK(rep.paired_std_error == 0.0);
    CHECK(rep.base.mean == rep.variant.mean);
    CHECK(rep.cdf.dominates);
}

TEST_CASE("coupled mfpt comparison orders a faster variant pathwise") {
    coupled_pair pair = enzyme_pair(1, 2);
    state s{3, 0, 2, 0};
    coupled_sim_config cfg;
    cfg.horizon = 100.0;
    cfg.seed = 6;
    auto gamma = predicate_from_text(pair.base, "x2 >= 2");

    mfpt_compare_report rep = compare_mfpt_coupled(pair, s, s, gamma, cfg, 128);
    CHECK(rep.direction == set_direction::increasing);
    CHECK(rep.pathwise_ok == 128);
    CHECK(rep.pathwise_violations == 0);
    CHECK(rep.n_both_hit == 128);
    for (const auto& [tb, tv] : rep.pairs) CHECK(*tv <= *tb);
    CHECK(rep.paired_mean_diff > 0.0);
    CHECK(rep.variant.mean < rep.base.mean);
    CHECK(rep.cdf.dominates);
}

TEST_CASE("coupled mfpt comparison resolves and enforces directions") {
    coupled_pair pair = enzyme_pair(1, 2);
    state s{3, 0, 2, 0};
    coupled_sim_config cfg;
    cfg.horizon = 50.0;
    cfg.seed = 7;

    // a lower set: both starts sit inside, so every passage time is zero
    auto low = predicate_from_text(pair.base, "x2 <= 1");
    mfpt_compare_report rep = compare_mfpt_coupled(pair, s, s, low, cfg, 8);
    CHECK(rep.direction == set_direction::decreasing);
    CHECK(rep.pathwise_ok == 8);
    for (const auto& [tb, tv] : rep.pairs) {
        CHECK(*tb == 0.0);
        CHECK(*tv == 0.0);
    }

    auto band = predicate_from_text(pair.base, "x2 == 1");
    CHECK_THROWS_AS((void)compare_mfpt_coupled(pair, s, s, band, cfg, 4), direction_unknown);
    CHECK_THROWS_AS((void)compare_mfpt_coupled(pair, s, s, low, cfg, 4,
                                               set_direction::increasing),
                    direction_unknown);
    CHECK_THROWS_AS((void)compare_mfpt_coupled(pair, s, s, predicate_from_text(pair.base, "x1 < 0"),
                                               cfg, 4),
                    precondition_failed);
}

TEST_CASE("slowing the crossover speeds up transit under grouped coupling") {
    network base = braess_net(4, 3, 5, 1, 1, 20);
    network variant = braess_net(4, 3, 5, 1, 1, 5);
    coupled_pair pair = coupled_pair::make(base, variant, braess_slowdown_order());
    group_partition blocks{{{b13, b12}, {b34, b24}, {b23}}};

    coupled_sim_config cfg;
    cfg.horizon = 50.0;
    cfg.seed = 11;
    cfg.mode = coupling_mode::grouped;
    cfg.partition = blocks;
    auto gamma = predicate_from_text(base, "x4 == 4");

    mfpt_compare_report rep = compare_mfpt_coupled(pair, {4, 0, 0, 0}, {4, 0, 0, 0}, gamma,
                                                   cfg, 100);
    CHECK(rep.direction == set_direction::increasing);
    CHECK(rep.n_both_hit == 100);
    CHECK(rep.pathwise_ok == 100);
    CHECK(rep.pathwise_violations == 0);
    CHECK(rep.paired_mean_diff >= 0.0);
    CHECK(rep.variant.mean <= rep.base.mean);
    CHECK(rep.cdf.dominates);
}

TEST_CASE("empirical stationary matches the two-state birth death law") {
    network net = birth_death_net(1, 2, 3.0);
    distribution_table exact;
    exact.support = {{0}, {1}};
    exact.mass = {0.6, 0.4};

    distribution_table est = empirical_stationary(net, {0}, 100.0, 6000.0, 2);
    CHECK(est.support.size() == 2);
    CHECK(tv_distance(est, exact) <= 0.02);

    double sum = 0.0;
    for (double m : est.mass) sum += m;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("empirical stationary puts unit mass on an absorbing start") {
    network net = enzyme_net(3, 2, 1, 1, 1);
    distribution_table dist = empirical_stationary(net, {0, 3, 2, 0}, 1.0, 10.0, 0);
    REQUIRE(dist.support.size() == 1);
    CHECK(dist.support[0] == state{0, 3, 2, 0});
    CHECK(dist.mass[0] == 1.0);

    CHECK_THROWS_AS((void)empirical_stationary(net, {0, 3, 2, 0}, 10.0, 10.0, 0),
                    precondition_failed);
}

TEST_CASE("distribution tables normalize and order their support") {
    std::map<state, double> w;
    w[{2, 0}] = 3.0;
    w[{1, 0}] = 1.0;
    w[{0, 9}] = 0.0;
    distribution_table dist = make_distribution(w);
    REQUIRE(dist.support.size() == 2);
    CHECK(dist.support[0] == state{1, 0});
    CHECK(dist.mass[0] == doctest::Approx(0.25));
    CHECK(dist.mass[1] == doctest::Approx(0.75));

    std::map<state, double> bad;
    bad[{0}] = -1.0;
    CHECK_THROWS_AS((void)make_distribution(bad), precondition_failed);
    CHECK_THROWS_AS((void)make_distribution({}), precondition_failed);
}

TEST_CASE("product form stationary law at unit rates") {
    std::array<double, 6> ones{1, 1, 1, 1, 1, 1};
    distribution_table dist = product_form_stationary(1, ones, 6, 6);

    double sum = 0.0;
    std::map<state, double> pi;
    for (std::size_t i = 0; i < dist.support.size(); ++i) {
        sum += dist.mass[i];
        pi[dist.support[i]] = dist.mass[i];
        const state& x = dist.support[i];
        CHECK(x[2] + x[3] == 1); // conserved enzyme pair by construction
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // c3 = c4 = 1/2 splits the enzyme slice evenly; c1 = c2 = 1 gives
    // factorial decay in the open coordinates
    CHECK(pi.at({0, 0, 1, 0}) == doctest::Approx(pi.at({0, 0, 0, 1})));
    CHECK(pi.at({1, 0, 1, 0}) == doctest::Approx(pi.at({0, 0, 1, 0})));
    CHECK(pi.at({2, 0, 1, 0}) == doctest::Approx(0.5 * pi.at({0, 0, 1, 0})));
    CHECK(pi.at({0, 3, 1, 0}) == doctest::Approx(pi.at({0, 0, 1, 0}) / 6.0));

    CHECK_THROWS_AS((void)product_form_stationary(1, {1, 1, 0, 1, 1, 1}, 4, 4), invalid_params);
    CHECK_THROWS_AS((void)product_form_stationary(-1, ones, 4, 4), invalid_params);
}

TEST_CASE("product form concentrates on the unbound slice at weak binding") {
    std::array<double, 6> weak{1e-3, 10.0, 1.0, 1.0, 1e-3, 10.0};
    distribution_table dist = product_form_stationary(2, weak, 10, 10);
    network net = enzyme_open_net(2, 1);
    double unbound = stationary_set_mass(dist, predicate_from_text(net, "x4 == 0"));
    CHECK(unbound >= 0.99);
    CHECK(stationary_set_mass(dist, predicate_from_text(net, "x4 >= 0")) ==
          doctest::Approx(1.0));
    CHECK(stationary_set_mass(dist, predicate_from_text(net, "x1 < 0")) == 0.0);
}

TEST_CASE("product form satisfies global balance away from the caps") {
    std::array<double, 6> ones{1, 1, 1, 1, 1, 1};
    distribution_table dist = product_form_stationary(1, ones, 8, 8);
    network net = enzyme_open_net(1, 1);
    net_structure ns = derive_net_structure(net);

    std::map<state, double> pi;
    for (std::size_t i = 0; i < dist.support.size(); ++i) pi[dist.support[i]] = dist.mass[i];

    std::vector<double> rates;
    int checked = 0;
    for (const auto& [y, mass] : pi) {
        if (y[0] > 6 || y[1] > 6) continue; // keep inflow sources inside the table
        rate_vector_into(net, ns, y, rates);
        double outflow = 0.0;
        for (double r : rates) outflow += r;
        double inflow = 0.0;
        for (int j = 0; j < ns.count(); ++j) {
            state x = y;
            for (std::size_t k = 0; k < x.size(); ++k) x[k] -= ns.vectors[std::size_t(j)][k];
            auto it = pi.find(x);
            if (it == pi.end() || !net.space().contains(x)) continue;
            rate_vector_into(net, ns, x, rates);
            inflow += it->second * rates[std::size_t(j)];
        }
        CHECK(std::abs(inflow - mass * outflow) <= 1e-13);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("tv distance on union support") {
    std::map<state, double> wa, wb;
    wa[{0}] = 0.5;
    wa[{1}] = 0.5;
    wb[{0}] = 0.25;
    wb[{1}] = 0.75;
    distribution_table a = make_distribution(wa), b = make_distribution(wb);
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(tv_distance(a, b) == doctest::Approx(0.25));

    std::map<state, double> wc;
    wc[{7}] = 1.0;
    CHECK(tv_distance(a, make_distribution(wc)) == doctest::Approx(1.0));
}

TEST_CASE("drift of an observable under the generator") {
    network bd = birth_death_net(30, 2, 1.0);
    CHECK(drift_value(bd, "5", {4}) == 0.0);
    CHECK(drift_value(bd, "x1", {5}) == doctest::Approx(-3.0));
    // at the cap the birth is cut off by the space itself
    CHECK(drift_value(bd, "x1", {30}) == doctest::Approx(-30.0));

    // linearity in the observable
    network braess = braess_net(3, 1, 2, 1, 2, 1);
    for (const state& x : {state{3, 0, 0, 0}, state{1, 1, 1, 0}, state{0, 1, 0, 2}}) {
        double combined = drift_value(braess, "x1 + 2*(x2^2)", x);
        double parts = drift_value(braess, "x1", x) + 2.0 * drift_value(braess, "x2^2", x);
        CHECK(combined == doctest::Approx(parts).epsilon(1e-12));
    }

    // expression-rate model, balanced flows at the handpicked state
    network hist = histone_net(3, 1.0);
    CHECK(drift_value(hist, "x1 + x2", {1, 1}) == doctest::Approx(0.0));

    CHECK_THROWS_AS((void)drift_value(bd, "x1 >= 2", {1}), validation_error);
    CHECK_THROWS_AS((void)drift_value(bd, "q9 + 1", {1}), validation_error);
}

TEST_CASE("exponential drift condition on the capped birth death chain") {
    network bd = birth_death_net(30, 2, 1.0);
    lyapunov_spec spec;
    spec.v_text = "x1";
    spec.mode = drift_mode::exponential;
    spec.c_prime = 1.0;
    spec.d_prime = 2.0;

    drift_report rep = verify_drift(bd, spec, 30);
    CHECK(rep.pass);
    CHECK(rep.states == 31);
    CHECK(rep.worst_margin <= 1e-12);

    spec.d_prime = 1.5; // every interior state now overshoots by 0.5
    drift_report bad = verify_drift(bd, spec, 30);
    CHECK(!bad.pass);
    REQUIRE(bad.worst_state.has_value());
    CHECK(bad.worst_margin == doctest::Approx(0.5));
}

TEST_CASE("negative drift outside a derived set") {
    network bd = birth_death_net(30, 2, 1.0);
    lyapunov_spec spec;
    spec.v_text = "x1";
    spec.mode = drift_mode::negative_outside_set;
    spec.c = 1.0;

    drift_report rep = verify_drift(bd, spec, 10);
    CHECK(rep.pass);
    CHECK(rep.set_interior);
    REQUIRE(rep.set_c.size() == 3);
    CHECK(rep.set_c[0] == state{0});
    CHECK(rep.set_c[2] == state{2});
    CHECK(rep.d == doctest::Approx(3.0));

    // rates stay those of the full chain, so the sweep edge still has
    // positive drift and the derived set touches the cap
    drift_report edge = verify_drift(bd, spec, 2);
    CHECK(!edge.pass);
    CHECK(!edge.set_interior);
    CHECK(edge.set_c.size() == 3);
}

TEST_CASE("negative drift with a given exception set") {
    network bd = birth_death_net(30, 2, 1.0);
    lyapunov_spec spec;
    spec.v_text = "x1";
    spec.mode = drift_mode::negative_outside_set;
    spec.c = 1.0;
    spec.d = 3.0;
    spec.set_c = std::vector<state>{{0}, {1}, {2}};

    drift_report rep = verify_drift(bd, spec, 12);
    CHECK(rep.pass);
    CHECK(rep.set_interior);

    spec.d = 1.5;
    drift_report bad = verify_drift(bd, spec, 12);
    CHECK(!bad.pass);
    CHECK(bad.worst_margin == doctest::Approx(1.5));
    REQUIRE(bad.worst_state.has_value());
    CHECK(*bad.worst_state == state{0});

    lyapunov_spec negative;
    negative.v_text = "x1 - 5";
    negative.mode = drift_mode::negative_outside_set;
    negative.c = 1.0;
    drift_report note = verify_drift(bd, negative, 12);
    CHECK(!note.pass);
    REQUIRE(note.note.has_value());
    CHECK(note.note->find("negative") != std::string::npos);
}

TEST_CASE("reachable states by positive-rate jumps") {
    network net = enzyme_net(3, 2, 1, 1, 1);
    std::vector<state> cls = reachable_states(net, {3, 0, 2, 0});
    CHECK(cls == enumerate_states(net));
    CHECK(cls.size() == 9);

    network bd = birth_death_net(3, 1, 1.0);
    CHECK(reachable_states(bd, {0}).size() == 4);
    CHECK_THROWS_AS((void)reachable_states(bd, {0}, 2), cap_exceeded);
    CHECK_THROWS_AS((void)reachable_states(bd, {9}), precondition_failed);
}

TEST_CASE("replicate estimators are invariant to the thread count") {
    network net = enzyme_net(3, 2, 1, 1, 1);
    state start{3, 0, 2, 0};
    auto gamma = predicate_from_text(net, "x2 == 3");

    mfpt_estimate serial = estimate_mfpt(net, start, gamma, 50.0, 64, 11, 1);
    mfpt_estimate threaded = estimate_mfpt(net, start, gamma, 50.0, 64, 11, 4);
    CHECK(serial.mean == threaded.mean);
    CHECK(serial.std_error == threaded.std_error);
    CHECK(serial.n_censored == threaded.n_censored);

    coupled_pair pair =
        coupled_pair::make(net, net.with_param("k3", param_value::from_double(2.0)),
                           enzyme_order());
    coupled_sim_config cfg;
    cfg.horizon = 50.0;
    cfg.seed = 11;
    mfpt_compare_report one = compare_mfpt_coupled(pair, start, start, gamma, cfg, 48,
                                                   set_direction::automatic, 10'000'000, 1);
    mfpt_compare_report many = compare_mfpt_coupled(pair, start, start, gamma, cfg, 48,
                                                    set_direction::automatic, 10'000'000, 5);
    CHECK(one.pairs == many.pairs);
    CHECK(one.base.mean == many.base.mean);
    CHECK(one.variant.std_error == many.variant.std_error);
    CHECK(one.paired_mean_diff == many.paired_mean_diff);
    CHECK(one.pathwise_ok == many.pathwise_ok);
    CHECK(one.cdf.dominates == many.cdf.dominates);
}
