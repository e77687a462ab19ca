#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "scrn/bundles.hpp"
#include "scrn/conditions.hpp"
#include "scrn/coupling.hpp"
#include "scrn/model.hpp"

using namespace scrn;

namespace {

void bm_rate_vector(benchmark::State& st) {
    const example_bundle b = build_bundle("enzyme2");
    const net_structure ns = derive_net_structure(b.net);
    const std::vector<state> states = enumerate_states(b.net.truncated(8));
    std::vector<double> rates(ns.count());
    std::size_t i = 0;
    for (auto _ : st) {
        rate_vector_into(b.net, ns, states[i], rates);
        benchmark::DoNotOptimize(rates.data());
        i = (i + 1) % states.size();
    }
    st.SetItemsProcessed(st.iterations() * std::int64_t(ns.count()));
}
BENCHMARK(bm_rate_vector);

void bm_expression_rates(benchmark::State& st) {
    const example_bundle b = build_bundle("histone_tf");
    const net_structure ns = derive_net_structure(b.net);
    const std::vector<state> states = enumerate_states(b.net.truncated(16));
    std::vector<double> rates(ns.count());
    std::size_t i = 0;
    for (auto _ : st) {
        rate_vector_into(b.net, ns, states[i], rates);
        benchmark::DoNotOptimize(rates.data());
        i = (i + 1) % states.size();
    }
    st.SetItemsProcessed(st.iterations() * std::int64_t(ns.count()));
}
BENCHMARK(bm_expression_rates);

void bm_coupled_run(benchmark::State& st) {
    const example_bundle b = build_bundle("enzyme1");
    const coupled_pair pair = bundle_pair(b, {{"k3", 2.0}});
    const state x0 = b.states.at("start");
    coupled_sim_config cfg;
    cfg.horizon = double(st.range(0));
    cfg.seed = 17;
    cfg.keep_paths = false;
    std::uint64_t stream = 0;
    std::int64_t jumps = 0;
    for (auto _ : st) {
        cfg.stream = stream++;
        const coupled_run run = simulate_coupled(pair, x0, x0, cfg);
        jumps += run.potential_jumps;
        benchmark::DoNotOptimize(run.ordered_throughout);
    }
    st.SetItemsProcessed(jumps);
}
BENCHMARK(bm_coupled_run)->Arg(1)->Arg(10);

void bm_facet_check(benchmark::State& st) {
    const example_bundle b = build_bundle(
        "enzyme1", {{"Stot", st.range(0)}, {"Etot", 2}});
    const coupled_pair pair = bundle_pair(b, {{"k3", 2.0}});
    for (auto _ : st) {
        const condition_report report = check_facet(pair);
        benchmark::DoNotOptimize(report.pass);
    }
}
BENCHMARK(bm_facet_check)->Arg(3)->Arg(10)->Arg(20);

} // namespace

BENCHMARK_MAIN();
