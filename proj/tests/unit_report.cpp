#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "scrn/analysis.hpp"
#include "scrn/bundles.hpp"
#include "scrn/conditions.hpp"
#include "scrn/coupling.hpp"
#include "scrn/report.hpp"

using namespace scrn;
using njson = nlohmann::json;

namespace {

run_manifest demo_manifest() {
    run_manifest m;
    m.command = "check";
    m.arguments = {"--condition", "facet", "--model-a", "a.json"};
    m.seed = 42;
    m.threads = 2;
    m.input_digests = {{"a.json", fnv1a64_hex("body")}};
    m.timestamp = iso8601_utc(1700000000);
    return m;
}

}  // namespace

TEST_CASE("fnv1a64 matches the published vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("timestamps render as UTC ISO 8601") {
    CHECK(iso8601_utc(0) == "1970-01-01T00:00:00Z");
    CHECK(iso8601_utc(1700000000) == "2023-11-14T22:13:20Z");
}

TEST_CASE("condition documents embed the manifest and the verdict") {
    const auto bundle = build_bundle("enzyme1");
    const auto pass = check_facet(bundle_pair(bundle, {{"k3", 2.0}}));
    const auto manifest = demo_manifest();

    const std::string text = condition_document(pass, manifest);
    CHECK(text == condition_document(pass, manifest));  // deterministic bytes
    CHECK(text.back() == '\n');

    const auto j = njson::parse(text);
    CHECK(j["manifest"]["tool"] == "scrncmp");
    CHECK(j["manifest"]["version"] == std::string(tool_version));
    CHECK(j["manifest"]["command"] == "check");
    CHECK(j["manifest"]["arguments"].size() == 4);
    CHECK(j["manifest"]["seed"] == 42);
    CHECK(j["manifest"]["threads"] == 2);
    CHECK(j["manifest"]["inputs"][0]["path"] == "a.json");
    CHECK(j["manifest"]["inputs"][0]["fnv1a64"] == fnv1a64_hex("body"));
    CHECK(j["manifest"]["timestamp"] == "2023-11-14T22:13:20Z");
    CHECK(j["condition"] == "facet");
    CHECK(j["pass"] == true);
    CHECK(j["states"].get<std::uint64_t>() == pass.states);
    CHECK(j["tolerance"]["rel"].get<double>() == pass.tolerance.rel);
    CHECK_FALSE(j.contains("witness"));
    CHECK_FALSE(j.contains("truncation"));

    run_manifest no_stamp = manifest;
    no_stamp.timestamp.clear();
    CHECK_FALSE(njson::parse(condition_document(pass, no_stamp))["manifest"].contains(
        "timestamp"));
}

TEST_CASE("failing checks serialize their witness") {
    const auto bundle = build_bundle("enzyme1");
    const auto fail = check_facet(bundle_pair(bundle, {{"k3", 0.5}}));
    REQUIRE_FALSE(fail.pass);
    REQUIRE(fail.witness.has_value());

    const auto j = njson::parse(condition_document(fail, demo_manifest()));
    CHECK(j["pass"] == false);
    const auto& w = j["witness"];
    CHECK(w["x"].is_array());
    CHECK(w["x"].size() == 4);
    CHECK(w["y"].size() == 4);
    CHECK((w["relation"] == "<=" || w["relation"] == ">="));
    CHECK(w.contains("lhs"));
    CHECK(w.contains("rhs"));
}

TEST_CASE("batch summaries tally replicates and keep the earliest violation") {
    const auto bundle = build_bundle("enzyme1");
    const auto pair = bundle_pair(bundle, {{"k3", 2.0}});
    coupled_sim_config cfg;
    cfg.horizon = 2.0;
    cfg.seed = 7;
    cfg.keep_paths = false;

    coupled_batch_summary batch;
    for (std::int64_t r = 0; r < 3; ++r) {
        cfg.stream = std::uint64_t(r);
        batch.add(r, simulate_coupled(pair, bundle.states.at("start"),
                                      bundle.states.at("start"), cfg));
    }
    CHECK(batch.replicates == 3);
    CHECK(batch.ordered_throughout == 3);
    CHECK(batch.reached_horizon == 3);
    CHECK(batch.potential_jumps > 0);
    CHECK(batch.lambda_max > 0.0);

    // fabricated violations: the earliest time wins regardless of order
    coupled_run bad;
    bad.ordered_throughout = false;
    bad.first_violation_time = 0.5;
    batch.add(7, bad);
    bad.first_violation_time = 0.9;
    batch.add(8, bad);
    bad.first_violation_time = 0.3;
    batch.add(9, bad);
    CHECK(batch.replicates == 6);
    CHECK(batch.ordered_throughout == 3);
    CHECK(*batch.first_violation_replicate == 9);
    CHECK(*batch.first_violation_time == 0.3);

    simulate_context ctx;
    ctx.horizon = cfg.horizon;
    const auto j = njson::parse(simulate_document(batch, ctx, demo_manifest()));
    CHECK(j["mode"] == "per_index");
    CHECK(j["record"] == "accepted");
    CHECK(j["replicates"] == 6);
    CHECK(j["ordered_throughout"] == 3);
    CHECK(j["ordered_fraction"].get<double>() == doctest::Approx(0.5));
    CHECK(j["first_violation"]["replicate"] == 9);
    CHECK(j["first_violation"]["time"].get<double>() == 0.3);
    CHECK(j["terminals"]["reached_horizon"] == 6);
    CHECK_FALSE(j.contains("paths_file"));
}

TEST_CASE("first passage documents carry estimates and comparison verdicts") {
    const auto bundle = build_bundle("enzyme1");
    const auto pair = bundle_pair(bundle, {{"k3", 2.0}});
    const auto gamma = predicate_from_text(bundle.net, bundle.targets.at("converted"));
    const auto& start = bundle.states.at("start");

    mfpt_context ctx;
    ctx.target = bundle.targets.at("converted");
    ctx.horizon = 50.0;
    ctx.replicates = 16;

    const auto est = estimate_mfpt(bundle.net, start, gamma, ctx.horizon, ctx.replicates, 3);
    auto j = njson::parse(mfpt_document(est, ctx, demo_manifest()));
    CHECK(j["target"] == ctx.target);
    CHECK(j["replicates"] == 16);
    CHECK(j["estimate"]["mean"].get<double>() == est.mean);
    CHECK(j["estimate"]["n_samples"] == 16);

    coupled_sim_config cfg;
    cfg.horizon = ctx.horizon;
    cfg.seed = 3;
    cfg.keep_paths = false;
    const auto cmp = compare_mfpt_coupled(pair, start, start, gamma, cfg, ctx.replicates);
    j = njson::parse(mfpt_compare_document(cmp, ctx, demo_manifest()));
    CHECK(j["direction"] == "increasing");
    CHECK(j["replicates"] == 16);
    CHECK(j["pathwise"]["ok"] == 16);
    CHECK(j["pathwise"]["violations"] == 0);
    CHECK(j["base"]["mean"].get<double>() == cmp.base.mean);
    CHECK(j["variant"]["mean"].get<double>() == cmp.variant.mean);
    CHECK(j["cdf"]["dominates"] == true);
}

TEST_CASE("stationary documents inline small supports and label comparisons") {
    const auto dist = make_distribution({{{0, 1}, 0.25}, {{1, 0}, 0.75}});
    stationary_context ctx;
    ctx.burn_in = 10.0;
    ctx.total_time = 100.0;
    ctx.set_masses = {{"active", 0.25}};
    ctx.tv_distance = 0.01;
    ctx.tv_against = "closed_form";
    ctx.csv_file = "pi.csv";

    const auto j = njson::parse(stationary_document(dist, ctx, demo_manifest()));
    CHECK(j["burn_in"].get<double>() == 10.0);
    CHECK(j["total_time"].get<double>() == 100.0);
    CHECK(j["states"] == 2);
    CHECK(j["set_masses"]["active"].get<double>() == 0.25);
    CHECK(j["tv_distance"]["against"] == "closed_form");
    CHECK(j["tv_distance"]["value"].get<double>() == 0.01);
    CHECK(j["support"].size() == 2);
    CHECK(j["support"][0]["state"] == njson::array({0, 1}));
    CHECK(j["support"][0]["mass"].get<double>() == 0.25);
    CHECK(j["csv_file"] == "pi.csv");

    stationary_context bare;
    bare.inline_limit = 1;  // support of 2 stays external
    const auto k = njson::parse(stationary_document(dist, bare, demo_manifest()));
    CHECK_FALSE(k.contains("burn_in"));
    CHECK_FALSE(k.contains("support"));
    CHECK_FALSE(k.contains("set_masses"));
    CHECK_FALSE(k.contains("tv_distance"));
}

TEST_CASE("drift documents describe the bound in force") {
    const auto bundle = build_bundle("histone_tf");
    lyapunov_spec spec;
    spec.v_text = "x3";
    spec.mode = drift_mode::exponential;
    spec.c_prime = 1.0;   // decay rate
    spec.d_prime = 3.0;   // production cap at full activation
    const auto rep = verify_drift(bundle.net, spec, 20);
    REQUIRE(rep.pass);

    auto j = njson::parse(drift_document(rep, spec, demo_manifest()));
    CHECK(j["v"] == "x3");
    CHECK(j["mode"] == "exponential");
    CHECK(j["pass"] == true);
    CHECK(j["truncation"] == 20);
    CHECK(j["bound"]["c_prime"].get<double>() == 1.0);
    CHECK(j["bound"]["d_prime"].get<double>() == 3.0);
    CHECK_FALSE(j["bound"].contains("set_size"));

    lyapunov_spec neg;
    neg.v_text = "x3";
    neg.mode = drift_mode::negative_outside_set;
    neg.c = 1.0;
    const auto nrep = verify_drift(bundle.net, neg, 20);
    j = njson::parse(drift_document(nrep, neg, demo_manifest()));
    CHECK(j["mode"] == "negative_outside_set");
    CHECK(j["bound"]["c"].get<double>() == 1.0);
    CHECK(j["bound"]["set_size"] == nrep.set_c.size());
    CHECK(j["bound"]["set_interior"] == nrep.set_interior);
    if (nrep.set_c.size() <= 200) CHECK(j["bound"]["set"].size() == nrep.set_c.size());
}

TEST_CASE("demo documents describe a bundle completely") {
    const auto bundle = build_bundle("braess", {{"k2", 3.0}, {"k4", 3.0}});
    auto j = njson::parse(demo_document(bundle, {}, demo_manifest()));
    CHECK(j["id"] == "braess");
    CHECK(j["species"] == njson::array({"S1", "S2", "S3", "S4"}));
    CHECK(j["params"]["k2"].get<double>() == 3.0);
    CHECK(j["params"]["Stot"].get<double>() == 2.0);
    CHECK(j["defaulted"] == njson::array({"k1", "k3", "k5"}));
    CHECK(j["orders"].size() == 3);
    CHECK(j["orders"]["default"] == njson::parse("[[-1,0,0,0],[0,-1,-1,0]]"));
    CHECK(j["partitions"]["slowdown"] == njson::parse("[[0,1],[4,2],[3]]"));
    CHECK(j["states"]["start"] == njson::array({2, 0, 0, 0}));
    CHECK(j["targets"]["absorbed"] == "x4 == Stot");
    CHECK(j["variant_param"] == "k5");
    CHECK_FALSE(j.contains("files"));

    j = njson::parse(demo_document(bundle, {"braess.json", "braess-k5.json"}, demo_manifest()));
    CHECK(j["files"] == njson::array({"braess.json", "braess-k5.json"}));
}

TEST_CASE("csv writers emit exact rows") {
    CHECK(paths_csv_header(3) == "replicate,chain,time,x1,x2,x3\n");
    sample_path path;
    path.events = {{0.0, {1, 0}}, {0.5, {0, 1}}};
    std::ostringstream out;
    append_path_csv(out, 5, "base", path);
    CHECK(out.str() == "5,base,0,1,0\n5,base,0.5,0,1\n");

    CHECK(distribution_csv_header(2) == "x1,x2,mass\n");
    const auto dist = make_distribution({{{0, 1}, 0.25}, {{1, 0}, 0.75}});
    std::ostringstream dout;
    append_distribution_csv(dout, dist);
    CHECK(dout.str() == "0,1,0.25\n1,0,0.75\n");
}
