#include <doctest.h>

#include <scrn/errors.hpp>
#include <scrn/model.hpp>
#include <scrn/model_io.hpp>

using namespace scrn;

namespace {

// substrate conversion with enzyme binding: S+E <-> SE -> P+E
network enzyme_net(std::int64_t s_tot, std::int64_t e_tot, double k1, double k2, double k3) {
    std::vector<reaction> rx(3);
    rx[0].reactant = {1, 0, 1, 0};
    rx[0].product = {0, 0, 0, 1};
    rx[0].rate.param_name = "k1";
    rx[1].reactant = {0, 0, 0, 1};
    rx[1].product = {1, 0, 1, 0};
    rx[1].rate.param_name = "k2";
    rx[2].reactant = {0, 0, 0, 1};
    rx[2].product = {0, 1, 1, 0};
    rx[2].rate.param_name = "k3";
    auto space = state_space::constrained(
        4, {{{1, 1, 0, 1}, s_tot}, {{0, 0, 1, 1}, e_tot}}, {});
    return network({"S", "P", "E", "SE"},
                   {{"k1", param_value::from_double(k1)},
                    {"k2", param_value::from_double(k2)},
                    {"k3", param_value::from_double(k3)}},
                   std::move(rx), std::move(space));
}

} // namespace

TEST_CASE("falling factorial") {
    CHECK(falling_factorial(5, 0) == 1);
    CHECK(falling_factorial(5, 1) == 5);
    CHECK(falling_factorial(5, 2) == 20);
    CHECK(falling_factorial(1, 2) == 0);
    CHECK(falling_factorial(0, 1) == 0);
}

TEST_CASE("conserved class enumerates in lex order") {
    auto net = enzyme_net(3, 2, 1, 1, 1);
    auto states = enumerate_states(net);
    CHECK(states.size() == 9);
    CHECK(std::is_sorted(states.begin(), states.end()));
    for (const auto& x : states) {
        CHECK(x[0] + x[1] + x[3] == 3);
        CHECK(x[2] + x[3] == 2);
    }
    CHECK(states.front() == state{0, 1, 0, 2});
    CHECK(states.back() == state{3, 0, 2, 0});
}

TEST_CASE("unbounded coordinates refuse to enumerate") {
    auto space = state_space::box(2, {std::optional<std::int64_t>(3), std::nullopt});
    CHECK_THROWS_AS(enumerate_space(space), infinite_space);
    auto capped = space.truncated(5);
    auto states = enumerate_space(capped);
    CHECK(states.size() == 4 * 6);
}

TEST_CASE("state budget is enforced") {
    auto space = state_space::box(2, {std::optional<std::int64_t>(100),
                                      std::optional<std::int64_t>(100)});
    CHECK_THROWS_AS(enumerate_space(space, 50), cap_exceeded);
}

TEST_CASE("net vectors deduplicate and sort") {
    // two reactions share the net direction (+1)
    std::vector<reaction> rx(3);
    rx[0].reactant = {1};
    rx[0].product = {2};
    rx[0].rate.literal = param_value::from_int(1);
    rx[1].reactant = {0};
    rx[1].product = {1};
    rx[1].rate.literal = param_value::from_int(2);
    rx[2].reactant = {1};
    rx[2].product = {0};
    rx[2].rate.literal = param_value::from_int(3);
    network net({"A"}, {}, std::move(rx), state_space::box(1, {std::optional<std::int64_t>(10)}));
    auto ns = derive_net_structure(net);
    REQUIRE(ns.count() == 2);
    CHECK(ns.vectors[0] == state{-1});
    CHECK(ns.vectors[1] == state{1});
    CHECK(ns.members[0] == std::vector<int>{2});
    CHECK(ns.members[1] == std::vector<int>{0, 1});

    // rate at x = 4: down 3*4 = 12, up 1*4 + 2 = 6
    auto r = rate_vector(net, ns, {4});
    CHECK(r[0] == 12.0);
    CHECK(r[1] == 6.0);
    // at the cap the up direction leaves the box and is forced to zero
    r = rate_vector(net, ns, {10});
    CHECK(r[0] == 30.0);
    CHECK(r[1] == 0.0);
}

TEST_CASE("rates at conserved-class states") {
    auto net = enzyme_net(3, 2, 1, 1, 1);
    auto ns = derive_net_structure(net);
    REQUIRE(ns.count() == 3);
    // lex order: (-1,0,-1,1), (0,1,1,-1), (1,0,1,-1)
    CHECK(ns.vectors[0] == state{-1, 0, -1, 1});
    CHECK(ns.vectors[1] == state{0, 1, 1, -1});
    CHECK(ns.vectors[2] == state{1, 0, 1, -1});

    auto r = rate_vector(net, ns, {3, 0, 2, 0});
    CHECK(r == std::vector<double>{6.0, 0.0, 0.0});
    // absorbing state: everything converted, no complex
    r = rate_vector(net, ns, {0, 3, 2, 0});
    CHECK(r == std::vector<double>{0.0, 0.0, 0.0});
    // exact path agrees
    auto re = rate_vector_exact(net, ns, {3, 0, 2, 0});
    REQUIRE(re[0]);
    CHECK(*re[0] == rational{6, 1});
}

TEST_CASE("generator rows sum to zero") {
    auto net = enzyme_net(3, 2, 1.5, 2.0, 0.5);
    auto ns = derive_net_structure(net);
    for (const auto& x : enumerate_states(net)) {
        auto row = generator_row_at(net, ns, x);
        double total = row.diagonal;
        for (const auto& [y, rate] : row.transitions) {
            CHECK(rate > 0.0);
            CHECK(net.space().contains(y));
            total += rate;
        }
        CHECK(total == doctest::Approx(0.0));
    }
}

TEST_CASE("rate preconditions and validation errors") {
    auto net = enzyme_net(3, 2, 1, 1, 1);
    auto ns = derive_net_structure(net);
    CHECK_THROWS_AS(rate_vector(net, ns, {9, 9, 9, 9}), precondition_failed);

    std::vector<reaction> rx(1);
    rx[0].reactant = {1};
    rx[0].product = {1};
    rx[0].rate.literal = param_value::from_int(1);
    CHECK_THROWS_AS(network({"A"}, {}, rx, state_space::box(1, {})), validation_error);

    rx[0].product = {2};
    rx[0].rate.literal = param_value::from_double(-2.0);
    CHECK_THROWS_AS(network({"A"}, {}, rx, state_space::box(1, {})), validation_error);

    rx[0].rate = rate_law{};
    rx[0].rate.param_name = "missing";
    CHECK_THROWS_AS(network({"A"}, {}, rx, state_space::box(1, {})), validation_error);

    CHECK_THROWS_AS(network({"A", "A"}, {}, {}, state_space::box(2, {})), validation_error);
}

TEST_CASE("negative propensities are rejected at evaluation") {
    std::vector<reaction> rx(1);
    rx[0].reactant = {1};
    rx[0].product = {0};
    rx[0].rate.kind = rate_law::kind_t::expr;
    rx[0].rate.expr_text = "2 - x1";
    network net({"A"}, {}, rx, state_space::box(1, {std::optional<std::int64_t>(9)}));
    auto ns = derive_net_structure(net);
    CHECK(rate_vector(net, ns, {1})[0] == 1.0);
    CHECK_THROWS_AS(rate_vector(net, ns, {5}), evaluation_error);
}

TEST_CASE("with_param rebuilds, truncation caps") {
    auto net = enzyme_net(3, 2, 1, 1, 1);
    auto varied = net.with_param("k3", param_value::from_double(2.0));
    CHECK(varied.param("k3") == 2.0);
    CHECK(net.param("k3") == 1.0);

    auto space = state_space::box(2, {});
    network open({"A", "B"}, {},
                 {[] {
                     reaction r;
                     r.reactant = {0, 0};
                     r.product = {1, 0};
                     r.rate.literal = param_value::from_int(1);
                     return r;
                 }()},
                 space);
    auto capped = open.truncated(4);
    CHECK(enumerate_states(capped).size() == 25);
    CHECK_THROWS_AS(enumerate_states(open), infinite_space);
}

TEST_CASE("model JSON round-trips") {
    const std::string text = R"({
      "species": ["S", "P", "E", "SE"],
      "params": {"k1": 1, "k2": "1/2", "k3": 0.25, "Stot": 3, "Etot": 2},
      "reactions": [
        {"reactant": [1,0,1,0], "product": [0,0,0,1], "rate": {"mass_action": "k1"}},
        {"reactant": [0,0,0,1], "product": [1,0,1,0], "rate": {"mass_action": "k2"}},
        {"reactant": [0,0,0,1], "product": [0,1,1,0], "rate": {"expr": "k3 * x4"}}
      ],
      "state_space": {"kind": "conservation",
                      "equalities": [{"coeffs": [1,1,0,1], "value": "Stot"},
                                     {"coeffs": [0,0,1,1], "value": "Etot"}],
                      "inequalities": []},
      "order_matrix": [[-1,0,0,0],[0,1,0,0]]
    })";
    auto doc = parse_model(text);
    CHECK(doc.net.dim() == 4);
    CHECK(doc.net.param("k2") == 0.5);
    CHECK(doc.net.param("k3") == 0.25);
    REQUIRE(doc.order_rows);
    CHECK(doc.order_rows->size() == 2);
    CHECK(enumerate_states(doc.net).size() == 9);

    auto first = serialize_model(doc);
    auto doc2 = parse_model(first);
    auto second = serialize_model(doc2);
    CHECK(first == second);
    CHECK(doc2.net.species() == doc.net.species());
    CHECK(doc2.net.param_values() == doc.net.param_values());
}

TEST_CASE("model JSON errors carry context") {
    CHECK_THROWS_AS(parse_model("not json"), parse_error);
    CHECK_THROWS_AS(parse_model("{}"), validation_error);
    CHECK_THROWS_AS(parse_model(R"({"species": ["A"], "params": {},
        "reactions": [{"reactant": [1], "product": [1],
                       "rate": {"mass_action": 1}}],
        "state_space": {"kind": "box", "caps": 5}})"),
                    validation_error);
}
