#include <doctest.h>

#include <scrn/errors.hpp>
#include <scrn/order.hpp>

using namespace scrn;

namespace {

const auto cone_2d = order_spec::from_rows({{-1, 0}, {0, 1}}); // smaller x1, larger x2

std::vector<state> grid(std::int64_t cap) {
    std::vector<state> out;
    for (std::int64_t a = 0; a <= cap; ++a)
        for (std::int64_t b = 0; b <= cap; ++b)
            if (a + b <= cap) out.push_back({a, b});
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("preceq is an exact row test") {
    CHECK(preceq(cone_2d, {1, 0}, {0, 3}));
    CHECK(preceq(cone_2d, {1, 1}, {1, 1}));
    CHECK_FALSE(preceq(cone_2d, {0, 3}, {1, 3})); // x1 may only shrink
    CHECK_FALSE(preceq(cone_2d, {1, 3}, {1, 2})); // x2 may only grow
    CHECK(preceq(cone_2d, {2, 0}, {1, 0}));
    CHECK(preceq(cone_2d, {2, 0}, {2, 5}));
    CHECK_THROWS_AS(preceq(cone_2d, {1}, {0, 0}), dimension_mismatch);
}

TEST_CASE("translation invariance") {
    const state shift = {3, 7};
    for (std::int64_t a = 0; a < 3; ++a) {
        for (std::int64_t b = 0; b < 3; ++b) {
            state x = {a, b}, y = {2 - a, 2};
            state xs = {x[0] + shift[0], x[1] + shift[1]};
            state ys = {y[0] + shift[0], y[1] + shift[1]};
            CHECK(preceq(cone_2d, x, y) == preceq(cone_2d, xs, ys));
        }
    }
}

TEST_CASE("active rows locate the touched faces") {
    // y - x = (0, 2): row 0 tight, row 1 slack
    auto idx = active_rows(cone_2d, {1, 1}, {1, 3});
    CHECK(idx == std::vector<int>{0});
    idx = active_rows(cone_2d, {1, 1}, {0, 1});
    CHECK(idx == std::vector<int>{1});
    idx = active_rows(cone_2d, {1, 1}, {1, 1});
    CHECK(idx == std::vector<int>{0, 1});
    CHECK_THROWS_AS(active_rows(cone_2d, {0, 1}, {1, 5}), not_comparable);
}

TEST_CASE("net images and the unit-entry test") {
    net_structure ns;
    ns.vectors = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
    ns.members = {{0}, {1}, {2}, {3}};
    auto t = image_of_nets(cone_2d, ns);
    REQUIRE(t.av.size() == 4);
    CHECK(t.av[0] == std::vector<std::int64_t>{1, 0});
    CHECK(t.av[1] == std::vector<std::int64_t>{0, -1});
    CHECK(t.av[2] == std::vector<std::int64_t>{0, 1});
    CHECK(t.av[3] == std::vector<std::int64_t>{-1, 0});
    CHECK(t.all_unit);

    auto wide = order_spec::from_rows({{2, 0}, {0, 1}});
    CHECK_FALSE(image_of_nets(wide, ns).all_unit);
}

TEST_CASE("rank and antisymmetry") {
    CHECK(cone_2d.rank() == 2);
    auto thin = order_spec::from_rows({{1, 1}});
    CHECK(thin.rank() == 1);
    // rank-deficient: distinct states can relate both ways
    CHECK(preceq(thin, {0, 2}, {1, 1}));
    CHECK(preceq(thin, {1, 1}, {0, 2}));
    auto dup = order_spec::from_rows({{1, 1}, {2, 2}, {1, 0}});
    CHECK(dup.rank() == 2);
}

TEST_CASE("rational rows scale without changing the relation") {
    auto scaled = order_spec::from_rational_rows(
        {{rational{-1, 2}, rational{0, 1}}, {rational{0, 1}, rational{1, 3}}});
    CHECK(scaled.matrix() == cone_2d.matrix());
}

TEST_CASE("monotone set checks produce witnesses") {
    auto space = grid(3);
    // top state: nothing above it but itself
    std::vector<state> top = {{0, 3}};
    auto inc = verify_increasing(cone_2d, space, top);
    CHECK(inc.ok);
    auto dec = verify_decreasing(cone_2d, space, top);
    CHECK_FALSE(dec.ok);
    REQUIRE(dec.witness);
    CHECK(dec.witness->inside == state{0, 3});
    CHECK(preceq(cone_2d, dec.witness->outside, dec.witness->inside));

    std::vector<state> bottom = {{3, 0}};
    CHECK(verify_decreasing(cone_2d, space, bottom).ok);
    CHECK_FALSE(verify_increasing(cone_2d, space, bottom).ok);

    CHECK_THROWS_AS(verify_increasing(cone_2d, space, {{9, 9}}), validation_error);
}

TEST_CASE("extremes of the simplex") {
    auto space = grid(3);
    auto maxs = maximal_elements(cone_2d, space);
    REQUIRE(maxs.size() == 1);
    CHECK(maxs[0] == state{0, 3});
    auto mins = minimal_elements(cone_2d, space);
    REQUIRE(mins.size() == 1);
    CHECK(mins[0] == state{3, 0});
}
