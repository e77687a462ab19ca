#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scrn/model.hpp"
#include "scrn/rational.hpp"

namespace scrn {

// Vector preorder induced by an integer matrix A: x precedes y when every
// row satisfies <A_i, y - x> >= 0. Comparisons are exact integer tests.
// The relation is a partial order on states iff rank(A) = dim.
class order_spec {
public:
    static order_spec from_rows(std::vector<std::vector<std::int64_t>> rows);
    // rational rows are scaled to integers row by row; the relation is unchanged
    static order_spec from_rational_rows(const std::vector<std::vector<rational>>& rows);

    int rows() const { return int(rows_.size()); }
    int dim() const { return dim_; }
    const std::vector<std::vector<std::int64_t>>& matrix() const { return rows_; }

    // rank over the rationals
    int rank() const;

private:
    std::vector<std::vector<std::int64_t>> rows_;
    int dim_ = 0;
};

// x precedes y
bool preceq(const order_spec& order, const state& x, const state& y);

// rows i with <A_i, y - x> == 0; requires x preceq y, else not_comparable.
// y lies on exactly these faces of the cone translated to x.
std::vector<int> active_rows(const order_spec& order, const state& x, const state& y);

// table of <A_i, v_j> for every net vector
struct av_table {
    std::vector<std::vector<std::int64_t>> av; // av[j][i]
    bool all_unit = false;                     // every entry in {-1, 0, 1}
};
av_table image_of_nets(const order_spec& order, const net_structure& ns);

// witness that a set fails to be increasing/decreasing: inside is a member,
// outside is a related non-member that the property would force in
struct monotone_witness {
    state inside;
    state outside;
};
struct monotone_check {
    bool ok = false;
    std::optional<monotone_witness> witness;
};

// gamma must be lex sorted; both checks scan gamma x space
monotone_check verify_increasing(const order_spec& order, const std::vector<state>& space,
                                 const std::vector<state>& gamma);
monotone_check verify_decreasing(const order_spec& order, const std::vector<state>& space,
                                 const std::vector<state>& gamma);

// elements with no strict successor / predecessor inside the given set
std::vector<state> maximal_elements(const order_spec& order, const std::vector<state>& space);
std::vector<state> minimal_elements(const order_spec& order, const std::vector<state>& space);

} // namespace scrn
