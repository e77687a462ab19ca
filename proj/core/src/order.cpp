#include "scrn/order.hpp"

#include <algorithm>
#include <numeric>

#include "scrn/errors.hpp"

namespace scrn {

namespace {

using i128 = __int128;

i128 row_dot_diff(const std::vector<std::int64_t>& row, const state& x, const state& y) {
    i128 acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) acc += i128(row[i]) * (y[i] - x[i]);
    return acc;
}

void check_dims(const order_spec& order, const state& x, const state& y) {
    if (int(x.size()) != order.dim() || int(y.size()) != order.dim())
        throw dimension_mismatch("state dimension does not match the order matrix");
}

} // namespace

order_spec order_spec::from_rows(std::vector<std::vector<std::int64_t>> rows) {
    if (rows.empty()) throw validation_error("order matrix needs at least one row");
    const std::size_t d = rows.front().size();
    if (d == 0) throw validation_error("order matrix rows must be nonempty");
    for (const auto& row : rows) {
        if (row.size() != d) throw dimension_mismatch("order matrix rows of mixed length");
        bool all_zero = true;
        for (auto v : row)
            if (v != 0) all_zero = false;
        if (all_zero) throw validation_error("order matrix has a zero row");
    }
    order_spec s;
    s.rows_ = std::move(rows);
    s.dim_ = int(d);
    return s;
}

order_spec order_spec::from_rational_rows(const std::vector<std::vector<rational>>& rows) {
    std::vector<std::vector<std::int64_t>> scaled;
    for (const auto& row : rows) {
        std::int64_t lcm = 1;
        for (const auto& r : row) {
            std::int64_t g = std::gcd(lcm, r.den);
            lcm = lcm / g * r.den; // row dims are small; overflow not a practical concern
        }
        std::vector<std::int64_t> irow;
        for (const auto& r : row) irow.push_back(r.num * (lcm / r.den));
        std::int64_t g = 0;
        for (auto v : irow) g = std::gcd(g, v < 0 ? -v : v);
        if (g > 1)
            for (auto& v : irow) v /= g;
        scaled.push_back(std::move(irow));
    }
    return from_rows(std::move(scaled));
}

int order_spec::rank() const {
    // fraction-free elimination over the integers
    std::vector<std::vector<i128>> m(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r)
        m[r].assign(rows_[r].begin(), rows_[r].end());
    const std::size_t nr = m.size(), nc = std::size_t(dim_);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < nc && rank < nr; ++col) {
        std::size_t pivot = rank;
        while (pivot < nr && m[pivot][col] == 0) ++pivot;
        if (pivot == nr) continue;
        std::swap(m[rank], m[pivot]);
        for (std::size_t r = rank + 1; r < nr; ++r) {
            if (m[r][col] == 0) continue;
            i128 a = m[rank][col], b = m[r][col];
            for (std::size_t c = 0; c < nc; ++c) m[r][c] = m[r][c] * a - m[rank][c] * b;
            // keep entries small to avoid overflow on larger matrices
            i128 g = 0;
            auto absv = [](i128 v) { return v < 0 ? -v : v; };
            for (std::size_t c = 0; c < nc; ++c) {
                i128 v = absv(m[r][c]);
                while (v != 0) {
                    i128 t = g % v;
                    g = v;
                    v = t;
                }
            }
            if (g > 1)
                for (std::size_t c = 0; c < nc; ++c) m[r][c] /= g;
        }
        ++rank;
    }
    return int(rank);
}

bool preceq(const order_spec& order, const state& x, const state& y) {
    check_dims(order, x, y);
    for (const auto& row : order.matrix())
        if (row_dot_diff(row, x, y) < 0) return false;
    return true;
}

std::vector<int> active_rows(const order_spec& order, const state& x, const state& y) {
    check_dims(order, x, y);
    std::vector<int> idx;
    for (int i = 0; i < order.rows(); ++i) {
        i128 v = row_dot_diff(order.matrix()[std::size_t(i)], x, y);
        if (v < 0)
            throw not_comparable("active_rows: states are not related by the order");
        if (v == 0) idx.push_back(i);
    }
    return idx;
}

av_table image_of_nets(const order_spec& order, const net_structure& ns) {
    if (!ns.vectors.empty() && int(ns.vectors.front().size()) != order.dim())
        throw dimension_mismatch("net vectors do not match the order matrix");
    av_table t;
    t.all_unit = true;
    for (const auto& v : ns.vectors) {
        std::vector<std::int64_t> img;
        for (const auto& row : order.matrix()) {
            i128 acc = 0;
            for (std::size_t i = 0; i < row.size(); ++i) acc += i128(row[i]) * v[i];
            auto e = std::int64_t(acc);
            if (e < -1 || e > 1) t.all_unit = false;
            img.push_back(e);
        }
        t.av.push_back(std::move(img));
    }
    return t;
}

namespace {

monotone_check verify_monotone(const order_spec& order, const std::vector<state>& space,
                               const std::vector<state>& gamma, bool increasing) {
    for (const auto& g : gamma)
        if (!std::binary_search(space.begin(), space.end(), g))
            throw validation_error("target set contains a state outside the space");
    monotone_check res;
    for (const auto& g : gamma) {
        for (const auto& y : space) {
            bool related = increasing ? preceq(order, g, y) : preceq(order, y, g);
            if (!related) continue;
            if (!std::binary_search(gamma.begin(), gamma.end(), y)) {
                res.ok = false;
                res.witness = monotone_witness{g, y};
                return res;
            }
        }
    }
    res.ok = true;
    return res;
}

} // namespace

monotone_check verify_increasing(const order_spec& order, const std::vector<state>& space,
                                 const std::vector<state>& gamma) {
    return verify_monotone(order, space, gamma, true);
}

monotone_check verify_decreasing(const order_spec& order, const std::vector<state>& space,
                                 const std::vector<state>& gamma) {
    return verify_monotone(order, space, gamma, false);
}

namespace {

std::vector<state> extreme_elements(const order_spec& order, const std::vector<state>& space,
                                    bool maximal) {
    std::vector<state> out;
    for (const auto& x : space) {
        bool extreme = true;
        for (const auto& y : space) {
            if (x == y) continue;
            bool beyond = maximal ? preceq(order, x, y) : preceq(order, y, x);
            if (beyond) {
                extreme = false;
                break;
            }
        }
        if (extreme) out.push_back(x);
    }
    return out;
}

} // namespace

std::vector<state> maximal_elements(const order_spec& order, const std::vector<state>& space) {
    return extreme_elements(order, space, true);
}

std::vector<state> minimal_elements(const order_spec& order, const std::vector<state>& space) {
    return extreme_elements(order, space, false);
}

} // namespace scrn
