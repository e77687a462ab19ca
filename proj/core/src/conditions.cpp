#include "scrn/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "scrn/errors.hpp"

namespace scrn {

namespace {

using i128 = __int128;

std::int64_t row_dot(const std::vector<std::int64_t>& row, const state& x) {
    i128 acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) acc += i128(row[i]) * x[i];
    return std::int64_t(acc);
}

} // namespace

coupled_pair coupled_pair::make(network base, network variant, order_spec order) {
    if (base.dim() != variant.dim())
        throw dimension_mismatch("coupled pair: networks have different species counts");
    if (base.species() != variant.species())
        throw validation_error("coupled pair: species names differ");
    if (!(base.space() == variant.space()))
        throw validation_error("coupled pair: state spaces differ");
    if (order.dim() != base.dim())
        throw dimension_mismatch("coupled pair: order matrix columns do not match species count");
    net_structure nets = derive_net_structure(base);
    net_structure nets_v = derive_net_structure(variant);
    if (nets.vectors != nets_v.vectors)
        throw validation_error("coupled pair: networks have different jump directions");
    return coupled_pair{std::move(base), std::move(variant), std::move(nets), std::move(order), {}};
}

coupled_pair coupled_pair::truncated(std::int64_t cap) const {
    coupled_pair out = make(base.truncated(cap), variant.truncated(cap), order);
    out.truncation = cap;
    return out;
}

std::vector<int> group_partition::sigma() const {
    std::vector<int> out;
    for (const auto& block : blocks) out.insert(out.end(), block.begin(), block.end());
    return out;
}

void group_partition::validate(int n_vectors) const {
    if (blocks.empty()) throw validation_error("partition has no blocks");
    std::vector<char> seen(std::size_t(n_vectors), 0);
    for (const auto& block : blocks) {
        if (block.empty()) throw validation_error("partition has an empty block");
        for (int j : block) {
            if (j < 0 || j >= n_vectors)
                throw validation_error("partition index " + std::to_string(j) +
                                       " out of range for " + std::to_string(n_vectors) +
                                       " net vectors");
            if (seen[std::size_t(j)])
                throw validation_error("partition repeats net index " + std::to_string(j));
            seen[std::size_t(j)] = 1;
        }
    }
    for (int j = 0; j < n_vectors; ++j)
        if (!seen[std::size_t(j)])
            throw validation_error("partition misses net index " + std::to_string(j));
}

group_partition suggest_groups(const order_spec& order, const net_structure& ns) {
    av_table table = image_of_nets(order, ns);
    std::map<std::vector<std::int64_t>, std::vector<int>> by_image;
    for (int j = 0; j < ns.count(); ++j) by_image[table.av[std::size_t(j)]].push_back(j);
    group_partition out;
    for (auto& [image, members] : by_image) out.blocks.push_back(std::move(members));
    return out;
}

std::optional<alignment_violation> check_alignment(const order_spec& order,
                                                   const net_structure& ns,
                                                   const group_partition& partition) {
    av_table table = image_of_nets(order, ns);
    for (int b = 0; b < int(partition.blocks.size()); ++b) {
        const auto& block = partition.blocks[std::size_t(b)];
        for (int q = 1; q < int(block.size()); ++q) {
            const auto& prev = table.av[std::size_t(block[std::size_t(q - 1)])];
            const auto& cur = table.av[std::size_t(block[std::size_t(q)])];
            for (int i = 0; i < order.rows(); ++i) {
                // per row the image must hold its leading value, then drop to
                // zero for the rest of the block
                if (cur[std::size_t(i)] != prev[std::size_t(i)] && cur[std::size_t(i)] != 0)
                    return alignment_violation{b, q, i};
            }
        }
    }
    return std::nullopt;
}

const char* condition_kind_name(condition_kind k) {
    switch (k) {
    case condition_kind::direct: return "direct";
    case condition_kind::facet: return "facet";
    case condition_kind::grouped_sums: return "grouped";
    case condition_kind::sequential_sums: return "sequential";
    }
    return "unknown";
}

namespace {

// per-state tables shared by all checkers
struct sweep_tables {
    std::vector<state> space;
    std::vector<std::vector<std::int64_t>> row_values; // [state][row] = <A_i, x>
    std::vector<std::vector<char>> jump_stays;         // [state][net]  = x + v in space
    std::vector<std::vector<double>> base_rates;
    std::vector<std::vector<double>> variant_rates;
    std::vector<std::vector<std::optional<rational>>> base_exact;
    std::vector<std::vector<std::optional<rational>>> variant_exact;
};

sweep_tables build_tables(const coupled_pair& pair, std::size_t max_states) {
    sweep_tables t;
    t.space = enumerate_states(pair.base, max_states);
    const auto& A = pair.order.matrix();
    const int n = pair.nets.count();
    t.row_values.reserve(t.space.size());
    t.jump_stays.reserve(t.space.size());
    t.base_rates.reserve(t.space.size());
    t.variant_rates.reserve(t.space.size());
    t.base_exact.reserve(t.space.size());
    t.variant_exact.reserve(t.space.size());
    state target(std::size_t(pair.base.dim()), 0);
    for (const auto& x : t.space) {
        std::vector<std::int64_t> rv;
        rv.reserve(A.size());
        for (const auto& row : A) rv.push_back(row_dot(row, x));
        t.row_values.push_back(std::move(rv));
        std::vector<char> stays(std::size_t(n), 0);
        for (int j = 0; j < n; ++j) {
            const auto& v = pair.nets.vectors[std::size_t(j)];
            for (int i = 0; i < pair.base.dim(); ++i)
                target[std::size_t(i)] = x[std::size_t(i)] + v[std::size_t(i)];
            stays[std::size_t(j)] = pair.base.space().contains(target) ? 1 : 0;
        }
        t.jump_stays.push_back(std::move(stays));
        t.base_rates.push_back(rate_vector(pair.base, pair.nets, x));
        t.variant_rates.push_back(rate_vector(pair.variant, pair.nets, x));
        t.base_exact.push_back(rate_vector_exact(pair.base, pair.nets, x));
        t.variant_exact.push_back(rate_vector_exact(pair.variant, pair.nets, x));
    }
    return t;
}

bool related(const sweep_tables& t, std::size_t xi, std::size_t yi) {
    const auto& rx = t.row_values[xi];
    const auto& ry = t.row_values[yi];
    for (std::size_t i = 0; i < rx.size(); ++i)
        if (ry[i] < rx[i]) return false;
    return true;
}

// lhs <= rhs within tolerance; exact when both sides carry exact values
bool leq_within(double lhs, const std::optional<rational>& lhs_exact, double rhs,
                const std::optional<rational>& rhs_exact, const rate_tolerance& tol,
                std::uint64_t& comparisons) {
    ++comparisons;
    if (lhs_exact && rhs_exact) return rat_cmp(*lhs_exact, *rhs_exact) <= 0;
    double slack = std::max(tol.abs, tol.rel * std::max(std::abs(lhs), std::abs(rhs)));
    return lhs <= rhs + slack;
}

condition_report make_report(condition_kind kind, const coupled_pair& pair,
                             const rate_tolerance& tol) {
    condition_report r;
    r.kind = kind;
    r.tolerance = tol;
    r.truncation = pair.truncation;
    return r;
}

std::optional<int> nonunit_net(const av_table& table) {
    for (std::size_t j = 0; j < table.av.size(); ++j)
        for (std::int64_t e : table.av[j])
            if (e < -1 || e > 1) return int(j);
    return std::nullopt;
}

} // namespace

condition_report check_direct(const coupled_pair& pair, rate_tolerance tol,
                              std::size_t max_states) {
    condition_report r = make_report(condition_kind::direct, pair, tol);
    sweep_tables t = build_tables(pair, max_states);
    r.states = t.space.size();
    av_table table = image_of_nets(pair.order, pair.nets);
    const int n = pair.nets.count();
    const int m = pair.order.rows();
    for (std::size_t xi = 0; xi < t.space.size(); ++xi) {
        for (std::size_t yi = 0; yi < t.space.size(); ++yi) {
            if (!related(t, xi, yi)) continue;
            ++r.pairs_checked;
            for (int j = 0; j < n; ++j) {
                const auto& av_j = table.av[std::size_t(j)];
                // jump from y leaves the cone anchored at x: variant must not
                // outrun base in that direction
                bool down_gate = false;
                if (t.jump_stays[yi][std::size_t(j)]) {
                    for (int i = 0; i < m; ++i) {
                        if (t.row_values[yi][std::size_t(i)] + av_j[std::size_t(i)] <
                            t.row_values[xi][std::size_t(i)]) {
                            down_gate = true;
                            break;
                        }
                    }
                }
                // jump from x escapes the cone anchored at x + v relative to
                // y: base must not outrun variant
                bool up_gate = false;
                if (t.jump_stays[xi][std::size_t(j)]) {
                    for (int i = 0; i < m; ++i) {
                        if (t.row_values[yi][std::size_t(i)] <
                            t.row_values[xi][std::size_t(i)] + av_j[std::size_t(i)]) {
                            up_gate = true;
                            break;
                        }
                    }
                }
                if (down_gate && up_gate) ++r.equality_flags;
                if (down_gate &&
                    !leq_within(t.variant_rates[yi][std::size_t(j)],
                                t.variant_exact[yi][std::size_t(j)],
                                t.base_rates[xi][std::size_t(j)],
                                t.base_exact[xi][std::size_t(j)], tol, r.comparisons)) {
                    r.witness = condition_witness{t.space[xi], t.space[yi], {}, j, {}, "<=",
                                                  t.variant_rates[yi][std::size_t(j)],
                                                  t.base_rates[xi][std::size_t(j)]};
                    return r;
                }
                if (up_gate &&
                    !leq_within(t.base_rates[xi][std::size_t(j)],
                                t.base_exact[xi][std::size_t(j)],
                                t.variant_rates[yi][std::size_t(j)],
                                t.variant_exact[yi][std::size_t(j)], tol, r.comparisons)) {
                    r.witness = condition_witness{t.space[xi], t.space[yi], {}, j, {}, ">=",
                                                  t.variant_rates[yi][std::size_t(j)],
                                                  t.base_rates[xi][std::size_t(j)]};
                    return r;
                }
            }
        }
    }
    r.pass = true;
    return r;
}

condition_report check_facet(const coupled_pair& pair, rate_tolerance tol,
                             std::size_t max_states) {
    condition_report r = make_report(condition_kind::facet, pair, tol);
    av_table table = image_of_nets(pair.order, pair.nets);
    if (auto j = nonunit_net(table)) {
        r.failure_note = "A*v has an entry outside {-1,0,1} at net index " + std::to_string(*j);
        return r;
    }
    sweep_tables t = build_tables(pair, max_states);
    r.states = t.space.size();
    const int n = pair.nets.count();
    const int m = pair.order.rows();
    std::vector<int> active;
    for (std::size_t xi = 0; xi < t.space.size(); ++xi) {
        for (std::size_t yi = 0; yi < t.space.size(); ++yi) {
            if (!related(t, xi, yi)) continue;
            ++r.pairs_checked;
            active.clear();
            for (int i = 0; i < m; ++i)
                if (t.row_values[yi][std::size_t(i)] == t.row_values[xi][std::size_t(i)])
                    active.push_back(i);
            if (active.empty()) continue;
            for (int j = 0; j < n; ++j) {
                const auto& av_j = table.av[std::size_t(j)];
                bool forces_down = false, forces_up = false;
                for (int i : active) {
                    if (av_j[std::size_t(i)] < 0) forces_down = true;
                    if (av_j[std::size_t(i)] > 0) forces_up = true;
                }
                if (forces_down && forces_up) ++r.equality_flags;
                for (int i : active) {
                    std::int64_t sign = av_j[std::size_t(i)];
                    if (sign == 0) continue;
                    bool ok =
                        sign < 0
                            ? leq_within(t.variant_rates[yi][std::size_t(j)],
                                         t.variant_exact[yi][std::size_t(j)],
                                         t.base_rates[xi][std::size_t(j)],
                                         t.base_exact[xi][std::size_t(j)], tol, r.comparisons)
                            : leq_within(t.base_rates[xi][std::size_t(j)],
                                         t.base_exact[xi][std::size_t(j)],
                                         t.variant_rates[yi][std::size_t(j)],
                                         t.variant_exact[yi][std::size_t(j)], tol, r.comparisons);
                    if (!ok) {
                        r.witness = condition_witness{t.space[xi], t.space[yi], i, j, {},
                                                      sign < 0 ? "<=" : ">=",
                                                      t.variant_rates[yi][std::size_t(j)],
                                                      t.base_rates[xi][std::size_t(j)]};
                        return r;
                    }
                }
            }
        }
    }
    r.pass = true;
    return r;
}

namespace {

struct block_sums {
    double value = 0.0;
    std::optional<rational> exact = rational{0, 1};

    void add(double v, const std::optional<rational>& e) {
        value += v;
        if (exact) {
            if (e) exact = rat_add(*exact, *e);
            else exact.reset();
        }
    }
};

} // namespace

condition_report check_grouped_sums(const coupled_pair& pair, rate_tolerance tol,
                                    std::size_t max_states) {
    condition_report r = make_report(condition_kind::grouped_sums, pair, tol);
    av_table table = image_of_nets(pair.order, pair.nets);
    if (auto j = nonunit_net(table)) {
        r.failure_note = "A*v has an entry outside {-1,0,1} at net index " + std::to_string(*j);
        return r;
    }
    // blocks are definitional here: all nets sharing an A*v image stand in
    // for each other in the coupling, so only their summed rates must order
    group_partition partition = suggest_groups(pair.order, pair.nets);
    sweep_tables t = build_tables(pair, max_states);
    r.states = t.space.size();
    const int m = pair.order.rows();
    const int n_blocks = int(partition.blocks.size());
    std::vector<std::vector<std::int64_t>> eta;
    eta.resize(std::size_t(n_blocks));
    for (int k = 0; k < n_blocks; ++k)
        eta[std::size_t(k)] = table.av[std::size_t(partition.blocks[std::size_t(k)].front())];
    std::vector<int> active;
    for (std::size_t xi = 0; xi < t.space.size(); ++xi) {
        for (std::size_t yi = 0; yi < t.space.size(); ++yi) {
            if (!related(t, xi, yi)) continue;
            ++r.pairs_checked;
            active.clear();
            for (int i = 0; i < m; ++i)
                if (t.row_values[yi][std::size_t(i)] == t.row_values[xi][std::size_t(i)])
                    active.push_back(i);
            if (active.empty()) continue;
            for (int k = 0; k < n_blocks; ++k) {
                const auto& eta_k = eta[std::size_t(k)];
                bool forces_down = false, forces_up = false;
                for (int i : active) {
                    if (eta_k[std::size_t(i)] < 0) forces_down = true;
                    if (eta_k[std::size_t(i)] > 0) forces_up = true;
                }
                if (!forces_down && !forces_up) continue;
                if (forces_down && forces_up) ++r.equality_flags;
                block_sums base_sum, var_sum;
                for (int j : partition.blocks[std::size_t(k)]) {
                    base_sum.add(t.base_rates[xi][std::size_t(j)],
                                 t.base_exact[xi][std::size_t(j)]);
                    var_sum.add(t.variant_rates[yi][std::size_t(j)],
                                t.variant_exact[yi][std::size_t(j)]);
                }
                if (forces_down &&
                    !leq_within(var_sum.value, var_sum.exact, base_sum.value, base_sum.exact,
                                tol, r.comparisons)) {
                    int row = active.front();
                    for (int i : active)
                        if (eta_k[std::size_t(i)] < 0) { row = i; break; }
                    r.witness = condition_witness{t.space[xi], t.space[yi], row, {}, k, "<=",
                                                  var_sum.value, base_sum.value};
                    return r;
                }
                if (forces_up &&
                    !leq_within(base_sum.value, base_sum.exact, var_sum.value, var_sum.exact,
                                tol, r.comparisons)) {
                    int row = active.front();
                    for (int i : active)
                        if (eta_k[std::size_t(i)] > 0) { row = i; break; }
                    r.witness = condition_witness{t.space[xi], t.space[yi], row, {}, k, ">=",
                                                  var_sum.value, base_sum.value};
                    return r;
                }
            }
        }
    }
    r.pass = true;
    return r;
}

condition_report check_sequential_sums(const coupled_pair& pair,
                                       const group_partition& partition, rate_tolerance tol,
                                       std::size_t max_states) {
    partition.validate(pair.nets.count());
    condition_report r = make_report(condition_kind::sequential_sums, pair, tol);
    av_table table = image_of_nets(pair.order, pair.nets);
    if (auto j = nonunit_net(table)) {
        r.failure_note = "A*v has an entry outside {-1,0,1} at net index " + std::to_string(*j);
        return r;
    }
    if (auto viol = check_alignment(pair.order, pair.nets, partition)) {
        r.failure_note = "partition is not aligned with the order: block " +
                         std::to_string(viol->block) + ", position " +
                         std::to_string(viol->position) + ", row " + std::to_string(viol->row);
        return r;
    }
    sweep_tables t = build_tables(pair, max_states);
    r.states = t.space.size();
    const int m = pair.order.rows();
    const int n_blocks = int(partition.blocks.size());
    for (std::size_t xi = 0; xi < t.space.size(); ++xi) {
        for (std::size_t yi = 0; yi < t.space.size(); ++yi) {
            if (!related(t, xi, yi)) continue;
            ++r.pairs_checked;
            for (int i = 0; i < m; ++i) {
                if (t.row_values[yi][std::size_t(i)] != t.row_values[xi][std::size_t(i)])
                    continue;
                for (int k = 0; k < n_blocks; ++k) {
                    block_sums base_down, var_down, base_up, var_up;
                    bool any_down = false, any_up = false;
                    for (int j : partition.blocks[std::size_t(k)]) {
                        std::int64_t sign = table.av[std::size_t(j)][std::size_t(i)];
                        if (sign < 0) {
                            any_down = true;
                            base_down.add(t.base_rates[xi][std::size_t(j)],
                                          t.base_exact[xi][std::size_t(j)]);
                            var_down.add(t.variant_rates[yi][std::size_t(j)],
                                         t.variant_exact[yi][std::size_t(j)]);
                        } else if (sign > 0) {
                            any_up = true;
                            base_up.add(t.base_rates[xi][std::size_t(j)],
                                        t.base_exact[xi][std::size_t(j)]);
                            var_up.add(t.variant_rates[yi][std::size_t(j)],
                                       t.variant_exact[yi][std::size_t(j)]);
                        }
                    }
                    if (any_down &&
                        !leq_within(var_down.value, var_down.exact, base_down.value,
                                    base_down.exact, tol, r.comparisons)) {
                        r.witness = condition_witness{t.space[xi], t.space[yi], i, {}, k, "<=",
                                                      var_down.value, base_down.value};
                        return r;
                    }
                    if (any_up &&
                        !leq_within(base_up.value, base_up.exact, var_up.value, var_up.exact,
                                    tol, r.comparisons)) {
                        r.witness = condition_witness{t.space[xi], t.space[yi], i, {}, k, ">=",
                                                      var_up.value, base_up.value};
                        return r;
                    }
                }
            }
        }
    }
    r.pass = true;
    return r;
}

} // namespace scrn
