#include "scrn/bundles.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include "scrn/errors.hpp"

namespace scrn {

namespace {

rate_law ma(const char* param) {
    rate_law r;
    r.kind = rate_law::kind_t::mass_action;
    r.param_name = param;
    return r;
}

rate_law ex(const char* text) {
    rate_law r;
    r.kind = rate_law::kind_t::expr;
    r.expr_text = text;
    return r;
}

using values = std::map<std::string, double>;

// totals are integral and shape the state space; rates may sit at zero;
// positives must stay strictly positive (they appear in denominators)
enum class param_kind { total, rate, positive };

struct param_def {
    const char* name;
    double fallback;
    param_kind kind;
};

void check_value(const std::string& id, const param_def& def, double v) {
    const std::string label = "bundle '" + id + "' parameter '" + def.name + "'";
    if (!std::isfinite(v)) throw invalid_params(label + " must be finite");
    switch (def.kind) {
        case param_kind::total:
            if (v < 0 || v != std::floor(v) || v > 1e15)
                throw invalid_params(label + " must be a nonnegative integer");
            break;
        case param_kind::rate:
            if (v < 0) throw invalid_params(label + " must be nonnegative");
            break;
        case param_kind::positive:
            if (v <= 0) throw invalid_params(label + " must be positive");
            break;
    }
}

std::int64_t tot(const values& v, const char* name) {
    return std::llround(v.at(name));
}

param_value pv(const values& v, const char* name) {
    return param_value::from_double(v.at(name));
}

example_bundle make_enzyme1(const values& v) {
    const std::int64_t stot = tot(v, "Stot");
    const std::int64_t etot = tot(v, "Etot");
    example_bundle b{.net = network{
        {"S", "P", "E", "SE"},
        {{"Stot", param_value::from_int(stot)},
         {"Etot", param_value::from_int(etot)},
         {"k1", pv(v, "k1")},
         {"k2", pv(v, "k2")},
         {"k3", pv(v, "k3")}},
        {
            {{1, 0, 1, 0}, {0, 0, 0, 1}, ma("k1")},  // S + E -> SE
            {{0, 0, 0, 1}, {1, 0, 1, 0}, ma("k2")},  // SE -> S + E
            {{0, 0, 0, 1}, {0, 1, 1, 0}, ma("k3")},  // SE -> P + E
        },
        state_space::constrained(4, {{{1, 1, 0, 1}, stot}, {{0, 0, 1, 1}, etot}}, {})}};
    b.orders.emplace("default", order_spec::from_rows({{-1, 0, 0, 0}, {0, 1, 0, 0}}));
    b.states = {{"start", {stot, 0, etot, 0}}, {"absorbed", {0, stot, etot, 0}}};
    b.targets = {{"converted", "x2 == Stot"}};
    b.variant_param = "k3";
    b.variant_note = "raise k3: faster conversion keeps the variant ahead";
    return b;
}

example_bundle make_enzyme2(const values& v) {
    const std::int64_t etot = tot(v, "Etot");
    example_bundle b{.net = network{
        {"S", "P", "E", "SE"},
        {{"Etot", param_value::from_int(etot)},
         {"k1", pv(v, "k1")},
         {"k2", pv(v, "k2")},
         {"k3", pv(v, "k3")},
         {"k4", pv(v, "k4")},
         {"k5", pv(v, "k5")},
         {"k6", pv(v, "k6")}},
        {
            {{1, 0, 1, 0}, {0, 0, 0, 1}, ma("k1")},  // S + E -> SE
            {{0, 0, 0, 1}, {1, 0, 1, 0}, ma("k2")},  // SE -> S + E
            {{0, 0, 0, 1}, {0, 1, 1, 0}, ma("k3")},  // SE -> P + E
            {{0, 1, 1, 0}, {0, 0, 0, 1}, ma("k4")},  // P + E -> SE
            {{0, 0, 0, 0}, {1, 0, 0, 0}, ma("k5")},  // 0 -> S
            {{1, 0, 0, 0}, {0, 0, 0, 0}, ma("k6")},  // S -> 0
        },
        state_space::constrained(4, {{{0, 0, 1, 1}, etot}}, {})}};
    b.orders.emplace("default",
                     order_spec::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, -1, 0}}));
    b.states = {{"start", {0, 0, etot, 0}}};
    b.variant_param = "k5";
    b.variant_note = "raise k5: extra substrate inflow keeps the variant ahead";
    return b;
}

example_bundle make_braess(const values& v) {
    const std::int64_t stot = tot(v, "Stot");
    example_bundle b{.net = network{
        {"S1", "S2", "S3", "S4"},
        {{"Stot", param_value::from_int(stot)},
         {"k1", pv(v, "k1")},
         {"k2", pv(v, "k2")},
         {"k3", pv(v, "k3")},
         {"k4", pv(v, "k4")},
         {"k5", pv(v, "k5")}},
        {
            {{1, 0, 0, 0}, {0, 1, 0, 0}, ma("k1")},  // S1 -> S2
            {{0, 1, 0, 0}, {0, 0, 0, 1}, ma("k2")},  // S2 -> S4
            {{1, 0, 0, 0}, {0, 0, 1, 0}, ma("k3")},  // S1 -> S3
            {{0, 0, 1, 0}, {0, 0, 0, 1}, ma("k4")},  // S3 -> S4
            {{0, 1, 0, 0}, {0, 0, 1, 0}, ma("k5")},  // S2 -> S3 crossover
        },
        state_space::constrained(4, {{{1, 1, 1, 1}, stot}}, {})}};
    // net vectors sort to [s1->s3, s1->s2, s2->s4, s2->s3, s3->s4]
    b.orders.emplace("default", order_spec::from_rows({{-1, 0, 0, 0}, {0, -1, -1, 0}}));
    b.orders.emplace("slowdown",
                     order_spec::from_rows({{-1, 0, 0, 0}, {0, 0, -1, 0}, {0, -1, -1, 0}}));
    b.orders.emplace("speedup",
                     order_spec::from_rows({{-1, 0, 0, 0}, {0, -1, 0, 0}, {0, -1, -1, 0}}));
    b.partitions.emplace("default",
                         suggest_groups(b.orders.at("default"), derive_net_structure(b.net)));
    b.partitions.emplace("slowdown", group_partition{{{0, 1}, {4, 2}, {3}}});
    b.partitions.emplace("speedup", group_partition{{{1, 0}, {2, 4}, {3}}});
    b.states = {{"start", {stot, 0, 0, 0}}, {"absorbed", {0, 0, 0, stot}}};
    b.targets = {{"absorbed", "x4 == Stot"}};
    b.variant_param = "k5";
    b.variant_note =
        "default order needs k2 == k4 and tolerates any change to k5; "
        "slowdown needs k2 > k4 and a decrease; speedup needs k2 < k4 and an increase";
    return b;
}

example_bundle make_histone(const values& v) {
    const std::int64_t dtot = tot(v, "Dtot");
    example_bundle b{.net = network{
        {"DR", "DA"},
        {{"Dtot", param_value::from_int(dtot)},
         {"k1a", pv(v, "k1a")},
         {"k1b", pv(v, "k1b")},
         {"k2a", pv(v, "k2a")},
         {"k2b", pv(v, "k2b")},
         {"k3a", pv(v, "k3a")},
         {"k3b", pv(v, "k3b")},
         {"mu", pv(v, "mu")},
         {"c", pv(v, "c")}},
        {
            {{0, 0}, {0, 1}, ex("(Dtot - (x1 + x2)) * (k1a + k1b*x2)")},  // mark active
            {{0, 0}, {1, 0}, ex("(Dtot - (x1 + x2)) * (k2a + k2b*x1)")},  // mark repressed
            {{0, 1}, {0, 0}, ex("x2 * (k3a + k3b*x1)")},                  // erase active
            {{1, 0}, {0, 0}, ex("x1 * mu * (c*k3a + k3b*x2)")},          // erase repressed
        },
        state_space::constrained(2, {}, {{{1, 1}, dtot}})}};
    b.orders.emplace("default", order_spec::from_rows({{-1, 0}, {0, 1}}));
    b.states = {{"repressed", {dtot, 0}}, {"active", {0, dtot}}};
    b.targets = {{"active", "x1 == 0 && x2 == Dtot"}, {"repressed", "x1 == Dtot && x2 == 0"}};
    b.variant_param = "mu";
    b.variant_note = "raise mu: faster erasure of repressive marks keeps the variant ahead";
    return b;
}

example_bundle make_histone_tf(const values& v) {
    const std::int64_t dtot = tot(v, "Dtot");
    example_bundle b{.net = network{
        {"DR", "DA", "P"},
        {{"Dtot", param_value::from_int(dtot)},
         {"k1a0", pv(v, "k1a0")},
         {"k1a1", pv(v, "k1a1")},
         {"k1b", pv(v, "k1b")},
         {"k2a", pv(v, "k2a")},
         {"k2b", pv(v, "k2b")},
         {"k3a", pv(v, "k3a")},
         {"k3b", pv(v, "k3b")},
         {"mu", pv(v, "mu")},
         {"c", pv(v, "c")},
         {"k5a", pv(v, "k5a")},
         {"k6a", pv(v, "k6a")},
         {"K", pv(v, "K")},
         {"h", pv(v, "h")}},
        {
            // marking of active sites is boosted by the expressed protein
            {{0, 0, 0}, {0, 1, 0},
             ex("(Dtot - (x1 + x2)) * (k1a0 + k1a1*hill(x3, K, h) + k1b*x2)")},
            {{0, 0, 0}, {1, 0, 0}, ex("(Dtot - (x1 + x2)) * (k2a + k2b*x1)")},
            {{0, 1, 0}, {0, 0, 0}, ex("x2 * (k3a + k3b*x1)")},
            {{1, 0, 0}, {0, 0, 0}, ex("x1 * mu * (c*k3a + k3b*x2)")},
            {{0, 1, 0}, {0, 1, 1}, ma("k5a")},  // DA -> DA + P
            {{0, 0, 1}, {0, 0, 0}, ma("k6a")},  // P -> 0
        },
        state_space::constrained(3, {}, {{{1, 1, 0}, dtot}})}};
    b.orders.emplace("default", order_spec::from_rows({{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    b.states = {{"repressed", {dtot, 0, 0}}, {"active", {0, dtot, 0}}};
    b.targets = {{"active", "x1 == 0 && x2 == Dtot"}};
    b.variant_param = "k5a";
    b.variant_note = "raise k5a: faster expression feeds back through hill(x3, K, h)";
    return b;
}

struct bundle_def {
    const char* id;
    const char* summary;
    std::vector<param_def> params;
    example_bundle (*make)(const values&);
};

const std::vector<bundle_def>& registry() {
    using pk = param_kind;
    static const std::vector<bundle_def> defs = {
        {"braess",
         "two-route relaxation network with a crossover edge",
         {{"Stot", 2, pk::total},
          {"k1", 1, pk::rate},
          {"k2", 1, pk::rate},
          {"k3", 1, pk::rate},
          {"k4", 1, pk::rate},
          {"k5", 1, pk::rate}},
         &make_braess},
        {"enzyme1",
         "closed enzyme kinetics: substrate conversion with a shared enzyme pool",
         {{"Stot", 3, pk::total},
          {"Etot", 2, pk::total},
          {"k1", 1, pk::rate},
          {"k2", 1, pk::rate},
          {"k3", 1, pk::rate}},
         &make_enzyme1},
        {"enzyme2",
         "open enzyme kinetics: substrate exchange with the environment",
         {{"Etot", 2, pk::total},
          {"k1", 1, pk::rate},
          {"k2", 1, pk::rate},
          {"k3", 1, pk::rate},
          {"k4", 1, pk::rate},
          {"k5", 1, pk::rate},
          {"k6", 1, pk::rate}},
         &make_enzyme2},
        {"histone",
         "two-mark chromatin switch with mutual repression",
         {{"Dtot", 3, pk::total},
          {"k1a", 1, pk::rate},
          {"k1b", 1, pk::rate},
          {"k2a", 1, pk::rate},
          {"k2b", 1, pk::rate},
          {"k3a", 1, pk::rate},
          {"k3b", 1, pk::rate},
          {"mu", 1, pk::rate},
          {"c", 1, pk::rate}},
         &make_histone},
        {"histone_tf",
         "chromatin switch coupled to an expressed protein that feeds back on marking",
         {{"Dtot", 3, pk::total},
          {"k1a0", 1, pk::rate},
          {"k1a1", 1, pk::rate},
          {"k1b", 1, pk::rate},
          {"k2a", 1, pk::rate},
          {"k2b", 1, pk::rate},
          {"k3a", 1, pk::rate},
          {"k3b", 1, pk::rate},
          {"mu", 1, pk::rate},
          {"c", 1, pk::rate},
          {"k5a", 1, pk::rate},
          {"k6a", 1, pk::rate},
          {"K", 1, pk::positive},
          {"h", 1, pk::positive}},
         &make_histone_tf},
    };
    return defs;
}

const bundle_def* find_bundle(const std::string& id) {
    for (const auto& def : registry())
        if (id == def.id) return &def;
    return nullptr;
}

const param_def* find_param(const bundle_def& def, const std::string& name) {
    for (const auto& p : def.params)
        if (name == p.name) return &p;
    return nullptr;
}

std::string known_ids() {
    std::string out;
    for (const auto& def : registry()) {
        if (!out.empty()) out += ", ";
        out += def.id;
    }
    return out;
}

}  // namespace

std::vector<std::string> bundle_ids() {
    std::vector<std::string> ids;
    for (const auto& def : registry()) ids.emplace_back(def.id);
    return ids;
}

bool is_bundle_id(const std::string& id) { return find_bundle(id) != nullptr; }

example_bundle build_bundle(const std::string& id, const std::map<std::string, double>& overrides) {
    const bundle_def* def = find_bundle(id);
    if (!def) throw invalid_params("unknown bundle '" + id + "'; known bundles: " + known_ids());
    for (const auto& [name, value] : overrides) {
        (void)value;
        if (!find_param(*def, name))
            throw invalid_params("bundle '" + id + "' has no parameter '" + name + "'");
    }
    values v;
    std::vector<std::string> defaulted;
    for (const auto& p : def->params) {
        auto it = overrides.find(p.name);
        const double value = it != overrides.end() ? it->second : p.fallback;
        check_value(id, p, value);
        v.emplace(p.name, value);
        // totals double as figure-sized demo defaults, so only rate-like
        // constants are reported as convention-filled
        if (it == overrides.end() && p.kind != param_kind::total) defaulted.push_back(p.name);
    }
    example_bundle b = def->make(v);
    b.id = id;
    b.summary = def->summary;
    b.params = std::move(v);
    b.defaulted = std::move(defaulted);
    return b;
}

coupled_pair bundle_pair(const example_bundle& bundle,
                         const std::map<std::string, double>& variant_overrides,
                         const std::string& order_name) {
    const bundle_def* def = find_bundle(bundle.id);
    if (!def) throw invalid_params("unknown bundle '" + bundle.id + "'");
    auto oit = bundle.orders.find(order_name);
    if (oit == bundle.orders.end()) {
        std::string names;
        for (const auto& [name, spec] : bundle.orders) {
            (void)spec;
            if (!names.empty()) names += ", ";
            names += name;
        }
        throw invalid_params("bundle '" + bundle.id + "' has no order '" + order_name +
                             "'; available: " + names);
    }
    network variant = bundle.net;
    for (const auto& [name, value] : variant_overrides) {
        const param_def* p = find_param(*def, name);
        if (!p) throw invalid_params("bundle '" + bundle.id + "' has no parameter '" + name + "'");
        if (p->kind == param_kind::total)
            throw invalid_params("totals stay fixed across a pair; '" + name + "' cannot vary");
        check_value(bundle.id, *p, value);
        variant = variant.with_param(name, param_value::from_double(value));
    }
    return coupled_pair::make(bundle.net, std::move(variant), oit->second);
}

}  // namespace scrn
