#include "scrn/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scrn/errors.hpp"

namespace scrn {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw validation_error("model: " + msg); }

param_value parse_param_value(const json& v, const std::string& where) {
    if (v.is_number_integer()) return param_value::from_int(v.get<std::int64_t>());
    if (v.is_number_float()) return param_value::from_double(v.get<double>());
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            auto num = rat_from_decimal(s.substr(0, slash));
            auto den = rat_from_decimal(s.substr(slash + 1));
            if (num && den && num->is_integer() && den->is_integer()) {
                auto r = rational::make(num->num, den->num);
                if (r) return param_value::from_rational(*r);
            }
        } else if (auto r = rat_from_decimal(s)) {
            return param_value::from_rational(*r);
        }
        bad(where + ": cannot read \"" + s + "\" as a number");
    }
    bad(where + ": expected a number or \"a/b\" string");
}

std::vector<std::int64_t> parse_int_vector(const json& v, const std::string& where) {
    if (!v.is_array()) bad(where + ": expected an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) bad(where + ": expected integers");
        out.push_back(e.get<std::int64_t>());
    }
    return out;
}

std::int64_t resolve_constraint_value(const json& v,
                                      const std::vector<std::pair<std::string, param_value>>& params,
                                      const std::string& where) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        for (const auto& [pname, pv] : params) {
            if (pname != name) continue;
            if (pv.exact && pv.exact->is_integer()) return pv.exact->num;
            bad(where + ": parameter '" + name + "' is not an integer");
        }
        bad(where + ": unknown parameter '" + name + "'");
    }
    bad(where + ": constraint value must be an integer or a parameter name");
}

std::vector<std::optional<std::int64_t>> parse_caps(const json& v, int dim,
                                                    const std::string& where) {
    std::vector<std::optional<std::int64_t>> caps;
    if (v.is_null()) return caps;
    if (v.is_number_integer()) {
        caps.assign(std::size_t(dim), v.get<std::int64_t>());
        return caps;
    }
    if (v.is_array()) {
        for (const auto& e : v) {
            if (e.is_null())
                caps.push_back(std::nullopt);
            else if (e.is_number_integer())
                caps.push_back(e.get<std::int64_t>());
            else
                bad(where + ": caps entries must be integers or null");
        }
        return caps;
    }
    bad(where + ": caps must be null, an integer, or an array");
}

std::vector<linear_constraint> parse_constraints(
    const json& v, const std::vector<std::pair<std::string, param_value>>& params,
    const std::string& where) {
    std::vector<linear_constraint> out;
    if (v.is_null()) return out;
    if (!v.is_array()) bad(where + ": expected an array of constraints");
    for (const auto& c : v) {
        if (!c.is_object() || !c.contains("coeffs") || !c.contains("value"))
            bad(where + ": each constraint needs coeffs and value");
        linear_constraint lc;
        lc.coeffs = parse_int_vector(c.at("coeffs"), where + ".coeffs");
        lc.value = resolve_constraint_value(c.at("value"), params, where + ".value");
        out.push_back(std::move(lc));
    }
    return out;
}

json dump_param_value(double value, const std::optional<rational>& exact) {
    if (exact) {
        if (exact->is_integer()) return json(exact->num);
        return json(exact->str());
    }
    return json(value);
}

} // namespace

model_document parse_model(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("model JSON: ") + e.what());
    }
    if (!doc.is_object()) bad("top level must be an object");
    for (const char* key : {"species", "params", "reactions", "state_space"})
        if (!doc.contains(key)) bad(std::string("missing key '") + key + "'");

    std::vector<std::string> species;
    for (const auto& s : doc.at("species")) {
        if (!s.is_string()) bad("species must be strings");
        species.push_back(s.get<std::string>());
    }
    const int d = int(species.size());

    std::vector<std::pair<std::string, param_value>> params;
    if (!doc.at("params").is_object()) bad("params must be an object");
    for (const auto& [name, v] : doc.at("params").items())
        params.emplace_back(name, parse_param_value(v, "params." + name));

    std::vector<reaction> reactions;
    if (!doc.at("reactions").is_array()) bad("reactions must be an array");
    for (const auto& r : doc.at("reactions")) {
        const std::string where = "reactions[" + std::to_string(reactions.size()) + "]";
        if (!r.is_object()) bad(where + ": expected an object");
        reaction rx;
        if (!r.contains("reactant") || !r.contains("product") || !r.contains("rate"))
            bad(where + ": needs reactant, product, rate");
        rx.reactant = parse_int_vector(r.at("reactant"), where + ".reactant");
        rx.product = parse_int_vector(r.at("product"), where + ".product");
        const json& rate = r.at("rate");
        if (!rate.is_object() || rate.size() != 1)
            bad(where + ".rate: expected {\"mass_action\": ...} or {\"expr\": ...}");
        if (rate.contains("mass_action")) {
            rx.rate.kind = rate_law::kind_t::mass_action;
            const json& v = rate.at("mass_action");
            if (v.is_string() && v.get<std::string>().find('/') == std::string::npos &&
                !v.get<std::string>().empty() &&
                !std::isdigit(static_cast<unsigned char>(v.get<std::string>()[0]))) {
                rx.rate.param_name = v.get<std::string>();
            } else {
                rx.rate.literal = parse_param_value(v, where + ".rate.mass_action");
            }
        } else if (rate.contains("expr")) {
            rx.rate.kind = rate_law::kind_t::expr;
            if (!rate.at("expr").is_string()) bad(where + ".rate.expr: expected a string");
            rx.rate.expr_text = rate.at("expr").get<std::string>();
        } else {
            bad(where + ".rate: unknown rate kind");
        }
        reactions.push_back(std::move(rx));
    }

    const json& sp = doc.at("state_space");
    if (!sp.is_object() || !sp.contains("kind")) bad("state_space needs a kind");
    const std::string kind = sp.at("kind").get<std::string>();
    std::optional<state_space> space;
    if (kind == "enumerated") {
        if (!sp.contains("states") || !sp.at("states").is_array())
            bad("state_space.states must be an array");
        std::vector<state> states;
        for (const auto& s : sp.at("states"))
            states.push_back(parse_int_vector(s, "state_space.states"));
        space = state_space::enumerated(std::move(states));
    } else if (kind == "conservation") {
        auto eqs = parse_constraints(sp.contains("equalities") ? sp.at("equalities") : json(),
                                     params, "state_space.equalities");
        auto ineqs = parse_constraints(
            sp.contains("inequalities") ? sp.at("inequalities") : json(), params,
            "state_space.inequalities");
        auto caps = parse_caps(sp.contains("caps") ? sp.at("caps") : json(), d,
                               "state_space.caps");
        space = state_space::constrained(d, std::move(eqs), std::move(ineqs), std::move(caps));
    } else if (kind == "box") {
        auto caps = parse_caps(sp.contains("caps") ? sp.at("caps") : json(), d,
                               "state_space.caps");
        space = state_space::box(d, std::move(caps));
    } else {
        bad("state_space.kind must be enumerated, conservation, or box");
    }

    std::optional<std::vector<std::vector<std::int64_t>>> order_rows;
    if (doc.contains("order_matrix") && !doc.at("order_matrix").is_null()) {
        std::vector<std::vector<std::int64_t>> rows;
        if (!doc.at("order_matrix").is_array()) bad("order_matrix must be an array of rows");
        for (const auto& row : doc.at("order_matrix"))
            rows.push_back(parse_int_vector(row, "order_matrix"));
        order_rows = std::move(rows);
    }

    return model_document{
        network(std::move(species), std::move(params), std::move(reactions), std::move(*space)),
        std::move(order_rows)};
}

model_document load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const model_document& doc) {
    const network& net = doc.net;
    json out;
    out["species"] = net.species();

    json params = json::object();
    for (std::size_t i = 0; i < net.param_names().size(); ++i)
        params[net.param_names()[i]] =
            dump_param_value(net.param_values()[i], net.param_exacts()[i]);
    out["params"] = std::move(params);

    json reactions = json::array();
    for (const auto& rx : net.reactions()) {
        json r;
        r["reactant"] = rx.reactant;
        r["product"] = rx.product;
        if (rx.rate.kind == rate_law::kind_t::mass_action) {
            if (!rx.rate.param_name.empty())
                r["rate"] = json{{"mass_action", rx.rate.param_name}};
            else
                r["rate"] = json{{"mass_action",
                                  dump_param_value(rx.rate.literal.value, rx.rate.literal.exact)}};
        } else {
            r["rate"] = json{{"expr", rx.rate.expr_text}};
        }
        reactions.push_back(std::move(r));
    }
    out["reactions"] = std::move(reactions);

    const state_space& sp = net.space();
    json jsp;
    switch (sp.kind()) {
        case state_space::kind_t::enumerated: {
            jsp["kind"] = "enumerated";
            json states = json::array();
            for (const auto& x : sp.states()) states.push_back(x);
            jsp["states"] = std::move(states);
            break;
        }
        case state_space::kind_t::constrained: {
            jsp["kind"] = "conservation";
            auto dump_constraints = [](const std::vector<linear_constraint>& cs) {
                json arr = json::array();
                for (const auto& c : cs)
                    arr.push_back(json{{"coeffs", c.coeffs}, {"value", c.value}});
                return arr;
            };
            jsp["equalities"] = dump_constraints(sp.equalities());
            jsp["inequalities"] = dump_constraints(sp.inequalities());
            break;
        }
        case state_space::kind_t::box:
            jsp["kind"] = "box";
            break;
    }
    if (sp.kind() != state_space::kind_t::enumerated) {
        bool any_cap = false;
        for (const auto& c : sp.caps())
            if (c) any_cap = true;
        if (any_cap) {
            json caps = json::array();
            for (const auto& c : sp.caps())
                caps.push_back(c ? json(*c) : json());
            jsp["caps"] = std::move(caps);
        } else {
            jsp["caps"] = nullptr;
        }
    }
    out["state_space"] = std::move(jsp);

    if (doc.order_rows) {
        json rows = json::array();
        for (const auto& row : *doc.order_rows) rows.push_back(row);
        out["order_matrix"] = std::move(rows);
    }
    return out.dump(2) + "\n";
}

} // namespace scrn
