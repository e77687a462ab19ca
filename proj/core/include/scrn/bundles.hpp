#pragma once

#include <map>
#include <string>
#include <vector>

#include "scrn/conditions.hpp"
#include "scrn/coupling.hpp"
#include "scrn/model.hpp"
#include "scrn/order.hpp"

namespace scrn {

// A worked example: a network built at concrete parameter values plus the
// cone orders, scan partitions, landmark states, and target predicates
// that make its comparison runs reproducible from the command line.
struct example_bundle {
    std::string id;
    std::string summary;
    network net;
    std::map<std::string, double> params;    // resolved values by name
    std::vector<std::string> defaulted;      // filled by convention, not chosen by the caller
    std::map<std::string, order_spec> orders;          // "default" always present
    std::map<std::string, group_partition> partitions; // scan orders keyed like orders
    std::map<std::string, state> states;               // landmark states (start, absorbed, ...)
    std::map<std::string, std::string> targets;        // named predicates over x1..xd
    std::string variant_param;  // the constant a comparison usually perturbs
    std::string variant_note;   // which perturbations keep each order valid
};

std::vector<std::string> bundle_ids();
bool is_bundle_id(const std::string& id);

// overrides replace bundle defaults by name; unknown names, fractional or
// negative totals, and out-of-range rates raise invalid_params
example_bundle build_bundle(const std::string& id,
                            const std::map<std::string, double>& overrides = {});

// base/variant pair over one bundle: the variant re-binds the overridden
// rate constants, everything else (species, reactions, space, totals) is
// shared; totals cannot vary because they shape the state space
coupled_pair bundle_pair(const example_bundle& bundle,
                         const std::map<std::string, double>& variant_overrides,
                         const std::string& order_name = "default");

}  // namespace scrn
