#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrn/model.hpp"

namespace scrn {

// A model file bundles a network with an optional comparison-order matrix.
struct model_document {
    network net;
    std::optional<std::vector<std::vector<std::int64_t>>> order_rows;
};

// JSON layout:
//   species      array of names
//   params       object: name -> number | "a/b"
//   reactions    array of {reactant, product, rate}; rate is
//                {"mass_action": name-or-number} or {"expr": "text"}
//   state_space  {"kind": "enumerated", "states": [[...], ...]}
//              | {"kind": "conservation", "equalities": [...],
//                 "inequalities": [...], "caps": ...}
//              | {"kind": "box", "caps": number | [number|null, ...]}
//   order_matrix optional array of integer rows
// Constraint values may name a parameter; they are resolved on parse.
model_document parse_model(const std::string& json_text);
model_document load_model(const std::string& path);
std::string serialize_model(const model_document& doc);

} // namespace scrn
