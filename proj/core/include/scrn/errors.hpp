#pragma once

#include <stdexcept>
#include <string>

namespace scrn {

// Base for all library errors. Subclasses distinguish caller bugs
// (bad input, violated preconditions) from resource limits hit at runtime.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// malformed model/expression text
struct parse_error : error {
    using error::error;
};

// structurally invalid input (dimension checks aside)
struct validation_error : error {
    using error::error;
};

// vectors of mismatched length, matrix/state width disagreement
struct dimension_mismatch : error {
    using error::error;
};

// states not related by the order at hand
struct not_comparable : error {
    using error::error;
};

// documented precondition of an operation violated
struct precondition_failed : error {
    using error::error;
};

// expression evaluation produced NaN/negative rate, division by zero, ...
struct evaluation_error : error {
    using error::error;
};

// state space cannot be enumerated without a cap
struct infinite_space : error {
    using error::error;
};

// enumeration would exceed the configured state budget
struct cap_exceeded : error {
    using error::error;
};

// no finite uniformization constant exists over the requested set
struct unbounded_rates : error {
    using error::error;
};

// adaptive truncation grew past its hard cap
struct truncation_limit : error {
    using error::error;
};

// every replicate was censored; no estimate possible
struct all_censored : error {
    using error::error;
};

// monotone direction of a target set could not be established
struct direction_unknown : error {
    using error::error;
};

// bad numeric arguments to closed-form routines
struct invalid_params : error {
    using error::error;
};

} // namespace scrn
