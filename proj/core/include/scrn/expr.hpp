#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrn/rational.hpp"

namespace scrn {

// Infix expression over state variables x1..xd and named parameters.
// Numeric operators: + - * / and ^ with a literal integer exponent;
// builtins min(a,b), max(a,b), hill(x,K,h) = x^h / (K^h + x^h).
// Predicates additionally use comparisons (< <= > >= == !=) and ! && ||.
//
// Evaluation is double-based; eval_exact follows the same tree with
// rational arithmetic and reports nullopt wherever exactness is lost
// (hill, non-rational parameters, overflow).
class expression {
public:
    expression() = default;

    // dim fixes the valid variables x1..x<dim>; params lists the known
    // parameter names. Unknown identifiers raise validation_error, syntax
    // problems raise parse_error.
    static expression parse(const std::string& text, int dim,
                            const std::vector<std::string>& params);

    bool is_boolean() const { return boolean_; }
    const std::string& text() const { return text_; }
    bool empty() const { return nodes_.empty(); }

    // numeric evaluation; root must be numeric
    double eval(const std::int64_t* x, const std::vector<double>& params) const;

    // exact evaluation along the same tree; nullopt when any step is inexact
    std::optional<rational> eval_exact(const std::int64_t* x,
                                       const std::vector<std::optional<rational>>& params) const;

    // predicate evaluation; root must be boolean
    bool eval_bool(const std::int64_t* x, const std::vector<double>& params) const;

private:
    enum class op : std::uint8_t {
        num, var, param,
        add, sub, mul, div, neg, pow,
        fmin, fmax, fhill,
        lt, le, gt, ge, eq, ne,
        lnot, land, lor,
    };
    struct node {
        op kind;
        int a = -1, b = -1, c = -1;      // child indices
        double value = 0.0;              // num
        std::optional<rational> exact;   // num
        int index = 0;                   // var/param
        std::int64_t exponent = 0;       // pow
    };

    std::vector<node> nodes_;
    int root_ = -1;
    bool boolean_ = false;
    std::string text_;

    double eval_node(int i, const std::int64_t* x, const std::vector<double>& p) const;
    bool eval_bool_node(int i, const std::int64_t* x, const std::vector<double>& p) const;
    std::optional<rational> eval_exact_node(int i, const std::int64_t* x,
                                            const std::vector<std::optional<rational>>& p) const;

    friend class expr_parser;
};

} // namespace scrn
