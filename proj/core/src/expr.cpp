#include "scrn/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "scrn/errors.hpp"

namespace scrn {

namespace {

struct token {
    enum kind_t {
        number, ident,
        plus, minus, star, slash, caret,
        lparen, rparen, comma,
        lt, le, gt, ge, eq, ne,
        bang, amp_amp, pipe_pipe,
        end,
    } kind;
    std::size_t pos = 0;
    std::string text;
};

std::vector<token> lex(const std::string& src) {
    std::vector<token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg, std::size_t at) {
        throw parse_error(msg + " at offset " + std::to_string(at) + " in \"" + src + "\"");
    };
    while (i < src.size()) {
        char ch = src[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            if (i < src.size() && src[i] == '.') {
                ++i;
                if (i >= src.size() || !std::isdigit(static_cast<unsigned char>(src[i])))
                    fail("expected digits after decimal point", i);
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t save = i;
                ++i;
                if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
                if (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                } else {
                    i = save; // the e belongs to an identifier that follows
                }
            }
            out.push_back({token::number, start, src.substr(start, i - start)});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                ++i;
            out.push_back({token::ident, start, src.substr(start, i - start)});
            continue;
        }
        auto two = [&](char a, char b) {
            return ch == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two('<', '=')) { out.push_back({token::le, i, "<="}); i += 2; continue; }
        if (two('>', '=')) { out.push_back({token::ge, i, ">="}); i += 2; continue; }
        if (two('=', '=')) { out.push_back({token::eq, i, "=="}); i += 2; continue; }
        if (two('!', '=')) { out.push_back({token::ne, i, "!="}); i += 2; continue; }
        if (two('&', '&')) { out.push_back({token::amp_amp, i, "&&"}); i += 2; continue; }
        if (two('|', '|')) { out.push_back({token::pipe_pipe, i, "||"}); i += 2; continue; }
        switch (ch) {
            case '+': out.push_back({token::plus, i, "+"}); break;
            case '-': out.push_back({token::minus, i, "-"}); break;
            case '*': out.push_back({token::star, i, "*"}); break;
            case '/': out.push_back({token::slash, i, "/"}); break;
            case '^': out.push_back({token::caret, i, "^"}); break;
            case '(': out.push_back({token::lparen, i, "("}); break;
            case ')': out.push_back({token::rparen, i, ")"}); break;
            case ',': out.push_back({token::comma, i, ","}); break;
            case '<': out.push_back({token::lt, i, "<"}); break;
            case '>': out.push_back({token::gt, i, ">"}); break;
            case '!': out.push_back({token::bang, i, "!"}); break;
            default: fail(std::string("unexpected character '") + ch + "'", i);
        }
        ++i;
    }
    out.push_back({token::end, src.size(), ""});
    return out;
}

} // namespace

class expr_parser {
public:
    expr_parser(const std::string& src, int dim, const std::vector<std::string>& params)
        : src_(src), dim_(dim), params_(params), tokens_(lex(src)) {}

    expression run() {
        expression e;
        e.text_ = src_;
        int root = parse_or(e);
        expect(token::end, "trailing input");
        e.root_ = root;
        e.boolean_ = is_bool(e, root);
        return e;
    }

private:
    const std::string& src_;
    int dim_;
    const std::vector<std::string>& params_;
    std::vector<token> tokens_;
    std::size_t at_ = 0;

    using op = expression::op;
    using node = expression::node;

    const token& peek() const { return tokens_[at_]; }
    token take() { return tokens_[at_++]; }

    [[noreturn]] void fail(const std::string& msg, const token& t) const {
        throw parse_error(msg + " at offset " + std::to_string(t.pos) + " in \"" + src_ + "\"");
    }

    void expect(token::kind_t k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what, peek());
        ++at_;
    }

    static bool is_bool(const expression& e, int i) {
        switch (e.nodes_[i].kind) {
            case op::lt: case op::le: case op::gt: case op::ge:
            case op::eq: case op::ne:
            case op::lnot: case op::land: case op::lor:
                return true;
            default:
                return false;
        }
    }

    int add_node(expression& e, node n) {
        e.nodes_.push_back(n);
        return int(e.nodes_.size()) - 1;
    }

    int require_numeric(const expression& e, int i, const token& t) {
        if (is_bool(e, i)) fail("comparison used as a number", t);
        return i;
    }

    int require_boolean(const expression& e, int i, const token& t) {
        if (!is_bool(e, i)) fail("number used as a condition", t);
        return i;
    }

    int parse_or(expression& e) {
        int lhs = parse_and(e);
        while (peek().kind == token::pipe_pipe) {
            token t = take();
            require_boolean(e, lhs, t);
            int rhs = require_boolean(e, parse_and(e), t);
            lhs = add_node(e, {op::lor, lhs, rhs});
        }
        return lhs;
    }

    int parse_and(expression& e) {
        int lhs = parse_not(e);
        while (peek().kind == token::amp_amp) {
            token t = take();
            require_boolean(e, lhs, t);
            int rhs = require_boolean(e, parse_not(e), t);
            lhs = add_node(e, {op::land, lhs, rhs});
        }
        return lhs;
    }

    int parse_not(expression& e) {
        if (peek().kind == token::bang) {
            token t = take();
            int a = require_boolean(e, parse_not(e), t);
            return add_node(e, {op::lnot, a});
        }
        return parse_relation(e);
    }

    int parse_relation(expression& e) {
        int lhs = parse_sum(e);
        op k;
        switch (peek().kind) {
            case token::lt: k = op::lt; break;
            case token::le: k = op::le; break;
            case token::gt: k = op::gt; break;
            case token::ge: k = op::ge; break;
            case token::eq: k = op::eq; break;
            case token::ne: k = op::ne; break;
            default: return lhs;
        }
        token t = take();
        require_numeric(e, lhs, t);
        int rhs = require_numeric(e, parse_sum(e), t);
        return add_node(e, {k, lhs, rhs});
    }

    int parse_sum(expression& e) {
        int lhs = parse_term(e);
        while (peek().kind == token::plus || peek().kind == token::minus) {
            token t = take();
            require_numeric(e, lhs, t);
            int rhs = require_numeric(e, parse_term(e), t);
            lhs = add_node(e, {t.kind == token::plus ? op::add : op::sub, lhs, rhs});
        }
        return lhs;
    }

    int parse_term(expression& e) {
        int lhs = parse_factor(e);
        while (peek().kind == token::star || peek().kind == token::slash) {
            token t = take();
            require_numeric(e, lhs, t);
            int rhs = require_numeric(e, parse_factor(e), t);
            lhs = add_node(e, {t.kind == token::star ? op::mul : op::div, lhs, rhs});
        }
        return lhs;
    }

    int parse_factor(expression& e) {
        if (peek().kind == token::minus) {
            token t = take();
            int a = require_numeric(e, parse_factor(e), t);
            return add_node(e, {op::neg, a});
        }
        return parse_power(e);
    }

    int parse_power(expression& e) {
        int base = parse_primary(e);
        if (peek().kind != token::caret) return base;
        token t = take();
        require_numeric(e, base, t);
        bool neg = false;
        if (peek().kind == token::minus) {
            take();
            neg = true;
        }
        if (peek().kind != token::number) fail("exponent must be an integer literal", peek());
        token lit = take();
        if (lit.text.find('.') != std::string::npos ||
            lit.text.find('e') != std::string::npos || lit.text.find('E') != std::string::npos)
            fail("exponent must be an integer literal", lit);
        std::int64_t ev = std::strtoll(lit.text.c_str(), nullptr, 10);
        if (peek().kind == token::caret) fail("chained '^' needs parentheses", peek());
        node n{op::pow, base};
        n.exponent = neg ? -ev : ev;
        return add_node(e, n);
    }

    int parse_primary(expression& e) {
        token t = peek();
        if (t.kind == token::number) {
            take();
            node n{op::num};
            n.value = std::strtod(t.text.c_str(), nullptr);
            n.exact = rat_from_decimal(t.text);
            return add_node(e, n);
        }
        if (t.kind == token::lparen) {
            take();
            int inner = parse_or(e);
            expect(token::rparen, "')'");
            return inner;
        }
        if (t.kind == token::ident) {
            take();
            if (peek().kind == token::lparen) return parse_call(e, t);
            return resolve_ident(e, t);
        }
        fail("expected a value", t);
    }

    int parse_call(expression& e, const token& name) {
        int arity;
        op k;
        if (name.text == "min") { k = op::fmin; arity = 2; }
        else if (name.text == "max") { k = op::fmax; arity = 2; }
        else if (name.text == "hill") { k = op::fhill; arity = 3; }
        else fail("unknown function '" + name.text + "'", name);
        expect(token::lparen, "'('");
        int args[3] = {-1, -1, -1};
        for (int i = 0; i < arity; ++i) {
            if (i > 0) expect(token::comma, "','");
            args[i] = require_numeric(e, parse_or(e), name);
        }
        expect(token::rparen, "')'");
        return add_node(e, {k, args[0], args[1], args[2]});
    }

    int resolve_ident(expression& e, const token& t) {
        const std::string& s = t.text;
        if (s.size() >= 2 && s[0] == 'x' && s.find_first_not_of("0123456789", 1) == std::string::npos) {
            long idx = std::strtol(s.c_str() + 1, nullptr, 10);
            if (idx < 1 || idx > dim_)
                throw validation_error("variable " + s + " out of range; model has " +
                                       std::to_string(dim_) + " species");
            node n{op::var};
            n.index = int(idx) - 1;
            return add_node(e, n);
        }
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (params_[i] == s) {
                node n{op::param};
                n.index = int(i);
                return add_node(e, n);
            }
        }
        throw validation_error("unknown identifier '" + s + "' in \"" + src_ + "\"");
    }
};

expression expression::parse(const std::string& text, int dim,
                             const std::vector<std::string>& params) {
    return expr_parser(text, dim, params).run();
}

namespace {

double pow_int(double base, std::int64_t e) {
    if (e < 0) return 1.0 / pow_int(base, -e);
    double acc = 1.0, b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        e >>= 1;
        if (e > 0) b *= b;
    }
    return acc;
}

} // namespace

double expression::eval_node(int i, const std::int64_t* x, const std::vector<double>& p) const {
    const node& n = nodes_[i];
    switch (n.kind) {
        case op::num: return n.value;
        case op::var: return double(x[n.index]);
        case op::param: return p[n.index];
        case op::add: return eval_node(n.a, x, p) + eval_node(n.b, x, p);
        case op::sub: return eval_node(n.a, x, p) - eval_node(n.b, x, p);
        case op::mul: return eval_node(n.a, x, p) * eval_node(n.b, x, p);
        case op::div: {
            double den = eval_node(n.b, x, p);
            if (den == 0.0) throw evaluation_error("division by zero in \"" + text_ + "\"");
            return eval_node(n.a, x, p) / den;
        }
        case op::neg: return -eval_node(n.a, x, p);
        case op::pow: {
            double base = eval_node(n.a, x, p);
            if (base == 0.0 && n.exponent < 0)
                throw evaluation_error("zero raised to a negative power in \"" + text_ + "\"");
            return pow_int(base, n.exponent);
        }
        case op::fmin: return std::min(eval_node(n.a, x, p), eval_node(n.b, x, p));
        case op::fmax: return std::max(eval_node(n.a, x, p), eval_node(n.b, x, p));
        case op::fhill: {
            double xv = eval_node(n.a, x, p);
            double kv = eval_node(n.b, x, p);
            double hv = eval_node(n.c, x, p);
            if (xv < 0.0 || kv < 0.0)
                throw evaluation_error("hill requires nonnegative arguments in \"" + text_ + "\"");
            double xh = std::pow(xv, hv);
            double kh = std::pow(kv, hv);
            double den = xh + kh;
            if (den == 0.0)
                throw evaluation_error("hill(0, 0, h) undefined in \"" + text_ + "\"");
            return xh / den;
        }
        default:
            throw evaluation_error("boolean node evaluated as a number in \"" + text_ + "\"");
    }
}

bool expression::eval_bool_node(int i, const std::int64_t* x, const std::vector<double>& p) const {
    const node& n = nodes_[i];
    switch (n.kind) {
        case op::lt: return eval_node(n.a, x, p) < eval_node(n.b, x, p);
        case op::le: return eval_node(n.a, x, p) <= eval_node(n.b, x, p);
        case op::gt: return eval_node(n.a, x, p) > eval_node(n.b, x, p);
        case op::ge: return eval_node(n.a, x, p) >= eval_node(n.b, x, p);
        case op::eq: return eval_node(n.a, x, p) == eval_node(n.b, x, p);
        case op::ne: return eval_node(n.a, x, p) != eval_node(n.b, x, p);
        case op::lnot: return !eval_bool_node(n.a, x, p);
        case op::land: return eval_bool_node(n.a, x, p) && eval_bool_node(n.b, x, p);
        case op::lor: return eval_bool_node(n.a, x, p) || eval_bool_node(n.b, x, p);
        default:
            throw evaluation_error("numeric node evaluated as a condition in \"" + text_ + "\"");
    }
}

std::optional<rational> expression::eval_exact_node(
    int i, const std::int64_t* x, const std::vector<std::optional<rational>>& p) const {
    const node& n = nodes_[i];
    auto bin = [&](auto f) -> std::optional<rational> {
        auto a = eval_exact_node(n.a, x, p);
        if (!a) return std::nullopt;
        auto b = eval_exact_node(n.b, x, p);
        if (!b) return std::nullopt;
        return f(*a, *b);
    };
    switch (n.kind) {
        case op::num: return n.exact;
        case op::var: return rational::from_int(x[n.index]);
        case op::param: return p[n.index];
        case op::add: return bin(rat_add);
        case op::sub: return bin(rat_sub);
        case op::mul: return bin(rat_mul);
        case op::div: return bin(rat_div);
        case op::neg: {
            auto a = eval_exact_node(n.a, x, p);
            if (!a) return std::nullopt;
            return rat_sub(rational{0, 1}, *a);
        }
        case op::pow: {
            auto a = eval_exact_node(n.a, x, p);
            if (!a) return std::nullopt;
            return rat_pow(*a, n.exponent);
        }
        case op::fmin: {
            return bin([](const rational& a, const rational& b) -> std::optional<rational> {
                return rat_cmp(a, b) <= 0 ? a : b;
            });
        }
        case op::fmax: {
            return bin([](const rational& a, const rational& b) -> std::optional<rational> {
                return rat_cmp(a, b) >= 0 ? a : b;
            });
        }
        default:
            return std::nullopt; // hill and booleans have no exact path
    }
}

double expression::eval(const std::int64_t* x, const std::vector<double>& params) const {
    if (root_ < 0) throw evaluation_error("empty expression");
    if (boolean_) throw evaluation_error("predicate evaluated as a number: \"" + text_ + "\"");
    return eval_node(root_, x, params);
}

bool expression::eval_bool(const std::int64_t* x, const std::vector<double>& params) const {
    if (root_ < 0) throw evaluation_error("empty expression");
    if (!boolean_) throw evaluation_error("numeric expression used as a predicate: \"" + text_ + "\"");
    return eval_bool_node(root_, x, params);
}

std::optional<rational> expression::eval_exact(
    const std::int64_t* x, const std::vector<std::optional<rational>>& params) const {
    if (root_ < 0 || boolean_) return std::nullopt;
    return eval_exact_node(root_, x, params);
}

} // namespace scrn
