#include "surveyclust/rule_expr.hpp"

#include <algorithm>
#include <cctype>

#include "surveyclust/error.hpp"

namespace surveyclust {

class RuleParser {
public:
    RuleParser(std::string_view text, RuleExpr& out) : text_(text), out_(out) {}

    void run() {
        out_.root_ = parse_or();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(text_.substr(pos_, 1)) + "'");
    }

private:
    using Op = RuleExpr::Op;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("rule expression '" + std::string(text_) + "': " + what + " at offset " +
                          std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    int add(Op op, int lhs = -1, int rhs = -1, std::int64_t value = 0) {
        out_.nodes_.push_back({op, value, lhs, rhs});
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_or() {
        int lhs = parse_and();
        while (accept("||")) lhs = add(Op::Or, lhs, parse_and());
        return lhs;
    }

    int parse_and() {
        int lhs = parse_not();
        while (accept("&&")) lhs = add(Op::And, lhs, parse_not());
        return lhs;
    }

    int parse_not() {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '!' && text_.substr(pos_, 2) != "!=") {
            ++pos_;
            return add(Op::Not, parse_not());
        }
        return parse_compare();
    }

    int parse_compare() {
        int lhs = parse_sum();
        // Two-character operators first so "<=" is not read as "<".
        static constexpr std::pair<std::string_view, Op> kOps[] = {
            {"<=", Op::LessEq}, {">=", Op::GreaterEq}, {"==", Op::Equal},
            {"!=", Op::NotEqual}, {"<", Op::Less}, {">", Op::Greater}};
        for (const auto& [token, op] : kOps) {
            if (accept(token)) return add(op, lhs, parse_sum());
        }
        return lhs;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            if (accept("+")) {
                lhs = add(Op::Add, lhs, parse_product());
            } else if (accept("-")) {
                lhs = add(Op::Sub, lhs, parse_product());
            } else {
                return lhs;
            }
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        while (accept("*")) lhs = add(Op::Mul, lhs, parse_unary());
        return lhs;
    }

    int parse_unary() {
        if (accept("-")) return add(Op::Negate, parse_unary());
        if (accept("(")) {
            int inner = parse_or();
            if (!accept(")")) fail("expected ')'");
            return inner;
        }
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t value = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                value = value * 10 + (text_[pos_] - '0');
                if (value > 1'000'000'000) fail("integer literal too large");
                ++pos_;
            }
            return add(Op::Constant, -1, -1, value);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            std::string name(text_.substr(start, pos_ - start));
            auto& ids = out_.identifiers_;
            auto it = std::find(ids.begin(), ids.end(), name);
            if (it == ids.end()) it = ids.insert(ids.end(), std::move(name));
            return add(Op::Variable, -1, -1, it - ids.begin());
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    RuleExpr& out_;
};

RuleExpr RuleExpr::parse(std::string_view text) {
    RuleExpr expr;
    RuleParser(text, expr).run();
    return expr;
}

std::int64_t RuleExpr::evaluate(const Lookup& lookup) const {
    std::vector<std::int64_t> vars;
    vars.reserve(identifiers_.size());
    for (const auto& id : identifiers_) vars.push_back(lookup(id));
    return eval_node(root_, vars);
}

std::int64_t RuleExpr::eval_node(int index, const std::vector<std::int64_t>& vars) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    switch (n.op) {
        case Op::Constant: return n.value;
        case Op::Variable: return vars[static_cast<std::size_t>(n.value)];
        case Op::Negate: return -eval_node(n.lhs, vars);
        case Op::Not: return eval_node(n.lhs, vars) == 0 ? 1 : 0;
        case Op::And: return (eval_node(n.lhs, vars) != 0 && eval_node(n.rhs, vars) != 0) ? 1 : 0;
        case Op::Or: return (eval_node(n.lhs, vars) != 0 || eval_node(n.rhs, vars) != 0) ? 1 : 0;
        default: break;
    }
    const std::int64_t a = eval_node(n.lhs, vars);
    const std::int64_t b = eval_node(n.rhs, vars);
    switch (n.op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Less: return a < b;
        case Op::LessEq: return a <= b;
        case Op::Greater: return a > b;
        case Op::GreaterEq: return a >= b;
        case Op::Equal: return a == b;
        case Op::NotEqual: return a != b;
        default: return 0;
    }
}

}  // namespace surveyclust
