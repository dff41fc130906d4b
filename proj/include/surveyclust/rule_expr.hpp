#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace surveyclust {

// Integer predicate language for consistency rules.
//
//   expr    := or
//   or      := and ('||' and)*
//   and     := not ('&&' not)*
//   not     := '!' not | compare
//   compare := sum (('<' | '<=' | '>' | '>=' | '==' | '!=') sum)?
//   sum     := product (('+' | '-') product)*
//   product := unary ('*' unary)*
//   unary   := '-' unary | INTEGER | IDENT | '(' expr ')'
//
// Identifiers name question ids. Comparisons and logical operators yield 0/1;
// a rule holds when its expression evaluates to a nonzero value.
class RuleExpr {
public:
    using Lookup = std::function<std::int64_t(std::string_view)>;

    // Throws ConfigError on syntax errors.
    static RuleExpr parse(std::string_view text);

    std::int64_t evaluate(const Lookup& lookup) const;

    // Distinct identifiers in order of first appearance.
    const std::vector<std::string>& identifiers() const { return identifiers_; }

private:
    enum class Op {
        Constant, Variable, Negate, Not,
        Add, Sub, Mul,
        Less, LessEq, Greater, GreaterEq, Equal, NotEqual,
        And, Or
    };
    struct Node {
        Op op;
        std::int64_t value = 0;  // constant, or identifier index
        int lhs = -1;
        int rhs = -1;
    };

    friend class RuleParser;

    std::int64_t eval_node(int index, const std::vector<std::int64_t>& vars) const;

    std::vector<Node> nodes_;
    std::vector<std::string> identifiers_;
    int root_ = -1;
};

}  // namespace surveyclust
