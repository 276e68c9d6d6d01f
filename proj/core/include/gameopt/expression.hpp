#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gameopt/types.hpp"

namespace gameopt {

/// Closed-form scalar expression over state components.
///
/// Grammar: numbers, the variables x (alias of x1 when dim == 1) and
/// x1..xd, the constant pi, binary + - * /, unary minus, parentheses and
/// the functions sin, cos, tanh, exp. The argument of exp is clamped to
/// [-kExpClamp, kExpClamp]. Expressions are compiled once to a postfix
/// program and evaluated without allocation.
class Expression {
public:
    static constexpr double kExpClamp = 40.0;

    /// Throws InvalidInput naming the column of the first offending token.
    static Expression parse(std::string_view text, int dim);

    double operator()(std::span<const double> x) const;
    double operator()(const Vector& x) const {
        return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    }

    const std::string& text() const noexcept { return text_; }
    int dim() const noexcept { return dim_; }
    /// True when no variable appears.
    bool is_constant() const noexcept;

    enum class Op : unsigned char { push, var, add, sub, mul, div, neg, sin, cos, tanh, exp };
    struct Instr {
        Op op;
        int var = 0;
        double value = 0.0;
    };

private:
    std::string text_;
    int dim_ = 1;
    std::vector<Instr> program_;
    int max_depth_ = 0;
};

}  // namespace gameopt
