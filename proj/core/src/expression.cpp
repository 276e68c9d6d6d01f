#include "gameopt/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace gameopt {

namespace {

class Parser {
public:
    Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    std::vector<Expression::Instr> run() {
        parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character");
        return std::move(program_);
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw InvalidInput("expression '" + std::string(text_) + "': " + why + " at column " +
                           std::to_string(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void emit(Expression::Op op, int var = 0, double value = 0.0) {
        program_.push_back({op, var, value});
    }

    void parse_sum() {
        parse_product();
        for (;;) {
            if (accept('+')) {
                parse_product();
                emit(Expression::Op::add);
            } else if (accept('-')) {
                parse_product();
                emit(Expression::Op::sub);
            } else {
                return;
            }
        }
    }

    void parse_product() {
        parse_unary();
        for (;;) {
            if (accept('*')) {
                parse_unary();
                emit(Expression::Op::mul);
            } else if (accept('/')) {
                parse_unary();
                emit(Expression::Op::div);
            } else {
                return;
            }
        }
    }

    void parse_unary() {
        if (accept('-')) {
            parse_unary();
            emit(Expression::Op::neg);
            return;
        }
        if (accept('+')) {
            parse_unary();
            return;
        }
        parse_atom();
    }

    void parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (accept('(')) {
            parse_sum();
            if (!accept(')')) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            parse_name();
            return;
        }
        fail("unexpected character");
    }

    void parse_number() {
        const std::string rest(text_.substr(pos_));
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos_ += used;
        emit(Expression::Op::push, 0, value);
    }

    void parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        static constexpr std::array<std::pair<std::string_view, Expression::Op>, 4> kFunctions{{
            {"sin", Expression::Op::sin},
            {"cos", Expression::Op::cos},
            {"tanh", Expression::Op::tanh},
            {"exp", Expression::Op::exp},
        }};
        for (const auto& [fname, op] : kFunctions) {
            if (name == fname) {
                if (!accept('(')) fail("expected '(' after " + std::string(fname));
                parse_sum();
                if (!accept(')')) fail("expected ')'");
                emit(op);
                return;
            }
        }
        if (name == "pi") {
            emit(Expression::Op::push, 0, std::numbers::pi);
            return;
        }
        if (name == "x") {
            if (dim_ != 1) {
                pos_ = start;
                fail("'x' is only allowed in one dimension; use x1..x" + std::to_string(dim_));
            }
            emit(Expression::Op::var, 0);
            return;
        }
        if (name.size() >= 2 && name[0] == 'x' &&
            std::all_of(name.begin() + 1, name.end(),
                        [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            const int index = std::stoi(std::string(name.substr(1)));
            if (index < 1 || index > dim_) {
                pos_ = start;
                fail("variable " + std::string(name) + " out of range for dimension " +
                     std::to_string(dim_));
            }
            emit(Expression::Op::var, index - 1);
            return;
        }
        pos_ = start;
        fail("unknown name '" + std::string(name) + "'");
    }

    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;
    std::vector<Expression::Instr> program_;
};

}  // namespace

Expression Expression::parse(std::string_view text, int dim) {
    check_dim(dim);
    Expression e;
    e.text_ = std::string(text);
    e.dim_ = dim;
    e.program_ = Parser(text, dim).run();
    int depth = 0;
    for (const auto& ins : e.program_) {
        switch (ins.op) {
            case Op::push:
            case Op::var:
                ++depth;
                break;
            case Op::add:
            case Op::sub:
            case Op::mul:
            case Op::div:
                --depth;
                break;
            default:
                break;
        }
        e.max_depth_ = std::max(e.max_depth_, depth);
    }
    if (e.max_depth_ > 64) throw InvalidInput("expression too deeply nested: " + e.text_);
    return e;
}

bool Expression::is_constant() const noexcept {
    return std::none_of(program_.begin(), program_.end(),
                        [](const Instr& ins) { return ins.op == Op::var; });
}

double Expression::operator()(std::span<const double> x) const {
    std::array<double, 64> stack;
    int top = 0;
    for (const auto& ins : program_) {
        switch (ins.op) {
            case Op::push:
                stack[top++] = ins.value;
                break;
            case Op::var:
                stack[top++] = x[static_cast<std::size_t>(ins.var)];
                break;
            case Op::add:
                --top;
                stack[top - 1] += stack[top];
                break;
            case Op::sub:
                --top;
                stack[top - 1] -= stack[top];
                break;
            case Op::mul:
                --top;
                stack[top - 1] *= stack[top];
                break;
            case Op::div:
                --top;
                stack[top - 1] /= stack[top];
                break;
            case Op::neg:
                stack[top - 1] = -stack[top - 1];
                break;
            case Op::sin:
                stack[top - 1] = std::sin(stack[top - 1]);
                break;
            case Op::cos:
                stack[top - 1] = std::cos(stack[top - 1]);
                break;
            case Op::tanh:
                stack[top - 1] = std::tanh(stack[top - 1]);
                break;
            case Op::exp:
                stack[top - 1] = std::exp(std::clamp(stack[top - 1], -kExpClamp, kExpClamp));
                break;
        }
    }
    return stack[0];
}

}  // namespace gameopt
