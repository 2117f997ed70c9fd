#include "finsler/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace finsler {

class ExprParser {
public:
    ExprParser(const std::string& src, int dim, MetricExpr& out) : src_(src), dim_(dim), out_(out) {}

    int parse_all() {
        int root = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return root;
    }

private:
    using Kind = MetricExpr::Kind;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("metric expression: " + msg, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(MetricExpr::Node node) {
        out_.nodes_.push_back(node);
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = add({Kind::Add, 0.0, 0, lhs, parse_term()});
            else if (accept('-'))
                lhs = add({Kind::Sub, 0.0, 0, lhs, parse_term()});
            else
                return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            if (accept('*'))
                lhs = add({Kind::Mul, 0.0, 0, lhs, parse_factor()});
            else if (accept('/'))
                lhs = add({Kind::Div, 0.0, 0, lhs, parse_factor()});
            else
                return lhs;
        }
    }

    int parse_factor() {
        if (accept('-')) return add({Kind::Neg, 0.0, 0, parse_factor(), -1});
        int base = parse_base();
        if (accept('^')) {
            skip_ws();
            bool negative = accept('-');
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (start == pos_) fail("exponent after '^' must be an integer");
            int k = std::atoi(src_.substr(start, pos_ - start).c_str());
            if (k > 64) fail("exponent too large");
            base = add({Kind::PowInt, 0.0, negative ? -k : k, base, -1});
        }
        return base;
    }

    int parse_base() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            std::string word = src_.substr(start, pos_ - start);
            if ((word[0] == 'x' || word[0] == 'y') && word.size() > 1 &&
                word.find_first_not_of("0123456789", 1) == std::string::npos) {
                int idx = std::atoi(word.c_str() + 1);
                if (idx < 1 || idx > dim_) {
                    pos_ = start;
                    fail("unknown identifier '" + word + "' (dimension is " + std::to_string(dim_) + ")");
                }
                return add({word[0] == 'x' ? Kind::VarX : Kind::VarY, 0.0, idx - 1, -1, -1});
            }
            Kind fn;
            if (word == "sqrt")
                fn = Kind::Sqrt;
            else if (word == "exp")
                fn = Kind::Exp;
            else if (word == "log")
                fn = Kind::Log;
            else if (word == "sin")
                fn = Kind::Sin;
            else if (word == "cos")
                fn = Kind::Cos;
            else {
                pos_ = start;
                fail("unknown identifier '" + word + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            int arg = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return add({fn, 0.0, 0, arg, -1});
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    int parse_number() {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return add({Kind::Number, v, 0, -1, -1});
    }

    const std::string& src_;
    int dim_;
    MetricExpr& out_;
    std::size_t pos_ = 0;
};

MetricExpr MetricExpr::parse(const std::string& source, int dim) {
    MetricExpr e;
    e.source_ = source;
    e.dim_ = dim;
    ExprParser parser(e.source_, dim, e);
    e.root_ = parser.parse_all();
    return e;
}

bool MetricExpr::uses_y() const {
    for (const auto& n : nodes_)
        if (n.kind == Kind::VarY) return true;
    return false;
}

bool MetricExpr::uses_x() const {
    for (const auto& n : nodes_)
        if (n.kind == Kind::VarX) return true;
    return false;
}

}  // namespace finsler
