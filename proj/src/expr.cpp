#include "pxlap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace pxlap {

struct Expression::Node {
    enum Kind { Num, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos } kind;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;

    double eval(double x, double y) const {
        switch (kind) {
            case Num: return value;
            case VarX: return x;
            case VarY: return y;
            case Add: return a->eval(x, y) + b->eval(x, y);
            case Sub: return a->eval(x, y) - b->eval(x, y);
            case Mul: return a->eval(x, y) * b->eval(x, y);
            case Div: return a->eval(x, y) / b->eval(x, y);
            case Pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Neg: return -a->eval(x, y);
            case Sin: return std::sin(a->eval(x, y));
            case Cos: return std::cos(a->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
  public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression error at position " +
                                    std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static NodePtr make(Expression::Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr,
                        double v = 0.0) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = k;
        n->value = v;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (accept('+'))
                e = make(Expression::Node::Add, e, term());
            else if (accept('-'))
                e = make(Expression::Node::Sub, e, term());
            else
                return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (accept('*'))
                e = make(Expression::Node::Mul, e, unary());
            else if (accept('/'))
                e = make(Expression::Node::Div, e, unary());
            else
                return e;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Expression::Node::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Expression::Node::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Expression::Node::Num, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Expression::Node::VarX);
            if (name == "y") return make(Expression::Node::VarY);
            if (name == "pi")
                return make(Expression::Node::Num, nullptr, nullptr, std::acos(-1.0));
            if (name == "sin" || name == "cos") {
                expect('(');
                NodePtr arg = expr();
                expect(')');
                return make(name == "sin" ? Expression::Node::Sin : Expression::Node::Cos,
                            arg);
            }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).run();
    e.text_ = text;
    return e;
}

double Expression::operator()(double x, double y) const {
    if (!root_) throw std::logic_error("empty expression");
    return root_->eval(x, y);
}

}  // namespace pxlap
