#pragma once

#include <memory>
#include <string>

namespace pxlap {

// arithmetic over x, y with sin, cos, pi, numeric literals; ^ is right-associative
// and binds tighter than unary minus
class Expression {
  public:
    Expression() = default;

    // throws std::invalid_argument with the offending position on syntax errors
    static Expression parse(const std::string& text);

    double operator()(double x, double y) const;
    bool valid() const { return root_ != nullptr; }
    const std::string& text() const { return text_; }

    struct Node;  // implementation detail, defined in expr.cpp

  private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace pxlap
