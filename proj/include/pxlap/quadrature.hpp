#pragma once

#include <vector>

namespace pxlap {

// Quadrature rule on the reference element: the unit interval [0,1] in 1D,
// the unit triangle {x,y >= 0, x+y <= 1} in 2D. Weights sum to the reference
// measure (1 and 1/2 respectively).
struct QuadratureRule {
    int dim = 1;
    int degree = 1;  // declared polynomial exactness
    std::vector<double> x;
    std::vector<double> y;  // unused in 1D
    std::vector<double> w;

    int size() const { return static_cast<int>(w.size()); }
};

// n-point Gauss-Legendre rule mapped to [0,1]; exact to degree 2n-1.
QuadratureRule gauss_interval(int n);

// Rule on the unit triangle exact to at least `degree`. Degrees up to 5 use
// compact symmetric rules; higher degrees fall back to a conical product of
// Gauss rules.
QuadratureRule triangle_rule(int degree);

// Rule of at least the requested degree for the given element dimension.
QuadratureRule default_rule(int dim, int degree);

}  // namespace pxlap
