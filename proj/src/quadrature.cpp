#include "pxlap/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pxlap {

namespace {

// Legendre nodes on [-1,1] by Newton iteration on the recurrence.
void legendre_nodes(int n, std::vector<double>& xs, std::vector<double>& ws) {
    xs.resize(n);
    ws.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace

QuadratureRule gauss_interval(int n) {
    if (n < 1) throw std::invalid_argument("gauss_interval: n must be >= 1");
    std::vector<double> xs, ws;
    legendre_nodes(n, xs, ws);
    QuadratureRule r;
    r.dim = 1;
    r.degree = 2 * n - 1;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = 0.5 * (1.0 + xs[i]);
        r.w[i] = 0.5 * ws[i];
    }
    return r;
}

QuadratureRule triangle_rule(int degree) {
    QuadratureRule r;
    r.dim = 2;
    if (degree <= 1) {
        r.degree = 1;
        r.x = {1.0 / 3.0};
        r.y = {1.0 / 3.0};
        r.w = {0.5};
        return r;
    }
    if (degree <= 2) {
        // edge-midpoint rule
        r.degree = 2;
        r.x = {0.5, 0.5, 0.0};
        r.y = {0.0, 0.5, 0.5};
        r.w = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        return r;
    }
    if (degree <= 5) {
        // 7-point symmetric rule (Strang-Fix), degree 5
        r.degree = 5;
        const double s15 = std::sqrt(15.0);
        const double a = (6.0 - s15) / 21.0;
        const double b = (6.0 + s15) / 21.0;
        const double wa = (155.0 - s15) / 2400.0;
        const double wb = (155.0 + s15) / 2400.0;
        r.x = {1.0 / 3.0, a, 1.0 - 2.0 * a, a, b, 1.0 - 2.0 * b, b};
        r.y = {1.0 / 3.0, a, a, 1.0 - 2.0 * a, b, b, 1.0 - 2.0 * b};
        r.w = {9.0 / 80.0, wa, wa, wa, wb, wb, wb};
        return r;
    }
    // Conical product: map [0,1]^2 -> triangle via (u,v) -> (u(1-v), v) with
    // Jacobian (1-v). A degree-d integrand becomes degree d+1 in v, so n
    // Gauss points per direction with 2n-1 >= d+1 are exact.
    const int n = (degree + 3) / 2;
    const QuadratureRule g = gauss_interval(n);
    r.degree = degree;
    r.x.reserve(n * n);
    r.y.reserve(n * n);
    r.w.reserve(n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = g.x[i], v = g.x[j];
            r.x.push_back(u * (1.0 - v));
            r.y.push_back(v);
            r.w.push_back(g.w[i] * g.w[j] * (1.0 - v));
        }
    }
    return r;
}

QuadratureRule default_rule(int dim, int degree) {
    if (dim == 1) {
        const int n = std::max(1, (degree + 2) / 2);
        return gauss_interval(n);
    }
    return triangle_rule(degree);
}

}  // namespace pxlap
