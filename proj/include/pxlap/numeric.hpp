#pragma once

#include <cmath>
#include <vector>

namespace pxlap {

// Compensated (Kahan) accumulator. All quadrature reductions in the library
// run through this in a fixed traversal order, so results are reproducible
// across runs to well below 1e-13.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// sign(t) * |t|^(q-1), the scalar weight |t|^(q-2) * t written in a form
// that is finite for all t when q > 1 (the q < 2, t -> 0 case included).
inline double signed_pow(double t, double q) {
    if (t == 0.0) return 0.0;
    const double m = std::pow(std::abs(t), q - 1.0);
    return t > 0.0 ? m : -m;
}

// |v|^(q-2) * v for a 2-vector, computed as |v|^(q-1) * (v/|v|) so that the
// intermediate never overflows when q < 2 and |v| is tiny.
inline void vector_pow(double vx, double vy, double q, double& ox, double& oy) {
    const double m = std::hypot(vx, vy);
    if (m == 0.0) {
        ox = oy = 0.0;
        return;
    }
    const double f = std::pow(m, q - 1.0);
    ox = f * (vx / m);
    oy = f * (vy / m);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

inline double norm2(const std::vector<double>& a) {
    KahanSum s;
    for (double x : a) s.add(x * x);
    return std::sqrt(s.value());
}

inline double norm_inf(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

// y += alpha * x
inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace pxlap
