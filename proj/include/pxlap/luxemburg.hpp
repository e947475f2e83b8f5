#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pxlap/mesh.hpp"

namespace pxlap {

// Variable exponent p(x) with cached bounds. Bounds are refreshed whenever the
// field is sampled on a mesh; the admissibility requirement is p > 1
// everywhere (checked at every quadrature point).
struct ExponentField {
    std::function<double(double, double)> evaluator;
    double p_minus = 2.0;
    double p_plus = 2.0;

    static ExponentField constant(double p);
    static ExponentField from(std::function<double(double, double)> f);

    double operator()(double x, double y) const { return evaluator(x, y); }
};

// Evaluates p at every cached quadrature point of the mesh, refreshes the
// bounds, and throws std::domain_error if p <= 1 anywhere.
std::vector<double> sample_exponent(const Mesh& mesh, ExponentField& p);

// A field known only through its values at the quadrature points of some
// mesh, stored flat in the cache order [element * nq + q]. ncomp = 1 for
// scalars, 2 for gradients. The physical points ride along so exponent
// evaluation never needs the mesh itself.
struct SampledField {
    int ncomp = 1;
    std::vector<double> values;                  // [pt * ncomp + c]
    std::vector<double> weights;                 // quad weight x |J|, one per point
    std::vector<std::array<double, 2>> points;   // physical coordinates

    int n_points() const { return static_cast<int>(weights.size()); }
    double abs_at(int q) const;
    double max_abs() const;
    bool is_zero() const;
};

// Allocates the sampling layout (weights, points, zeroed values) for a mesh.
SampledField sampled_layout(const Mesh& mesh, int ncomp);

// The weighted modular: sum_q w_q |f/gamma|^{p_q} / p_q. Strictly decreasing
// and convex in gamma for f != 0. Throws std::invalid_argument for gamma <= 0.
double modular(const SampledField& f, const std::vector<double>& p_values, double gamma);
double modular(const SampledField& f, const ExponentField& p, double gamma);

// The Luxemburg norm: the unique gamma with modular(f, p, gamma) = 1, found by
// a bracketed Newton iteration that approaches the root from the modular > 1
// side (monotone by convexity). Returns 0 for the zero field. Throws
// std::domain_error on non-finite sample values.
double luxemburg_norm(const SampledField& f, const std::vector<double>& p_values,
                      double tol = 1e-12);
double luxemburg_norm(const SampledField& f, const ExponentField& p, double tol = 1e-12);

// Directional derivative of the Luxemburg norm at f in direction eta, by
// implicit differentiation of the modular equation:
//   [sum w |f/g|^{p-2} (f/g).eta] / [sum w |f/g|^{p}],  g = ||f||.
// Throws std::domain_error for f identically zero.
double norm_first_variation(const SampledField& f, const SampledField& eta,
                            const std::vector<double>& p_values);
double norm_first_variation(const SampledField& f, const SampledField& eta,
                            const ExponentField& p);

}  // namespace pxlap
