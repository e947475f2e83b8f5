#pragma once

#include <functional>
#include <vector>

#include "pxlap/luxemburg.hpp"
#include "pxlap/mesh.hpp"

namespace pxlap {

// FE function with zero Dirichlet trace: one coefficient per interior dof,
// boundary dofs implicitly zero.
struct ScalarField {
    const Mesh* mesh = nullptr;
    std::vector<double> coeffs;

    ScalarField() = default;
    explicit ScalarField(const Mesh& m) : mesh(&m), coeffs(m.n_interior(), 0.0) {}
};

// Assembled pairing <G, eta_i> against every interior basis function.
struct DualVector {
    const Mesh* mesh = nullptr;
    std::vector<double> values;

    DualVector() = default;
    explicit DualVector(const Mesh& m) : mesh(&m), values(m.n_interior(), 0.0) {}
};

// Interpolates f at the interior dof positions (boundary stays zero).
ScalarField interpolate(const Mesh& mesh, const std::function<double(double, double)>& f);

// Expands interior coefficients to one value per dof, zeros on the boundary.
std::vector<double> full_dof_values(const ScalarField& u);

// point evaluation by element search; throws std::domain_error when (x, y) lies
// outside every element (up to a small geometric tolerance)
double evaluate_at(const ScalarField& u, double x, double y = 0.0);

// nodal transfer onto another mesh by point evaluation (warm starts across
// refinement levels); target dofs outside the source mesh take the value 0
ScalarField transfer(const ScalarField& u, const Mesh& target);
// Restriction to vertex values only (for VTK point data).
std::vector<double> vertex_values(const ScalarField& u);

// Point values / physical gradients of u at all cached quadrature points.
// The *_into forms reuse a layout obtained from sampled_layout(mesh, ncomp).
void sample_into(const ScalarField& u, SampledField& out);
void sample_gradient_into(const ScalarField& u, SampledField& out);
SampledField sample(const ScalarField& u);
SampledField sample_gradient(const ScalarField& u);

// R(u) = ||grad u||^2 and S(u) = ||u||^2 in the Luxemburg norm. Throw
// std::domain_error for u identically zero.
double evaluate_R(const ScalarField& u, const std::vector<double>& p_values);
double evaluate_R(const ScalarField& u, const ExponentField& p);
double evaluate_S(const ScalarField& u, const std::vector<double>& p_values);
double evaluate_S(const ScalarField& u, const ExponentField& p);

// Gradient of S at u: entry i is 2 int |u/k|^{p-2} u eta_i / int |u/k|^p
// with k = ||u||.
DualVector grad_S(const ScalarField& u, const std::vector<double>& p_values);
DualVector grad_S(const ScalarField& u, const ExponentField& p);

// Gradient of R at u, same shape with grad u / ||grad u||. eps regularizes
// the degenerate |grad u| = 0, p < 2 weight (0 disables).
DualVector grad_R(const ScalarField& u, const std::vector<double>& p_values,
                  double eps = 0.0);
// Same, but from gradient samples the caller already holds (solver hot path).
// K_precomputed > 0 skips recomputing the Luxemburg norm of the samples.
DualVector grad_R_sampled(const Mesh& mesh, const SampledField& grad_samples,
                          const std::vector<double>& p_values, double eps = 0.0,
                          double K_precomputed = 0.0);

// The constant tying the two sides of the Euler-Lagrange equation:
// int |grad u/K|^p / int |u/k|^p (plain integrals, no 1/p weight).
double el_S_constant(const ScalarField& u, const std::vector<double>& p_values,
                     double eps = 0.0);

// J(u) = R(u) - <grad_S_prev, u>, the inner objective of the inverse power
// step, and its exact gradient grad_R(u) - grad_S_prev.
double evaluate_J(const ScalarField& u, const DualVector& grad_S_prev,
                  const std::vector<double>& p_values);
DualVector grad_J(const ScalarField& u, const ScalarField& u_prev,
                  const std::vector<double>& p_values, double eps = 0.0);
DualVector grad_J(const ScalarField& u, const DualVector& grad_S_prev,
                  const std::vector<double>& p_values, double eps = 0.0);
DualVector grad_J(const ScalarField& u, const ScalarField& u_prev, const ExponentField& p);

// Scale-free Euler-Lagrange residual: with K = ||grad u||, k = ||u||,
// a_i = int |grad u/K|^{p-2} <grad u/K, grad eta_i>,
// b_i = int |u/k|^{p-2} (u/k) eta_i and S = int|grad u/K|^p / int|u/k|^p,
// returns max_i |a_i - lambda S b_i| / ||a||_2.
double el_residual(const ScalarField& u, double lambda, const std::vector<double>& p_values,
                   double eps = 0.0);
double el_residual(const ScalarField& u, double lambda, const ExponentField& p);

}  // namespace pxlap
