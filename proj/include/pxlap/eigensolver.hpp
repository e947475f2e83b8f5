#pragma once

#include <utility>
#include <vector>

#include "pxlap/assembly.hpp"

namespace pxlap {

struct SolverConfig {
    double newton_tol = 1e-12;   // |modular - 1| tolerance inside the norm
    double inner_tol = 1e-8;     // Euclidean dual norm of grad J
    int inner_max_iters = 2000;
    double power_tol = 1e-8;     // relative change of successive Lambda1
    int power_max_iters = 200;
    int continuation_steps = 10;
    double regularization_eps = 0.0;  // smoothing of the p-2 gradient weight
    int restart_period = 0;           // conjugate gradient restart; 0 = dof count

    void validate() const;  // throws std::invalid_argument
};

struct InnerResult {
    ScalarField u;
    bool converged = false;
    int iterations = 0;
};

struct EigenpairResult {
    double lambda1 = 0.0;  // K / k
    double Lambda1 = 0.0;  // lambda1^2 = R/S
    ScalarField u;         // Luxemburg-normalized, nonnegative orientation
    double K = 0.0;        // ||grad u||
    double k = 0.0;        // ||u||, = 1 after normalization
    double S_const = 0.0;  // int|grad u/K|^p / int|u/k|^p
    double el_residual = 0.0;
    std::vector<double> history;                 // Lambda1 per outer iteration
    std::vector<std::array<double, 2>> trace;    // (t, lambda1) continuation path
    int iterations = 0;
    bool converged = false;
};

// First Dirichlet eigenpair of the Laplacian by inverse iteration with a
// sparse factorization; u is mass-normalized and positive. Throws
// std::runtime_error if the stiffness factorization fails.
std::pair<double, ScalarField> helmholtz_first_eigenpair(const Mesh& mesh,
                                                         double tol = 1e-12);

// Minimizes J(u) = R(u) - <grad S(u_prev), u> by Fletcher-Reeves conjugate
// gradients with Armijo backtracking, from u_init. Non-convergence within
// inner_max_iters is reported through the flag, with the best iterate kept.
InnerResult inner_minimize(const ScalarField& u_prev, const ExponentField& p,
                           const SolverConfig& cfg, const ScalarField& u_init);
InnerResult inner_minimize(const ScalarField& u_prev, const std::vector<double>& p_values,
                           const SolverConfig& cfg, const ScalarField& u_init);

// Inverse power iteration on the homogeneous Rayleigh quotient: minimize J
// from the scaled previous iterate, renormalize to unit Luxemburg norm,
// re-evaluate the quotient; stops on a small relative quotient change
// backed by a small Euler-Lagrange residual.
EigenpairResult inverse_power(const ExponentField& p, const Mesh& mesh,
                              const ScalarField& u0, const SolverConfig& cfg);

// Continuation from the Helmholtz pair at p = 2 to the target exponent along
// p_t = 2 + t (p_target - 2) on a uniform t-grid, warm-starting each solve.
// A failing step is retried once on a half step; persistent failure throws
// std::runtime_error naming the step.
EigenpairResult continuation_solve(const DomainSpec& spec, const ExponentField& p_target,
                                   const Mesh& mesh, const SolverConfig& cfg);

}  // namespace pxlap
