#include "pxlap/eigensolver.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pxlap/numeric.hpp"

namespace pxlap {

void SolverConfig::validate() const {
    if (!(newton_tol > 0.0) || !(inner_tol > 0.0) || !(power_tol > 0.0))
        throw std::invalid_argument("solver config: tolerances must be > 0");
    if (inner_max_iters < 1 || power_max_iters < 1 || continuation_steps < 1)
        throw std::invalid_argument("solver config: iteration caps must be >= 1");
    if (regularization_eps < 0.0 || restart_period < 0)
        throw std::invalid_argument("solver config: negative parameter");
}

std::pair<double, ScalarField> helmholtz_first_eigenpair(const Mesh& mesh, double tol) {
    const int n = mesh.n_interior();
    if (n == 0) throw std::runtime_error("helmholtz: mesh has no interior dofs");
    const auto& qc = mesh.quad();

    std::vector<Eigen::Triplet<double>> tk, tm;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const double* ji = mesh.dim == 1 ? &qc.jinv[e] : &qc.jinv[e * 4];
        for (int q = 0; q < qc.nq; ++q) {
            const double w = qc.weights[e * qc.nq + q];
            double gx[6], gy[6], bv[6];
            for (int i = 0; i < qc.n_loc; ++i) {
                const double rx = qc.ref_grad[(q * qc.n_loc + i) * 2];
                const double ry = qc.ref_grad[(q * qc.n_loc + i) * 2 + 1];
                if (mesh.dim == 1) {
                    gx[i] = ji[0] * rx;
                    gy[i] = 0.0;
                } else {
                    gx[i] = ji[0] * rx + ji[1] * ry;
                    gy[i] = ji[2] * rx + ji[3] * ry;
                }
                bv[i] = qc.basis[q * qc.n_loc + i];
            }
            for (int i = 0; i < qc.n_loc; ++i) {
                const int gi = mesh.dof_interior_index[mesh.elem_dof(e, i)];
                if (gi < 0) continue;
                for (int j = 0; j < qc.n_loc; ++j) {
                    const int gj = mesh.dof_interior_index[mesh.elem_dof(e, j)];
                    if (gj < 0) continue;
                    tk.emplace_back(gi, gj, w * (gx[i] * gx[j] + gy[i] * gy[j]));
                    tm.emplace_back(gi, gj, w * bv[i] * bv[j]);
                }
            }
        }
    }
    Eigen::SparseMatrix<double> K(n, n), M(n, n);
    K.setFromTriplets(tk.begin(), tk.end());
    M.setFromTriplets(tm.begin(), tm.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(K);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("helmholtz: stiffness factorization failed");

    Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
    u /= std::sqrt(u.dot(M * u));
    double lambda = u.dot(K * u);
    for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXd v = solver.solve(M * u);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("helmholtz: linear solve failed");
        v /= std::sqrt(v.dot(M * v));
        const double next = v.dot(K * v);
        u = v;
        if (std::abs(next - lambda) <= tol * std::abs(next) && it >= 2) {
            lambda = next;
            break;
        }
        lambda = next;
    }

    // orient positive: the sign of the integral of u
    KahanSum integral;
    ScalarField out(mesh);
    for (int i = 0; i < n; ++i) out.coeffs[i] = u[i];
    const SampledField su = sample(out);
    for (int q = 0; q < su.n_points(); ++q) integral.add(su.weights[q] * su.values[q]);
    if (integral.value() < 0.0)
        for (double& c : out.coeffs) c = -c;
    return {lambda, out};
}

namespace {

std::vector<double> exponent_samples(const Mesh& m, const ExponentField& p) {
    ExponentField copy = p;
    return sample_exponent(m, copy);
}

double weighted_integral(const SampledField& f) {
    KahanSum s;
    for (int q = 0; q < f.n_points(); ++q) s.add(f.weights[q] * f.values[q]);
    return s.value();
}

}  // namespace

InnerResult inner_minimize(const ScalarField& u_prev, const std::vector<double>& pv,
                           const SolverConfig& cfg, const ScalarField& u_init) {
    cfg.validate();
    if (!u_prev.mesh || u_prev.mesh != u_init.mesh)
        throw std::invalid_argument("inner_minimize: fields must share one mesh");
    const Mesh& mesh = *u_prev.mesh;
    const int n = mesh.n_interior();
    const double eps = cfg.regularization_eps;
    const int restart = cfg.restart_period > 0 ? cfg.restart_period : n;

    const DualVector gS = grad_S(u_prev, pv);

    InnerResult res;
    res.u = u_init;
    std::vector<double>& x = res.u.coeffs;

    SampledField sgx = sample_gradient(res.u);
    SampledField sgd = sampled_layout(mesh, 2);
    SampledField sgt = sampled_layout(mesh, 2);
    SampledField sgt2 = sampled_layout(mesh, 2);

    double K_x = 0.0, K_t = 0.0, K_t2 = 0.0;
    const auto R_of = [&](const SampledField& sg, double& K_out) {
        K_out = luxemburg_norm(sg, pv, cfg.newton_tol);
        return K_out * K_out;
    };

    double pair_x = dot(gS.values, x);
    double Jx = R_of(sgx, K_x) - pair_x;
    if (!std::isfinite(Jx)) throw std::runtime_error("inner_minimize: non-finite objective");

    DualVector g = grad_R_sampled(mesh, sgx, pv, eps, K_x);
    for (int i = 0; i < n; ++i) g.values[i] -= gS.values[i];
    double gg = dot(g.values, g.values);

    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = -g.values[i];
    bool fresh_direction = true;  // d = -g
    ScalarField dirfield(mesh);
    double alpha_prev = 0.0, gd_prev = 0.0;
    constexpr double armijo_c = 1e-4;

    // stagnation guard: a tolerance below the evaluation noise floor would
    // otherwise burn the full iteration budget making no progress
    double best_gg = gg;
    int since_best = 0;
    const int stall_window = std::max(50, n);

    for (int iter = 0; iter < cfg.inner_max_iters; ++iter) {
        res.iterations = iter;
        if (std::sqrt(gg) <= cfg.inner_tol) {
            res.converged = true;
            return res;
        }

        double gd = dot(g.values, d);
        if (gd >= 0.0) {  // not a descent direction: restart on steepest descent
            for (int i = 0; i < n; ++i) d[i] = -g.values[i];
            gd = -gg;
            fresh_direction = true;
        }

        dirfield.coeffs = d;
        sample_gradient_into(dirfield, sgd);
        const double pair_d = dot(gS.values, d);

        double alpha;
        if (alpha_prev > 0.0 && gd_prev < 0.0 && !fresh_direction) {
            alpha = alpha_prev * gd_prev / gd;  // slope carry-over
        } else if (Jx != 0.0 && gg > 0.0) {
            alpha = 2.0 * std::abs(Jx) / gg;
        } else {
            alpha = 1.0 / (1.0 + std::sqrt(gg));
        }
        if (!std::isfinite(alpha) || alpha <= 0.0) alpha = 1.0;
        alpha = std::min(std::max(alpha, 1e-14), 1e14);

        bool accepted = false;
        double Jt = 0.0;
        for (int ls = 0; ls < 64; ++ls) {
            for (std::size_t q = 0; q < sgt.values.size(); ++q)
                sgt.values[q] = sgx.values[q] + alpha * sgd.values[q];
            Jt = R_of(sgt, K_t) - (pair_x + alpha * pair_d);
            if (std::isfinite(Jt) && Jt <= Jx + armijo_c * alpha * gd) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (fresh_direction) return res;  // cannot decrease along -g: stuck
            for (int i = 0; i < n; ++i) d[i] = -g.values[i];
            fresh_direction = true;
            alpha_prev = 0.0;
            continue;
        }

        // greedy expansion: a too-small seed step would cripple the FR update,
        // so keep doubling while the objective strictly improves
        for (int ex = 0; ex < 40; ++ex) {
            const double a2 = 2.0 * alpha;
            if (a2 > 1e14) break;
            for (std::size_t q = 0; q < sgt2.values.size(); ++q)
                sgt2.values[q] = sgx.values[q] + a2 * sgd.values[q];
            const double Jt2 = R_of(sgt2, K_t2) - (pair_x + a2 * pair_d);
            if (!(std::isfinite(Jt2) && Jt2 < Jt && Jt2 <= Jx + armijo_c * a2 * gd)) break;
            alpha = a2;
            Jt = Jt2;
            K_t = K_t2;
            std::swap(sgt.values, sgt2.values);
        }

        axpy(alpha, d, x);
        std::swap(sgx.values, sgt.values);
        K_x = K_t;
        pair_x += alpha * pair_d;
        Jx = Jt;
        alpha_prev = alpha;
        gd_prev = gd;

        DualVector gn = grad_R_sampled(mesh, sgx, pv, eps, K_x);
        for (int i = 0; i < n; ++i) gn.values[i] -= gS.values[i];
        const double gg_new = dot(gn.values, gn.values);

        if (gg_new < 0.5 * best_gg) { best_gg = gg_new; since_best = 0; } else ++since_best;
        if (since_best > stall_window) {
            res.iterations = iter + 1;
            res.converged = std::sqrt(gg_new) <= cfg.inner_tol;
            return res;
        }

        double beta = gg_new / gg;  // Fletcher-Reeves
        if ((iter + 1) % restart == 0) beta = 0.0;
        for (int i = 0; i < n; ++i) d[i] = -gn.values[i] + beta * d[i];
        fresh_direction = beta == 0.0;
        g = std::move(gn);
        gg = gg_new;
    }
    res.iterations = cfg.inner_max_iters;
    res.converged = std::sqrt(gg) <= cfg.inner_tol;
    return res;
}

InnerResult inner_minimize(const ScalarField& u_prev, const ExponentField& p,
                           const SolverConfig& cfg, const ScalarField& u_init) {
    if (!u_prev.mesh) throw std::invalid_argument("inner_minimize: no mesh");
    return inner_minimize(u_prev, exponent_samples(*u_prev.mesh, p), cfg, u_init);
}

EigenpairResult inverse_power(const ExponentField& p, const Mesh& mesh,
                              const ScalarField& u0, const SolverConfig& cfg) {
    cfg.validate();
    const std::vector<double> pv = exponent_samples(mesh, p);

    EigenpairResult res;
    res.u = u0;
    bool any = false;
    for (double c : res.u.coeffs) any |= c != 0.0;
    if (!any) throw std::domain_error("inverse_power: zero initial field");

    SampledField su = sample(res.u);
    SampledField sg = sample_gradient(res.u);
    double k = luxemburg_norm(su, pv, cfg.newton_tol);
    for (double& c : res.u.coeffs) c /= k;
    sample_into(res.u, su);
    sample_gradient_into(res.u, sg);
    double K = luxemburg_norm(sg, pv, cfg.newton_tol);
    k = luxemburg_norm(su, pv, cfg.newton_tol);
    double lambda = K / k;
    double Lambda = lambda * lambda;
    res.history.push_back(Lambda);

    double inner_tol_eff = cfg.inner_tol;
    double best_el = std::numeric_limits<double>::infinity();
    int el_stale = 0;
    for (int j = 1; j <= cfg.power_max_iters; ++j) {
        res.iterations = j;

        ScalarField init = res.u;
        for (double& c : init.coeffs) c /= Lambda;
        SolverConfig inner_cfg = cfg;
        inner_cfg.inner_tol = inner_tol_eff;
        InnerResult inner = inner_minimize(res.u, pv, inner_cfg, init);

        res.u = std::move(inner.u);
        sample_into(res.u, su);
        k = luxemburg_norm(su, pv, cfg.newton_tol);
        for (double& c : res.u.coeffs) c /= k;
        sample_into(res.u, su);
        sample_gradient_into(res.u, sg);
        K = luxemburg_norm(sg, pv, cfg.newton_tol);
        k = luxemburg_norm(su, pv, cfg.newton_tol);
        lambda = K / k;
        const double Lambda_next = lambda * lambda;
        const double rel = std::abs(Lambda_next - Lambda) / Lambda;
        Lambda = Lambda_next;
        res.history.push_back(Lambda);

        if (rel <= cfg.power_tol) {
            res.el_residual = el_residual(res.u, lambda, pv, cfg.regularization_eps);
            if (res.el_residual <= 10.0 * cfg.power_tol) {
                res.converged = true;
                break;
            }
            // the quotient has stalled but the stationarity residual lags.
            // While the residual still contracts (e.g. through a small
            // spectral gap) keep iterating; once it stalls, tighten the inner
            // solves, and give up only when it is flat at the floor tolerance
            if (res.el_residual < 0.97 * best_el) {
                best_el = res.el_residual;
                el_stale = 0;
            } else if (inner_tol_eff > 1.05e-13) {
                inner_tol_eff = std::max(0.25 * inner_tol_eff, 1e-13);
                el_stale = 0;
            } else if (++el_stale >= 12) {
                break;  // residual is not going to improve
            }
        }
    }

    if (weighted_integral(su) < 0.0)
        for (double& c : res.u.coeffs) c = -c;

    res.K = K;
    res.k = k;
    res.lambda1 = lambda;
    res.Lambda1 = lambda * lambda;
    res.S_const = el_S_constant(res.u, pv, cfg.regularization_eps);
    res.el_residual = el_residual(res.u, res.lambda1, pv, cfg.regularization_eps);
    return res;
}

EigenpairResult continuation_solve(const DomainSpec& spec, const ExponentField& p_target,
                                   const Mesh& mesh, const SolverConfig& cfg) {
    cfg.validate();
    spec.validate();

    auto [lam_h, u_h] = helmholtz_first_eigenpair(mesh, std::min(cfg.newton_tol, 1e-12));

    const auto target_eval = p_target.evaluator;
    const auto p_at = [target_eval](double t) {
        return ExponentField::from([target_eval, t](double x, double y) {
            return 2.0 + t * (target_eval(x, y) - 2.0);
        });
    };

    EigenpairResult res;
    ScalarField u_cur = u_h;
    std::vector<std::array<double, 2>> trace;
    trace.push_back({0.0, std::sqrt(lam_h)});

    const int steps = cfg.continuation_steps;
    int step = 1;
    double t_prev = 0.0;
    while (step <= steps) {
        const double t = static_cast<double>(step) / steps;
        ExponentField pt = p_at(t);
        EigenpairResult r = inverse_power(pt, mesh, u_cur, cfg);
        if (!r.converged) {
            // one retry level: half step to bridge, then the full step again
            const double tm = 0.5 * (t_prev + t);
            ExponentField pm = p_at(tm);
            EigenpairResult rm = inverse_power(pm, mesh, u_cur, cfg);
            if (rm.converged) {
                trace.push_back({tm, rm.lambda1});
                r = inverse_power(pt, mesh, rm.u, cfg);
            }
            if (!r.converged)
                throw std::runtime_error("continuation failed at step " +
                                         std::to_string(step) + " (t = " +
                                         std::to_string(t) + ")");
        }
        trace.push_back({t, r.lambda1});
        u_cur = r.u;
        res = std::move(r);
        t_prev = t;
        ++step;
    }
    res.trace = std::move(trace);
    return res;
}

}  // namespace pxlap
