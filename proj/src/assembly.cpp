#include "pxlap/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "pxlap/numeric.hpp"

namespace pxlap {

namespace {

void check(const ScalarField& u) {
    if (!u.mesh) throw std::invalid_argument("scalar field: no mesh attached");
    if (static_cast<int>(u.coeffs.size()) != u.mesh->n_interior())
        throw std::invalid_argument("scalar field: coefficient count mismatch");
}

void check_nonzero(const ScalarField& u) {
    check(u);
    for (double c : u.coeffs)
        if (c != 0.0) return;
    throw std::domain_error("operation undefined for the zero field");
}

void check_pv(const Mesh& m, const std::vector<double>& pv) {
    if (static_cast<int>(pv.size()) != m.quad().n_points())
        throw std::invalid_argument("exponent samples do not match the mesh quadrature");
}

std::vector<double> exponent_samples(const Mesh& m, const ExponentField& p) {
    ExponentField copy = p;
    return sample_exponent(m, copy);
}

// |v|^{p-2} v with optional epsilon smoothing of the magnitude
inline void weight_vec(double vx, double vy, double p, double eps, double& ox, double& oy) {
    if (eps == 0.0) {
        vector_pow(vx, vy, p, ox, oy);
        return;
    }
    const double f = std::pow(vx * vx + vy * vy + eps * eps, 0.5 * (p - 2.0));
    ox = f * vx;
    oy = f * vy;
}

// b_i = sum_q w_q factor_q basis_i(q) over interior dofs
void assemble_scalar_dual(const Mesh& m, const std::vector<double>& factor, DualVector& out) {
    const auto& qc = m.quad();
    out.mesh = &m;
    out.values.assign(m.n_interior(), 0.0);
    for (int e = 0; e < m.n_elems(); ++e) {
        for (int q = 0; q < qc.nq; ++q) {
            const double wf = qc.weights[e * qc.nq + q] * factor[e * qc.nq + q];
            if (wf == 0.0) continue;
            for (int i = 0; i < qc.n_loc; ++i) {
                const int idx = m.dof_interior_index[m.elem_dof(e, i)];
                if (idx >= 0) out.values[idx] += wf * qc.basis[q * qc.n_loc + i];
            }
        }
    }
}

// a_i = sum_q w_q <factor_q, grad basis_i(q)> over interior dofs
void assemble_grad_dual(const Mesh& m, const std::vector<double>& fx,
                        const std::vector<double>& fy, DualVector& out) {
    const auto& qc = m.quad();
    out.mesh = &m;
    out.values.assign(m.n_interior(), 0.0);
    for (int e = 0; e < m.n_elems(); ++e) {
        const double* ji = m.dim == 1 ? &qc.jinv[e] : &qc.jinv[e * 4];
        for (int q = 0; q < qc.nq; ++q) {
            const int pt = e * qc.nq + q;
            const double w = qc.weights[pt];
            for (int i = 0; i < qc.n_loc; ++i) {
                const int idx = m.dof_interior_index[m.elem_dof(e, i)];
                if (idx < 0) continue;
                const double grx = qc.ref_grad[(q * qc.n_loc + i) * 2];
                const double gry = qc.ref_grad[(q * qc.n_loc + i) * 2 + 1];
                double gx, gy;
                if (m.dim == 1) {
                    gx = ji[0] * grx;
                    gy = 0.0;
                } else {
                    gx = ji[0] * grx + ji[1] * gry;
                    gy = ji[2] * grx + ji[3] * gry;
                }
                out.values[idx] += w * (fx[pt] * gx + fy[pt] * gy);
            }
        }
    }
}

}  // namespace

ScalarField interpolate(const Mesh& mesh, const std::function<double(double, double)>& f) {
    ScalarField u(mesh);
    for (int k = 0; k < mesh.n_interior(); ++k) {
        const auto& p = mesh.dof_coords[mesh.interior_dofs[k]];
        u.coeffs[k] = f(p[0], p[1]);
    }
    return u;
}

std::vector<double> full_dof_values(const ScalarField& u) {
    check(u);
    std::vector<double> out(u.mesh->n_dofs(), 0.0);
    for (int k = 0; k < u.mesh->n_interior(); ++k) out[u.mesh->interior_dofs[k]] = u.coeffs[k];
    return out;
}

std::vector<double> vertex_values(const ScalarField& u) {
    std::vector<double> all = full_dof_values(u);
    all.resize(u.mesh->n_nodes());
    return all;
}

namespace {

// evaluates the field (given full dof values) inside element e if the point
// lies there up to geom_tol; scratch vectors avoid reallocation across calls
bool eval_in_element(const Mesh& m, const std::vector<double>& vals, int e, double x,
                     double y, double geom_tol, std::vector<double>& basis,
                     std::vector<double>& grads, double& out) {
    std::array<double, 2> ref{0.0, 0.0};
    if (m.dim == 1) {
        const double x0 = m.nodes[m.elem_vertex(e, 0)][0];
        const double x1 = m.nodes[m.elem_vertex(e, 1)][0];
        const double len = x1 - x0;
        ref[0] = (x - x0) / len;
        const double tol = geom_tol / std::abs(len);
        if (ref[0] < -tol || ref[0] > 1.0 + tol) return false;
    } else {
        const auto& p0 = m.nodes[m.elem_vertex(e, 0)];
        const auto& p1 = m.nodes[m.elem_vertex(e, 1)];
        const auto& p2 = m.nodes[m.elem_vertex(e, 2)];
        const double a = p1[0] - p0[0], b = p2[0] - p0[0];
        const double c = p1[1] - p0[1], d = p2[1] - p0[1];
        const double det = a * d - b * c;
        ref[0] = (d * (x - p0[0]) - b * (y - p0[1])) / det;
        ref[1] = (-c * (x - p0[0]) + a * (y - p0[1])) / det;
        const double tol = geom_tol / std::sqrt(std::abs(det));
        if (ref[0] < -tol || ref[1] < -tol || ref[0] + ref[1] > 1.0 + tol) return false;
    }
    eval_basis(m, e, ref, basis, grads);
    double v = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        v += basis[i] * vals[m.elem_dof(e, static_cast<int>(i))];
    out = v;
    return true;
}

}  // namespace

double evaluate_at(const ScalarField& u, double x, double y) {
    check(u);
    const Mesh& m = *u.mesh;
    const std::vector<double> vals = full_dof_values(u);
    const double geom_tol = 1e-10 * (1.0 + m.spec.diameter());
    std::vector<double> basis, grads;
    double v = 0.0;
    for (int e = 0; e < m.n_elems(); ++e)
        if (eval_in_element(m, vals, e, x, y, geom_tol, basis, grads, v)) return v;
    throw std::domain_error("evaluate_at: point outside the mesh");
}

ScalarField transfer(const ScalarField& u, const Mesh& target) {
    check(u);
    const Mesh& src = *u.mesh;
    const std::vector<double> vals = full_dof_values(u);
    const double geom_tol = 1e-10 * (1.0 + src.spec.diameter());
    std::vector<double> basis, grads;

    ScalarField out(target);
    int hint = 0;
    for (int k = 0; k < target.n_interior(); ++k) {
        const auto& p = target.dof_coords[target.interior_dofs[k]];
        double v = 0.0;
        if (eval_in_element(src, vals, hint, p[0], p[1], geom_tol, basis, grads, v)) {
            out.coeffs[k] = v;
            continue;
        }
        for (int e = 0; e < src.n_elems(); ++e) {
            if (eval_in_element(src, vals, e, p[0], p[1], geom_tol, basis, grads, v)) {
                out.coeffs[k] = v;
                hint = e;
                break;
            }
        }
        // not found: leave 0 (curved-boundary refinements can poke outside)
    }
    return out;
}

void sample_into(const ScalarField& u, SampledField& out) {
    check(u);
    const Mesh& m = *u.mesh;
    const auto& qc = m.quad();
    for (int e = 0; e < m.n_elems(); ++e) {
        for (int q = 0; q < qc.nq; ++q) {
            double v = 0.0;
            for (int i = 0; i < qc.n_loc; ++i) {
                const int idx = m.dof_interior_index[m.elem_dof(e, i)];
                if (idx >= 0) v += u.coeffs[idx] * qc.basis[q * qc.n_loc + i];
            }
            out.values[e * qc.nq + q] = v;
        }
    }
}

void sample_gradient_into(const ScalarField& u, SampledField& out) {
    check(u);
    const Mesh& m = *u.mesh;
    const auto& qc = m.quad();
    for (int e = 0; e < m.n_elems(); ++e) {
        const double* ji = m.dim == 1 ? &qc.jinv[e] : &qc.jinv[e * 4];
        for (int q = 0; q < qc.nq; ++q) {
            double grx = 0.0, gry = 0.0;
            for (int i = 0; i < qc.n_loc; ++i) {
                const int idx = m.dof_interior_index[m.elem_dof(e, i)];
                if (idx < 0) continue;
                grx += u.coeffs[idx] * qc.ref_grad[(q * qc.n_loc + i) * 2];
                gry += u.coeffs[idx] * qc.ref_grad[(q * qc.n_loc + i) * 2 + 1];
            }
            const int pt = e * qc.nq + q;
            if (m.dim == 1) {
                out.values[2 * pt] = ji[0] * grx;
                out.values[2 * pt + 1] = 0.0;
            } else {
                out.values[2 * pt] = ji[0] * grx + ji[1] * gry;
                out.values[2 * pt + 1] = ji[2] * grx + ji[3] * gry;
            }
        }
    }
}

SampledField sample(const ScalarField& u) {
    check(u);
    SampledField out = sampled_layout(*u.mesh, 1);
    sample_into(u, out);
    return out;
}

SampledField sample_gradient(const ScalarField& u) {
    check(u);
    SampledField out = sampled_layout(*u.mesh, 2);
    sample_gradient_into(u, out);
    return out;
}

double evaluate_R(const ScalarField& u, const std::vector<double>& pv) {
    check_nonzero(u);
    check_pv(*u.mesh, pv);
    const double K = luxemburg_norm(sample_gradient(u), pv);
    return K * K;
}

double evaluate_R(const ScalarField& u, const ExponentField& p) {
    check(u);
    return evaluate_R(u, exponent_samples(*u.mesh, p));
}

double evaluate_S(const ScalarField& u, const std::vector<double>& pv) {
    check_nonzero(u);
    check_pv(*u.mesh, pv);
    const double k = luxemburg_norm(sample(u), pv);
    return k * k;
}

double evaluate_S(const ScalarField& u, const ExponentField& p) {
    check(u);
    return evaluate_S(u, exponent_samples(*u.mesh, p));
}

DualVector grad_S(const ScalarField& u, const std::vector<double>& pv) {
    check_nonzero(u);
    check_pv(*u.mesh, pv);
    const SampledField su = sample(u);
    const double k = luxemburg_norm(su, pv);
    const int n = su.n_points();
    std::vector<double> factor(n);
    KahanSum den;
    for (int q = 0; q < n; ++q) {
        const double t = su.values[q] / k;
        factor[q] = signed_pow(t, pv[q]);  // |u/k|^{p-2} (u/k)
        den.add(su.weights[q] * factor[q] * t);
    }
    DualVector g;
    assemble_scalar_dual(*u.mesh, factor, g);
    const double scale = 2.0 * k / den.value();
    for (double& v : g.values) v *= scale;
    return g;
}

DualVector grad_S(const ScalarField& u, const ExponentField& p) {
    check(u);
    return grad_S(u, exponent_samples(*u.mesh, p));
}

DualVector grad_R_sampled(const Mesh& mesh, const SampledField& sg,
                          const std::vector<double>& pv, double eps,
                          double K_precomputed) {
    const double K = K_precomputed > 0.0 ? K_precomputed : luxemburg_norm(sg, pv);
    const int n = sg.n_points();
    std::vector<double> fx(n), fy(n);
    KahanSum den;
    for (int q = 0; q < n; ++q) {
        const double vx = sg.values[2 * q] / K, vy = sg.values[2 * q + 1] / K;
        weight_vec(vx, vy, pv[q], eps, fx[q], fy[q]);
        den.add(sg.weights[q] * (fx[q] * vx + fy[q] * vy));
    }
    DualVector g;
    assemble_grad_dual(mesh, fx, fy, g);
    const double scale = 2.0 * K / den.value();
    for (double& v : g.values) v *= scale;
    return g;
}

DualVector grad_R(const ScalarField& u, const std::vector<double>& pv, double eps) {
    check_nonzero(u);
    check_pv(*u.mesh, pv);
    return grad_R_sampled(*u.mesh, sample_gradient(u), pv, eps);
}

double el_S_constant(const ScalarField& u, const std::vector<double>& pv, double eps) {
    check_nonzero(u);
    check_pv(*u.mesh, pv);
    const SampledField su = sample(u);
    const SampledField sg = sample_gradient(u);
    const double k = luxemburg_norm(su, pv);
    const double K = luxemburg_norm(sg, pv);
    KahanSum num, den;
    for (int q = 0; q < su.n_points(); ++q) {
        const double vx = sg.values[2 * q] / K, vy = sg.values[2 * q + 1] / K;
        double fx, fy;
        weight_vec(vx, vy, pv[q], eps, fx, fy);
        num.add(sg.weights[q] * (fx * vx + fy * vy));
        const double t = su.values[q] / k;
        den.add(su.weights[q] * signed_pow(t, pv[q]) * t);
    }
    return num.value() / den.value();
}

double evaluate_J(const ScalarField& u, const DualVector& grad_S_prev,
                  const std::vector<double>& pv) {
    check_nonzero(u);
    return evaluate_R(u, pv) - dot(grad_S_prev.values, u.coeffs);
}

DualVector grad_J(const ScalarField& u, const DualVector& grad_S_prev,
                  const std::vector<double>& pv, double eps) {
    DualVector g = grad_R(u, pv, eps);
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] -= grad_S_prev.values[i];
    return g;
}

DualVector grad_J(const ScalarField& u, const ScalarField& u_prev,
                  const std::vector<double>& pv, double eps) {
    check_nonzero(u_prev);
    return grad_J(u, grad_S(u_prev, pv), pv, eps);
}

DualVector grad_J(const ScalarField& u, const ScalarField& u_prev, const ExponentField& p) {
    check(u);
    return grad_J(u, u_prev, exponent_samples(*u.mesh, p), 0.0);
}

double el_residual(const ScalarField& u, double lambda, const std::vector<double>& pv,
                   double eps) {
    check_nonzero(u);
    check_pv(*u.mesh, pv);
    const SampledField su = sample(u);
    const SampledField sg = sample_gradient(u);
    const double k = luxemburg_norm(su, pv);
    const double K = luxemburg_norm(sg, pv);
    const int n = su.n_points();

    std::vector<double> fx(n), fy(n), fb(n);
    KahanSum num_S, den_S;
    for (int q = 0; q < n; ++q) {
        const double vx = sg.values[2 * q] / K, vy = sg.values[2 * q + 1] / K;
        weight_vec(vx, vy, pv[q], eps, fx[q], fy[q]);
        num_S.add(sg.weights[q] * (fx[q] * vx + fy[q] * vy));  // int |grad u/K|^p
        const double t = su.values[q] / k;
        fb[q] = signed_pow(t, pv[q]);
        den_S.add(su.weights[q] * fb[q] * t);  // int |u/k|^p
    }
    const double S = num_S.value() / den_S.value();

    DualVector a, b;
    assemble_grad_dual(*u.mesh, fx, fy, a);
    assemble_scalar_dual(*u.mesh, fb, b);

    double worst = 0.0;
    KahanSum a2;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        worst = std::max(worst, std::abs(a.values[i] - lambda * S * b.values[i]));
        a2.add(a.values[i] * a.values[i]);
    }
    return worst / std::sqrt(a2.value());
}

double el_residual(const ScalarField& u, double lambda, const ExponentField& p) {
    check(u);
    return el_residual(u, lambda, exponent_samples(*u.mesh, p), 0.0);
}

}  // namespace pxlap
