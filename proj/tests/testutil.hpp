#pragma once

#include <Eigen/Dense>

#include "pxlap/mesh.hpp"

namespace testutil {

// dense stiffness/mass on interior dofs, straight from the quadrature cache
inline void dense_matrices(const pxlap::Mesh& m, Eigen::MatrixXd& K, Eigen::MatrixXd& M) {
    const int n = m.n_interior();
    K = Eigen::MatrixXd::Zero(n, n);
    M = Eigen::MatrixXd::Zero(n, n);
    const auto& qc = m.quad();
    for (int e = 0; e < m.n_elems(); ++e) {
        const double* ji = m.dim == 1 ? &qc.jinv[e] : &qc.jinv[e * 4];
        for (int q = 0; q < qc.nq; ++q) {
            const double w = qc.weights[e * qc.nq + q];
            double gx[6], gy[6];
            for (int i = 0; i < qc.n_loc; ++i) {
                const double rx = qc.ref_grad[(q * qc.n_loc + i) * 2];
                const double ry = qc.ref_grad[(q * qc.n_loc + i) * 2 + 1];
                if (m.dim == 1) {
                    gx[i] = ji[0] * rx;
                    gy[i] = 0.0;
                } else {
                    gx[i] = ji[0] * rx + ji[1] * ry;
                    gy[i] = ji[2] * rx + ji[3] * ry;
                }
            }
            for (int i = 0; i < qc.n_loc; ++i) {
                const int gi = m.dof_interior_index[m.elem_dof(e, i)];
                if (gi < 0) continue;
                for (int j = 0; j < qc.n_loc; ++j) {
                    const int gj = m.dof_interior_index[m.elem_dof(e, j)];
                    if (gj < 0) continue;
                    K(gi, gj) += w * (gx[i] * gx[j] + gy[i] * gy[j]);
                    M(gi, gj) += w * qc.basis[q * qc.n_loc + i] * qc.basis[q * qc.n_loc + j];
                }
            }
        }
    }
}

// first eigenvector of K u = lambda M u by dense inverse power iteration
inline Eigen::VectorXd first_eigvec(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M,
                                    double& lambda) {
    Eigen::LDLT<Eigen::MatrixXd> solver(K);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(K.rows());
    for (int it = 0; it < 200; ++it) {
        u = solver.solve(M * u);
        u /= u.norm();
    }
    lambda = u.dot(K * u) / u.dot(M * u);
    return u;
}

}  // namespace testutil
