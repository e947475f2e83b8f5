#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "pxlap/mesh.hpp"
#include "pxlap/numeric.hpp"
#include "pxlap/quadrature.hpp"

using namespace pxlap;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// integrate a callable over the mesh with the cached rule
template <class F>
double integrate(const Mesh& m, F&& f) {
    const auto& qc = m.quad();
    KahanSum s;
    for (int e = 0; e < m.n_elems(); ++e)
        for (int q = 0; q < qc.nq; ++q) {
            const auto& p = qc.points[e * qc.nq + q];
            s.add(qc.weights[e * qc.nq + q] * f(p[0], p[1]));
        }
    return s.value();
}

}  // namespace

TEST_CASE("gauss rules integrate monomials exactly") {
    for (int n = 1; n <= 8; ++n) {
        const QuadratureRule r = gauss_interval(n);
        REQUIRE(r.size() == n);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            KahanSum s;
            for (int q = 0; q < n; ++q) s.add(r.w[q] * std::pow(r.x[q], k));
            CHECK(s.value() == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(gauss_interval(0), std::invalid_argument);
}

TEST_CASE("triangle rules integrate monomials exactly") {
    // reference value: x^a y^b over the unit triangle = a! b! / (a+b+2)!
    for (int degree : {1, 2, 5, 8, 11}) {
        const QuadratureRule r = triangle_rule(degree);
        for (int a = 0; a + 0 <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                KahanSum s;
                for (int q = 0; q < r.size(); ++q)
                    s.add(r.w[q] * std::pow(r.x[q], a) * std::pow(r.y[q], b));
                const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                CHECK(std::abs(s.value() - exact) <= 1e-13 * std::max(1.0, exact));
            }
        }
    }
}

TEST_CASE("interval mesh: counts and boundary") {
    const Mesh m = generate_mesh(DomainSpec::interval(0.0, 1.0), 0.5, 1);
    CHECK(m.n_nodes() == 3);
    CHECK(m.n_elems() == 2);
    const auto bnd = m.boundary_nodes();
    REQUIRE(bnd.size() == 2);
    CHECK(bnd[0] == 0);
    CHECK(bnd[1] == 2);
    CHECK(m.total_measure() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.n_interior() == 1);
}

TEST_CASE("rectangle mesh: area exact, diameters bounded") {
    const Mesh m = generate_mesh(DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0), 0.25, 1);
    CHECK(std::abs(m.total_measure() - 1.0) <= 1e-12);
    CHECK(m.max_element_diameter() <= 2.0 * 0.25 + 1e-12);
    // crossed pattern: 4 triangles and one extra node per cell
    CHECK(m.n_elems() == 4 * 16);
    CHECK(m.n_nodes() == 25 + 16);
    int n_bnd = 0;
    for (int v : m.boundary_nodes()) {
        const auto& p = m.nodes[v];
        const bool on = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
        CHECK(on);
        ++n_bnd;
    }
    CHECK(n_bnd == 16);
}

TEST_CASE("disk mesh: inscribed area converges from below") {
    const DomainSpec spec = DomainSpec::disk(0.0, 0.0, 1.0);
    const double pi = std::acos(-1.0);
    Mesh m = generate_mesh(spec, 0.1, 1);
    const double area0 = m.total_measure();
    CHECK(area0 < pi);
    CHECK(pi - area0 < 0.02);  // h = 0.1 polygon gap
    for (int v : m.boundary_nodes())
        CHECK(std::hypot(m.nodes[v][0], m.nodes[v][1]) == doctest::Approx(1.0).epsilon(1e-12));
    const Mesh fine = refine(m);
    const double area1 = fine.total_measure();
    CHECK(area1 > area0);
    CHECK(area1 < pi);
    // polygon gap is O(h^2): one refinement recovers ~3/4 of it
    CHECK((pi - area1) < 0.3 * (pi - area0));
    CHECK(fine.n_elems() == 4 * m.n_elems());
}

TEST_CASE("annulus mesh: both circles resolved") {
    const DomainSpec spec = DomainSpec::annulus(0.0, 0.0, 0.25, 1.0);
    const double pi = std::acos(-1.0);
    const Mesh m = generate_mesh(spec, 0.1, 1);
    CHECK(std::abs(m.total_measure() - pi * (1.0 - 0.0625)) < 0.03);
    int inner = 0, outer = 0;
    for (int v : m.boundary_nodes()) {
        const double r = std::hypot(m.nodes[v][0], m.nodes[v][1]);
        if (std::abs(r - 0.25) < 1e-12)
            ++inner;
        else if (std::abs(r - 1.0) < 1e-12)
            ++outer;
    }
    CHECK(inner >= 6);
    CHECK(outer >= 6);
    CHECK(inner + outer == static_cast<int>(m.boundary_nodes().size()));
    CHECK(m.max_element_diameter() <= 2.0 * 0.1 + 1e-12);
}

TEST_CASE("generation rejects bad input") {
    CHECK_THROWS_AS(DomainSpec::interval(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::annulus(0.0, 0.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::disk(0.0, 0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(generate_mesh(DomainSpec::interval(0.0, 1.0), 2.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_mesh(DomainSpec::interval(0.0, 1.0), 0.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_mesh(DomainSpec::interval(0.0, 1.0), 0.5, 3),
                    std::invalid_argument);
}

TEST_CASE("partition of unity at random reference points") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int order : {1, 2}) {
        const Mesh m1 = generate_mesh(DomainSpec::interval(-1.0, 2.0), 0.4, order);
        const Mesh m2 = generate_mesh(DomainSpec::disk(0.5, -0.5, 1.5), 0.5, order);
        std::vector<double> vals, grads;
        for (int trial = 0; trial < 100; ++trial) {
            double xi = uni(rng), eta = uni(rng);
            eval_basis(m1, trial % m1.n_elems(), {xi, 0.0}, vals, grads);
            double sv = 0.0, sg = 0.0;
            for (std::size_t i = 0; i < vals.size(); ++i) {
                sv += vals[i];
                sg += grads[i * 2];
            }
            CHECK(std::abs(sv - 1.0) <= 1e-13);
            CHECK(std::abs(sg) <= 1e-12);

            if (xi + eta > 1.0) {  // fold into the reference triangle
                xi = 1.0 - xi;
                eta = 1.0 - eta;
            }
            eval_basis(m2, trial % m2.n_elems(), {xi, eta}, vals, grads);
            double sv2 = 0.0, sgx = 0.0, sgy = 0.0;
            for (std::size_t i = 0; i < vals.size(); ++i) {
                sv2 += vals[i];
                sgx += grads[i * 2];
                sgy += grads[i * 2 + 1];
            }
            CHECK(std::abs(sv2 - 1.0) <= 1e-13);
            CHECK(std::abs(sgx) <= 1e-12);
            CHECK(std::abs(sgy) <= 1e-12);
        }
        CHECK_THROWS_AS(eval_basis(m1, m1.n_elems(), {0.5, 0.0}, vals, grads),
                        std::out_of_range);
    }
}

TEST_CASE("shape functions are nodal for the element dof order") {
    // evaluating at the reference coordinates of dof j must give delta_ij,
    // and the physical image of those coordinates must be dof_coords[j]
    const std::vector<std::array<double, 2>> ref1 = {{0, 0}, {1, 0}, {0.5, 0}};
    const std::vector<std::array<double, 2>> ref2 = {{0, 0},   {1, 0},     {0, 1},
                                                     {0.5, 0}, {0.5, 0.5}, {0, 0.5}};
    for (int order : {1, 2}) {
        for (const DomainSpec& spec :
             {DomainSpec::interval(0.0, 2.0), DomainSpec::rectangle(0.0, 1.0, 0.0, 2.0),
              DomainSpec::disk(0.0, 0.0, 1.0)}) {
            const Mesh m = generate_mesh(spec, 0.45, order);
            const auto& ref = m.dim == 1 ? ref1 : ref2;
            std::vector<double> vals, grads;
            for (int e = 0; e < m.n_elems(); ++e) {
                for (int j = 0; j < m.dofs_per_elem(); ++j) {
                    eval_basis(m, e, ref[j], vals, grads);
                    for (int i = 0; i < m.dofs_per_elem(); ++i)
                        CHECK(std::abs(vals[i] - (i == j ? 1.0 : 0.0)) <= 1e-14);
                    // affine map of the ref point vs the stored dof position
                    const auto& p0 = m.nodes[m.elem_vertex(e, 0)];
                    double px = p0[0], py = p0[1];
                    if (m.dim == 1) {
                        px += ref[j][0] * (m.nodes[m.elem_vertex(e, 1)][0] - p0[0]);
                    } else {
                        const auto& p1 = m.nodes[m.elem_vertex(e, 1)];
                        const auto& p2 = m.nodes[m.elem_vertex(e, 2)];
                        px += ref[j][0] * (p1[0] - p0[0]) + ref[j][1] * (p2[0] - p0[0]);
                        py += ref[j][0] * (p1[1] - p0[1]) + ref[j][1] * (p2[1] - p0[1]);
                    }
                    const auto& d = m.dof_coords[m.elem_dof(e, j)];
                    CHECK(std::abs(px - d[0]) <= 1e-13);
                    CHECK(std::abs(py - d[1]) <= 1e-13);
                }
            }
        }
    }
}

TEST_CASE("quadrature cache integrates polynomials exactly") {
    const Mesh sq = generate_mesh(DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0), 0.3, 1);
    CHECK(std::abs(integrate(sq, [](double, double) { return 1.0; }) - 1.0) <= 1e-13);
    CHECK(std::abs(integrate(sq, [](double x, double y) { return x * y; }) - 0.25) <= 1e-13);
    CHECK(std::abs(integrate(sq, [](double x, double y) { return x * x * y * y * x; }) -
                   1.0 / 12.0) <= 1e-13);  // degree 5

    const Mesh iv = generate_mesh(DomainSpec::interval(0.0, 1.0), 0.21, 2);
    CHECK(std::abs(integrate(iv, [](double x, double) { return std::pow(x, 7); }) - 0.125) <=
          1e-13);  // 4-point Gauss is exact to degree 7

    // per-element weights sum to the element measure
    const auto& qc = sq.quad();
    for (int e = 0; e < sq.n_elems(); ++e) {
        KahanSum s;
        for (int q = 0; q < qc.nq; ++q) s.add(qc.weights[e * qc.nq + q]);
        CHECK(s.value() == doctest::Approx(sq.element_measure(e)).epsilon(1e-13));
    }
}

TEST_CASE("jinv maps reference gradients to physical gradients") {
    // interpolate f(x,y) = 3x - 2y + 1 on P1: the cached jinv must reproduce
    // the exact constant gradient on every element
    const Mesh m = generate_mesh(DomainSpec::disk(0.0, 0.0, 1.0), 0.4, 1);
    std::vector<double> u(m.n_dofs());
    for (int d = 0; d < m.n_dofs(); ++d)
        u[d] = 3.0 * m.dof_coords[d][0] - 2.0 * m.dof_coords[d][1] + 1.0;
    const auto& qc = m.quad();
    for (int e = 0; e < m.n_elems(); ++e) {
        const double* ji = &qc.jinv[e * 4];
        for (int q = 0; q < qc.nq; ++q) {
            double gx = 0.0, gy = 0.0;
            for (int i = 0; i < qc.n_loc; ++i) {
                const double grx = qc.ref_grad[(q * qc.n_loc + i) * 2];
                const double gry = qc.ref_grad[(q * qc.n_loc + i) * 2 + 1];
                const double c = u[m.elem_dof(e, i)];
                gx += c * (ji[0] * grx + ji[1] * gry);
                gy += c * (ji[2] * grx + ji[3] * gry);
            }
            CHECK(std::abs(gx - 3.0) <= 1e-12);
            CHECK(std::abs(gy + 2.0) <= 1e-12);
        }
    }
}

TEST_CASE("refine conserves polygonal measure and nests boundaries") {
    const Mesh sq = generate_mesh(DomainSpec::rectangle(-1.0, 1.0, 0.0, 1.0), 0.5, 2);
    const Mesh sq2 = refine(sq);
    CHECK(std::abs(sq2.total_measure() - sq.total_measure()) <= 1e-12);
    CHECK(sq2.n_elems() == 4 * sq.n_elems());
    CHECK(sq2.max_element_diameter() == doctest::Approx(0.5 * sq.max_element_diameter()));

    const Mesh iv = generate_mesh(DomainSpec::interval(0.0, 1.0), 0.25, 1);
    const Mesh iv2 = refine(iv);
    CHECK(iv2.n_elems() == 2 * iv.n_elems());
    CHECK(std::abs(iv2.total_measure() - 1.0) <= 1e-14);

    // refined annulus boundary midpoints land on the exact circles
    const Mesh an = refine(generate_mesh(DomainSpec::annulus(0.0, 0.0, 0.5, 1.0), 0.25, 1));
    for (int v : an.boundary_nodes()) {
        const double r = std::hypot(an.nodes[v][0], an.nodes[v][1]);
        const double gap = std::min(std::abs(r - 0.5), std::abs(r - 1.0));
        CHECK(gap <= 1e-12);
    }
}

TEST_CASE("P2 dof layer: counts, boundary flags, interior indexing") {
    const Mesh m = generate_mesh(DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0), 0.5, 2);
    // crossed 2x2 grid: 9 + 4 center nodes, 16 triangles, edges = (3*16 + boundary 8)/2
    CHECK(m.n_nodes() == 13);
    CHECK(m.n_elems() == 16);
    const int n_edges = (3 * 16 + 8) / 2;
    CHECK(m.n_dofs() == m.n_nodes() + n_edges);

    int n_int = 0;
    for (int d = 0; d < m.n_dofs(); ++d) {
        if (m.dof_on_boundary[d]) {
            CHECK(m.dof_interior_index[d] == -1);
        } else {
            CHECK(m.interior_dofs[m.dof_interior_index[d]] == d);
            ++n_int;
        }
    }
    CHECK(n_int == m.n_interior());
    // boundary dofs: 8 boundary vertices + 8 boundary edge midpoints
    CHECK(m.n_dofs() - n_int == 16);

    // midpoint dof coordinates really are edge midpoints on the boundary line
    for (int d = m.n_nodes(); d < m.n_dofs(); ++d) {
        if (!m.dof_on_boundary[d]) continue;
        const auto& p = m.dof_coords[d];
        const bool on = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
        CHECK(on);
    }
}

TEST_CASE("P1 interpolation of an affine function integrates exactly") {
    const Mesh m = generate_mesh(DomainSpec::rectangle(0.0, 2.0, 0.0, 1.0), 0.4, 1);
    std::vector<double> u(m.n_dofs());
    for (int d = 0; d < m.n_dofs(); ++d) u[d] = m.dof_coords[d][0] + m.dof_coords[d][1];
    const auto& qc = m.quad();
    KahanSum s;
    for (int e = 0; e < m.n_elems(); ++e)
        for (int q = 0; q < qc.nq; ++q) {
            double v = 0.0;
            for (int i = 0; i < qc.n_loc; ++i)
                v += u[m.elem_dof(e, i)] * qc.basis[q * qc.n_loc + i];
            s.add(qc.weights[e * qc.nq + q] * v);
        }
    // integral of x + y over [0,2]x[0,1] = 2 + 1 = 3
    CHECK(std::abs(s.value() - 3.0) <= 1e-12);
}

TEST_CASE("vtk and dump output") {
    const Mesh m = generate_mesh(DomainSpec::interval(0.0, 1.0), 0.5, 1);
    const std::string d = dump_mesh(m);
    CHECK(d == "3\n0 0\n0.5 0\n1 0\n2\n0 1\n1 2\n");

    std::vector<double> vals = {0.0, 1.0, 0.0};
    write_vtk(m, "mesh_test.vtk", &vals, "u");
    std::FILE* f = std::fopen("mesh_test.vtk", "r");
    REQUIRE(f != nullptr);
    char line[128];
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
    CHECK(std::string(line).rfind("# vtk", 0) == 0);
    std::fclose(f);
    std::remove("mesh_test.vtk");

    const Mesh tri = generate_mesh(DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0), 1.0, 1);
    write_vtk(tri, "mesh_test2.vtk");
    f = std::fopen("mesh_test2.vtk", "r");
    REQUIRE(f != nullptr);
    bool has_tri_type = false;
    while (std::fgets(line, sizeof line, f))
        if (std::string(line) == "5\n") has_tri_type = true;
    CHECK(has_tri_type);
    std::fclose(f);
    std::remove("mesh_test2.vtk");
}

TEST_CASE("mesh diameters respect the target everywhere") {
    for (const DomainSpec& spec :
         {DomainSpec::interval(0.0, 1.0), DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0),
          DomainSpec::disk(0.0, 0.0, 1.0), DomainSpec::annulus(0.0, 0.0, 0.25, 1.0)}) {
        for (double h : {0.3, 0.12}) {
            const Mesh m = generate_mesh(spec, h, 1);
            CHECK(m.max_element_diameter() <= 2.0 * h + 1e-12);
            CHECK(m.total_measure() > 0.0);
        }
    }
}
