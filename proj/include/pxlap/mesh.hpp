#pragma once

#include <array>
#include <string>
#include <vector>

#include "pxlap/quadrature.hpp"

namespace pxlap {

struct DomainSpec {
    enum class Kind { Interval, Rectangle, Disk, Annulus };
    Kind kind = Kind::Interval;
    double a = 0.0, b = 1.0;                          // interval
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;    // rectangle
    double cx = 0.0, cy = 0.0;                        // disk / annulus center
    double r = 1.0;                                   // disk radius
    double r_in = 0.25, r_out = 1.0;                  // annulus radii

    static DomainSpec interval(double a, double b);
    static DomainSpec rectangle(double x0, double x1, double y0, double y1);
    static DomainSpec disk(double cx, double cy, double r);
    static DomainSpec annulus(double cx, double cy, double r_in, double r_out);

    void validate() const;  // throws std::invalid_argument on a degenerate spec
    int dim() const { return kind == Kind::Interval ? 1 : 2; }
    double diameter() const;
    // center of point symmetry, used by the diagnostics
    std::array<double, 2> center() const;
};

// Conforming simplicial mesh (intervals in 1D, triangles in 2D) with a
// Lagrange P1/P2 dof layer on top. Immutable once built: all mutating
// operations return a new mesh.
//
// P2 dof convention: dofs 0..n_nodes-1 are the vertices, followed by one dof
// per edge (keyed by the sorted vertex pair), placed at the edge midpoint.
class Mesh {
  public:
    int dim = 1;
    int order = 1;
    DomainSpec spec;

    std::vector<std::array<double, 2>> nodes;  // vertex coordinates (y = 0 in 1D)
    std::vector<int> elems;                    // flat vertex ids, stride dim+1
    std::vector<char> node_on_boundary;

    // dof layer
    std::vector<std::array<double, 2>> dof_coords;
    std::vector<int> element_dofs;  // stride dofs_per_elem()
    std::vector<char> dof_on_boundary;
    std::vector<int> interior_dofs;       // dof ids, ascending
    std::vector<int> dof_interior_index;  // -1 for boundary dofs

    int quad_degree = 0;  // 0 = default for dim (Gauss-4 in 1D, degree 5 on triangles)

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_elems() const { return static_cast<int>(elems.size()) / (dim + 1); }
    int n_dofs() const { return static_cast<int>(dof_coords.size()); }
    int n_interior() const { return static_cast<int>(interior_dofs.size()); }
    int verts_per_elem() const { return dim + 1; }
    int dofs_per_elem() const { return order == 1 ? dim + 1 : (dim == 1 ? 3 : 6); }
    int elem_vertex(int e, int i) const { return elems[e * (dim + 1) + i]; }
    int elem_dof(int e, int i) const { return element_dofs[e * dofs_per_elem() + i]; }

    double element_measure(int e) const;
    double total_measure() const;
    double max_element_diameter() const;

    // Precomputed quadrature layout shared by all sampling/assembly code.
    struct QuadCache {
        QuadratureRule rule;
        int n_loc = 0;                        // dofs per element
        std::vector<double> basis;            // [q * n_loc + i]
        std::vector<double> ref_grad;         // [(q * n_loc + i) * 2 + c]
        std::vector<double> weights;          // [e * nq + q], quad weight x |J|
        std::vector<std::array<double, 2>> points;  // physical coordinates
        std::vector<double> jinv;             // per element: 2x2 row-major (1D: [0] = 1/h)
        int nq = 0;
        int n_points() const { return static_cast<int>(weights.size()); }
    };
    const QuadCache& quad() const;

    std::vector<int> boundary_nodes() const;  // sorted vertex ids

  private:
    mutable QuadCache cache_;
    mutable bool cache_built_ = false;
    friend Mesh finalize_mesh(Mesh m);
};

// Evaluates the local shape functions at a reference point. `values` gets
// dofs_per_elem entries, `grads` reference-coordinate gradients (2 per dof,
// second component unused in 1D). Throws on an out-of-range element index.
void eval_basis(const Mesh& mesh, int element, const std::array<double, 2>& ref_point,
                std::vector<double>& values, std::vector<double>& grads);

Mesh generate_mesh(const DomainSpec& spec, double target_h, int order);
Mesh refine(const Mesh& mesh);

// Legacy ASCII VTK export of the vertex mesh; `point_data` (optional, one
// value per vertex) is written as a POINT_DATA scalar field.
void write_vtk(const Mesh& mesh, const std::string& path,
               const std::vector<double>* point_data = nullptr,
               const std::string& data_name = "u");

// Plain text dump (node count, coords, element list) for golden tests.
std::string dump_mesh(const Mesh& mesh);

}  // namespace pxlap
