#include "pxlap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "pxlap/numeric.hpp"

namespace pxlap {

DomainSpec DomainSpec::interval(double a, double b) {
    DomainSpec s;
    s.kind = Kind::Interval;
    s.a = a;
    s.b = b;
    s.validate();
    return s;
}

DomainSpec DomainSpec::rectangle(double x0, double x1, double y0, double y1) {
    DomainSpec s;
    s.kind = Kind::Rectangle;
    s.x0 = x0;
    s.x1 = x1;
    s.y0 = y0;
    s.y1 = y1;
    s.validate();
    return s;
}

DomainSpec DomainSpec::disk(double cx, double cy, double r) {
    DomainSpec s;
    s.kind = Kind::Disk;
    s.cx = cx;
    s.cy = cy;
    s.r = r;
    s.validate();
    return s;
}

DomainSpec DomainSpec::annulus(double cx, double cy, double r_in, double r_out) {
    DomainSpec s;
    s.kind = Kind::Annulus;
    s.cx = cx;
    s.cy = cy;
    s.r_in = r_in;
    s.r_out = r_out;
    s.validate();
    return s;
}

void DomainSpec::validate() const {
    switch (kind) {
        case Kind::Interval:
            if (!(a < b)) throw std::invalid_argument("interval: requires a < b");
            break;
        case Kind::Rectangle:
            if (!(x0 < x1) || !(y0 < y1))
                throw std::invalid_argument("rectangle: requires x0 < x1 and y0 < y1");
            break;
        case Kind::Disk:
            if (!(r > 0.0)) throw std::invalid_argument("disk: requires r > 0");
            break;
        case Kind::Annulus:
            if (!(0.0 < r_in && r_in < r_out))
                throw std::invalid_argument("annulus: requires 0 < r_in < r_out");
            break;
    }
}

double DomainSpec::diameter() const {
    switch (kind) {
        case Kind::Interval: return b - a;
        case Kind::Rectangle: return std::hypot(x1 - x0, y1 - y0);
        case Kind::Disk: return 2.0 * r;
        case Kind::Annulus: return 2.0 * r_out;
    }
    return 0.0;
}

std::array<double, 2> DomainSpec::center() const {
    switch (kind) {
        case Kind::Interval: return {0.5 * (a + b), 0.0};
        case Kind::Rectangle: return {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
        case Kind::Disk:
        case Kind::Annulus: return {cx, cy};
    }
    return {0.0, 0.0};
}

namespace {

void shape_eval(int dim, int order, double xi, double eta, std::vector<double>& values,
                std::vector<double>& grads) {
    if (dim == 1) {
        if (order == 1) {
            values = {1.0 - xi, xi};
            grads = {-1.0, 0.0, 1.0, 0.0};
        } else {
            values = {2.0 * xi * xi - 3.0 * xi + 1.0, xi * (2.0 * xi - 1.0),
                      4.0 * xi * (1.0 - xi)};
            grads = {4.0 * xi - 3.0, 0.0, 4.0 * xi - 1.0, 0.0, 4.0 - 8.0 * xi, 0.0};
        }
        return;
    }
    const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
    if (order == 1) {
        values = {l0, l1, l2};
        grads = {-1.0, -1.0, 1.0, 0.0, 0.0, 1.0};
        return;
    }
    // P2: vertex dofs then midpoints of edges (01, 12, 20)
    values = {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
              4.0 * l0 * l1, 4.0 * l1 * l2, 4.0 * l2 * l0};
    grads = {-(4.0 * l0 - 1.0), -(4.0 * l0 - 1.0),
             4.0 * l1 - 1.0,    0.0,
             0.0,               4.0 * l2 - 1.0,
             4.0 * (l0 - l1),   -4.0 * l1,
             4.0 * l2,          4.0 * l1,
             -4.0 * l2,         4.0 * (l0 - l2)};
}

double signed_area(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                   const std::array<double, 2>& p2) {
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

// Builds the dof layer and boundary flags from the vertex mesh.
Mesh finalize(Mesh m) {
    const int nv = m.n_nodes();
    const int ne = m.n_elems();

    m.node_on_boundary.assign(nv, 0);
    std::map<std::pair<int, int>, int> edge_count;
    if (m.dim == 1) {
        std::vector<int> count(nv, 0);
        for (int e = 0; e < ne; ++e) {
            ++count[m.elem_vertex(e, 0)];
            ++count[m.elem_vertex(e, 1)];
        }
        for (int v = 0; v < nv; ++v)
            if (count[v] == 1) m.node_on_boundary[v] = 1;
    } else {
        for (int e = 0; e < ne; ++e) {
            for (int k = 0; k < 3; ++k) {
                int a = m.elem_vertex(e, k), b = m.elem_vertex(e, (k + 1) % 3);
                if (a > b) std::swap(a, b);
                ++edge_count[{a, b}];
            }
        }
        for (const auto& [edge, count] : edge_count) {
            if (count == 1) {
                m.node_on_boundary[edge.first] = 1;
                m.node_on_boundary[edge.second] = 1;
            }
        }
    }

    m.dof_coords.assign(m.nodes.begin(), m.nodes.end());
    m.dof_on_boundary.assign(m.node_on_boundary.begin(), m.node_on_boundary.end());
    m.element_dofs.clear();
    m.element_dofs.reserve(ne * m.dofs_per_elem());

    if (m.order == 1) {
        m.element_dofs.assign(m.elems.begin(), m.elems.end());
    } else if (m.dim == 1) {
        for (int e = 0; e < ne; ++e) {
            const int a = m.elem_vertex(e, 0), b = m.elem_vertex(e, 1);
            const int mid = m.n_dofs();
            m.dof_coords.push_back({0.5 * (m.nodes[a][0] + m.nodes[b][0]), 0.0});
            m.dof_on_boundary.push_back(0);
            m.element_dofs.insert(m.element_dofs.end(), {a, b, mid});
        }
    } else {
        std::map<std::pair<int, int>, int> edge_dof;
        for (int e = 0; e < ne; ++e) {
            const int v[3] = {m.elem_vertex(e, 0), m.elem_vertex(e, 1), m.elem_vertex(e, 2)};
            int mid[3];
            for (int k = 0; k < 3; ++k) {
                int a = v[k], b = v[(k + 1) % 3];
                if (a > b) std::swap(a, b);
                auto it = edge_dof.find({a, b});
                if (it == edge_dof.end()) {
                    const int id = m.n_dofs();
                    m.dof_coords.push_back({0.5 * (m.nodes[a][0] + m.nodes[b][0]),
                                            0.5 * (m.nodes[a][1] + m.nodes[b][1])});
                    m.dof_on_boundary.push_back(edge_count[{a, b}] == 1 ? 1 : 0);
                    edge_dof[{a, b}] = id;
                    mid[k] = id;
                } else {
                    mid[k] = it->second;
                }
            }
            m.element_dofs.insert(m.element_dofs.end(),
                                  {v[0], v[1], v[2], mid[0], mid[1], mid[2]});
        }
    }

    m.interior_dofs.clear();
    m.dof_interior_index.assign(m.n_dofs(), -1);
    for (int d = 0; d < m.n_dofs(); ++d) {
        if (!m.dof_on_boundary[d]) {
            m.dof_interior_index[d] = static_cast<int>(m.interior_dofs.size());
            m.interior_dofs.push_back(d);
        }
    }
    return m;
}

void fix_orientation(Mesh& m) {
    if (m.dim != 2) return;
    for (int e = 0; e < m.n_elems(); ++e) {
        if (signed_area(m.nodes[m.elem_vertex(e, 0)], m.nodes[m.elem_vertex(e, 1)],
                        m.nodes[m.elem_vertex(e, 2)]) < 0.0)
            std::swap(m.elems[e * 3 + 1], m.elems[e * 3 + 2]);
    }
}

Mesh generate_interval(const DomainSpec& spec, double h, int order) {
    Mesh m;
    m.dim = 1;
    m.order = order;
    m.spec = spec;
    const int n = std::max(1, static_cast<int>(std::ceil((spec.b - spec.a) / h - 1e-12)));
    for (int i = 0; i <= n; ++i)
        m.nodes.push_back({spec.a + (spec.b - spec.a) * i / n, 0.0});
    for (int i = 0; i < n; ++i) m.elems.insert(m.elems.end(), {i, i + 1});
    return m;
}

Mesh generate_rectangle(const DomainSpec& spec, double h, int order) {
    Mesh m;
    m.dim = 2;
    m.order = order;
    m.spec = spec;
    const int nx = std::max(1, static_cast<int>(std::ceil((spec.x1 - spec.x0) / h - 1e-12)));
    const int ny = std::max(1, static_cast<int>(std::ceil((spec.y1 - spec.y0) / h - 1e-12)));
    const auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes.push_back({spec.x0 + (spec.x1 - spec.x0) * i / nx,
                               spec.y0 + (spec.y1 - spec.y0) * j / ny});
    // crossed pattern: one center node and four triangles per cell
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int c = m.n_nodes();
            m.nodes.push_back({spec.x0 + (spec.x1 - spec.x0) * (i + 0.5) / nx,
                               spec.y0 + (spec.y1 - spec.y0) * (j + 0.5) / ny});
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.elems.insert(m.elems.end(), {v00, v10, c});
            m.elems.insert(m.elems.end(), {v10, v11, c});
            m.elems.insert(m.elems.end(), {v11, v01, c});
            m.elems.insert(m.elems.end(), {v01, v00, c});
        }
    }
    return m;
}

// Concentric-ring triangulation: ring j carries 6j nodes, so counts track the
// ring circumference and consecutive rings mesh into regular sector strips.
void ring_nodes(Mesh& m, double cx, double cy, int j, double radius, std::vector<int>& ids) {
    ids.clear();
    const double pi = std::acos(-1.0);
    for (int t = 0; t < 6 * j; ++t) {
        const double th = 2.0 * pi * t / (6.0 * j);
        ids.push_back(m.n_nodes());
        m.nodes.push_back({cx + radius * std::cos(th), cy + radius * std::sin(th)});
    }
}

void connect_rings(Mesh& m, const std::vector<int>& inner, const std::vector<int>& outer,
                   int j) {
    // inner ring j (6j nodes) to outer ring j+1 (6(j+1) nodes), 6 sectors
    const int ni = 6 * j, no = 6 * (j + 1);
    for (int s = 0; s < 6; ++s) {
        for (int t = 0; t <= j; ++t) {
            const int o0 = outer[(s * (j + 1) + t) % no];
            const int o1 = outer[(s * (j + 1) + t + 1) % no];
            const int i0 = inner[(s * j + t) % ni];
            m.elems.insert(m.elems.end(), {o0, o1, i0});
            if (t < j) {
                const int i1 = inner[(s * j + t + 1) % ni];
                m.elems.insert(m.elems.end(), {o1, i1, i0});
            }
        }
    }
}

Mesh generate_disk(const DomainSpec& spec, double h, int order) {
    Mesh m;
    m.dim = 2;
    m.order = order;
    m.spec = spec;
    const int n = std::max(1, static_cast<int>(std::ceil(spec.r / h - 1e-12)));
    const int center = 0;
    m.nodes.push_back({spec.cx, spec.cy});
    std::vector<int> prev, cur;
    for (int j = 1; j <= n; ++j) {
        ring_nodes(m, spec.cx, spec.cy, j, spec.r * j / n, cur);
        if (j == 1) {
            for (int t = 0; t < 6; ++t)
                m.elems.insert(m.elems.end(), {center, cur[t], cur[(t + 1) % 6]});
        } else {
            connect_rings(m, prev, cur, j - 1);
        }
        prev = cur;
    }
    return m;
}

Mesh generate_annulus(const DomainSpec& spec, double h, int order) {
    Mesh m;
    m.dim = 2;
    m.order = order;
    m.spec = spec;
    const int n = std::max(2, static_cast<int>(std::ceil(spec.r_out / h - 1e-12)));
    const int j0 = std::clamp(static_cast<int>(std::lround(spec.r_in / (spec.r_out / n))), 1, n - 1);
    std::vector<int> prev, cur;
    for (int j = j0; j <= n; ++j) {
        const double radius = spec.r_in + (spec.r_out - spec.r_in) * (j - j0) / (n - j0);
        ring_nodes(m, spec.cx, spec.cy, j, radius, cur);
        if (j > j0) connect_rings(m, prev, cur, j - 1);
        prev = cur;
    }
    return m;
}

}  // namespace

Mesh generate_mesh(const DomainSpec& spec, double target_h, int order) {
    spec.validate();
    if (!(target_h > 0.0)) throw std::invalid_argument("generate_mesh: target_h must be > 0");
    if (target_h > spec.diameter())
        throw std::invalid_argument("generate_mesh: target_h exceeds the domain diameter");
    if (order != 1 && order != 2)
        throw std::invalid_argument("generate_mesh: order must be 1 or 2");

    Mesh m;
    switch (spec.kind) {
        case DomainSpec::Kind::Interval: m = generate_interval(spec, target_h, order); break;
        case DomainSpec::Kind::Rectangle: m = generate_rectangle(spec, target_h, order); break;
        case DomainSpec::Kind::Disk: m = generate_disk(spec, target_h, order); break;
        case DomainSpec::Kind::Annulus: m = generate_annulus(spec, target_h, order); break;
    }
    fix_orientation(m);
    return finalize(std::move(m));
}

Mesh refine(const Mesh& mesh) {
    Mesh m;
    m.dim = mesh.dim;
    m.order = mesh.order;
    m.spec = mesh.spec;
    m.quad_degree = mesh.quad_degree;
    m.nodes = mesh.nodes;

    if (mesh.dim == 1) {
        for (int e = 0; e < mesh.n_elems(); ++e) {
            const int a = mesh.elem_vertex(e, 0), b = mesh.elem_vertex(e, 1);
            const int mid = m.n_nodes();
            m.nodes.push_back({0.5 * (mesh.nodes[a][0] + mesh.nodes[b][0]), 0.0});
            m.elems.insert(m.elems.end(), {a, mid});
            m.elems.insert(m.elems.end(), {mid, b});
        }
        return finalize(std::move(m));
    }

    // count edges to recognize boundary edges for curved re-projection
    std::map<std::pair<int, int>, int> edge_count;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        for (int k = 0; k < 3; ++k) {
            int a = mesh.elem_vertex(e, k), b = mesh.elem_vertex(e, (k + 1) % 3);
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }

    const bool curved = mesh.spec.kind == DomainSpec::Kind::Disk ||
                        mesh.spec.kind == DomainSpec::Kind::Annulus;
    std::map<std::pair<int, int>, int> edge_mid;
    const auto midpoint = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        auto it = edge_mid.find({a, b});
        if (it != edge_mid.end()) return it->second;
        std::array<double, 2> p = {0.5 * (mesh.nodes[a][0] + mesh.nodes[b][0]),
                                   0.5 * (mesh.nodes[a][1] + mesh.nodes[b][1])};
        if (curved && edge_count[{a, b}] == 1 && mesh.node_on_boundary[a] &&
            mesh.node_on_boundary[b]) {
            const double dx = p[0] - mesh.spec.cx, dy = p[1] - mesh.spec.cy;
            const double d = std::hypot(dx, dy);
            double target = mesh.spec.r;
            if (mesh.spec.kind == DomainSpec::Kind::Annulus)
                target = std::abs(d - mesh.spec.r_in) < std::abs(d - mesh.spec.r_out)
                             ? mesh.spec.r_in
                             : mesh.spec.r_out;
            if (d > 0.0) {
                p[0] = mesh.spec.cx + dx * target / d;
                p[1] = mesh.spec.cy + dy * target / d;
            }
        }
        const int id = m.n_nodes();
        m.nodes.push_back(p);
        edge_mid[{a, b}] = id;
        return id;
    };

    for (int e = 0; e < mesh.n_elems(); ++e) {
        const int v0 = mesh.elem_vertex(e, 0), v1 = mesh.elem_vertex(e, 1),
                  v2 = mesh.elem_vertex(e, 2);
        const int m01 = midpoint(v0, v1), m12 = midpoint(v1, v2), m20 = midpoint(v2, v0);
        m.elems.insert(m.elems.end(), {v0, m01, m20});
        m.elems.insert(m.elems.end(), {v1, m12, m01});
        m.elems.insert(m.elems.end(), {v2, m20, m12});
        m.elems.insert(m.elems.end(), {m01, m12, m20});
    }
    fix_orientation(m);
    return finalize(std::move(m));
}

double Mesh::element_measure(int e) const {
    if (dim == 1)
        return std::abs(nodes[elem_vertex(e, 1)][0] - nodes[elem_vertex(e, 0)][0]);
    return std::abs(signed_area(nodes[elem_vertex(e, 0)], nodes[elem_vertex(e, 1)],
                                nodes[elem_vertex(e, 2)]));
}

double Mesh::total_measure() const {
    KahanSum s;
    for (int e = 0; e < n_elems(); ++e) s.add(element_measure(e));
    return s.value();
}

double Mesh::max_element_diameter() const {
    double d = 0.0;
    for (int e = 0; e < n_elems(); ++e) {
        const int nv = verts_per_elem();
        for (int i = 0; i < nv; ++i) {
            for (int j = i + 1; j < nv; ++j) {
                const auto& p = nodes[elem_vertex(e, i)];
                const auto& q = nodes[elem_vertex(e, j)];
                d = std::max(d, std::hypot(p[0] - q[0], p[1] - q[1]));
            }
        }
    }
    return d;
}

std::vector<int> Mesh::boundary_nodes() const {
    std::vector<int> out;
    for (int v = 0; v < n_nodes(); ++v)
        if (node_on_boundary[v]) out.push_back(v);
    return out;
}

const Mesh::QuadCache& Mesh::quad() const {
    if (cache_built_) return cache_;
    QuadCache& c = cache_;
    const int deg = quad_degree > 0 ? quad_degree : (dim == 1 ? 7 : 5);
    c.rule = default_rule(dim, deg);
    c.nq = c.rule.size();
    c.n_loc = dofs_per_elem();

    std::vector<double> vals, grads;
    c.basis.resize(c.nq * c.n_loc);
    c.ref_grad.resize(c.nq * c.n_loc * 2);
    for (int q = 0; q < c.nq; ++q) {
        shape_eval(dim, order, c.rule.x[q], dim == 2 ? c.rule.y[q] : 0.0, vals, grads);
        for (int i = 0; i < c.n_loc; ++i) {
            c.basis[q * c.n_loc + i] = vals[i];
            c.ref_grad[(q * c.n_loc + i) * 2 + 0] = grads[i * 2 + 0];
            c.ref_grad[(q * c.n_loc + i) * 2 + 1] = grads[i * 2 + 1];
        }
    }

    const int ne = n_elems();
    c.weights.resize(ne * c.nq);
    c.points.resize(ne * c.nq);
    c.jinv.resize(dim == 1 ? ne : ne * 4);
    for (int e = 0; e < ne; ++e) {
        if (dim == 1) {
            const double xa = nodes[elem_vertex(e, 0)][0];
            const double xb = nodes[elem_vertex(e, 1)][0];
            const double len = xb - xa;
            if (!(std::abs(len) > 0.0)) throw std::runtime_error("mesh: zero-length element");
            c.jinv[e] = 1.0 / len;
            for (int q = 0; q < c.nq; ++q) {
                c.weights[e * c.nq + q] = c.rule.w[q] * std::abs(len);
                c.points[e * c.nq + q] = {xa + c.rule.x[q] * len, 0.0};
            }
        } else {
            const auto& p0 = nodes[elem_vertex(e, 0)];
            const auto& p1 = nodes[elem_vertex(e, 1)];
            const auto& p2 = nodes[elem_vertex(e, 2)];
            const double a = p1[0] - p0[0], b = p2[0] - p0[0];
            const double cc = p1[1] - p0[1], d = p2[1] - p0[1];
            const double det = a * d - b * cc;
            if (!(det > 0.0)) throw std::runtime_error("mesh: degenerate or flipped element");
            // J^{-T}, row-major
            double* ji = &c.jinv[e * 4];
            ji[0] = d / det;
            ji[1] = -cc / det;
            ji[2] = -b / det;
            ji[3] = a / det;
            for (int q = 0; q < c.nq; ++q) {
                const double xi = c.rule.x[q], eta = c.rule.y[q];
                c.weights[e * c.nq + q] = c.rule.w[q] * det;
                c.points[e * c.nq + q] = {p0[0] + a * xi + b * eta, p0[1] + cc * xi + d * eta};
            }
        }
    }
    cache_built_ = true;
    return cache_;
}

void eval_basis(const Mesh& mesh, int element, const std::array<double, 2>& ref_point,
                std::vector<double>& values, std::vector<double>& grads) {
    if (element < 0 || element >= mesh.n_elems())
        throw std::out_of_range("eval_basis: element index out of range");
    shape_eval(mesh.dim, mesh.order, ref_point[0], ref_point[1], values, grads);
}

void write_vtk(const Mesh& mesh, const std::string& path, const std::vector<double>* point_data,
               const std::string& data_name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
    char buf[64];
    out << "# vtk DataFile Version 3.0\npxlaplacian output\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_nodes() << " double\n";
    for (const auto& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p[0], p[1]);
        out << buf;
    }
    const int nv = mesh.verts_per_elem();
    out << "CELLS " << mesh.n_elems() << " " << mesh.n_elems() * (nv + 1) << "\n";
    for (int e = 0; e < mesh.n_elems(); ++e) {
        out << nv;
        for (int i = 0; i < nv; ++i) out << " " << mesh.elem_vertex(e, i);
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.n_elems() << "\n";
    for (int e = 0; e < mesh.n_elems(); ++e) out << (mesh.dim == 1 ? 3 : 5) << "\n";
    if (point_data) {
        out << "POINT_DATA " << mesh.n_nodes() << "\n";
        out << "SCALARS " << data_name << " double 1\nLOOKUP_TABLE default\n";
        for (int v = 0; v < mesh.n_nodes(); ++v) {
            std::snprintf(buf, sizeof buf, "%.17g\n", (*point_data)[v]);
            out << buf;
        }
    }
}

std::string dump_mesh(const Mesh& mesh) {
    std::string s;
    char buf[80];
    s += std::to_string(mesh.n_nodes()) + "\n";
    for (const auto& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
        s += buf;
    }
    s += std::to_string(mesh.n_elems()) + "\n";
    for (int e = 0; e < mesh.n_elems(); ++e) {
        for (int i = 0; i < mesh.verts_per_elem(); ++i) {
            if (i) s += " ";
            s += std::to_string(mesh.elem_vertex(e, i));
        }
        s += "\n";
    }
    return s;
}

// finalize() is local; expose through a friend shim used by the tests when
// constructing meshes by hand.
Mesh finalize_mesh(Mesh m) { return finalize(std::move(m)); }

}  // namespace pxlap
