#include "pxlap/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pxlap/assembly.hpp"
#include "pxlap/numeric.hpp"

namespace pxlap {

namespace {

double to_double(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw std::invalid_argument("config: key '" + key + "' needs a number, got '" +
                                    value + "'");
    return v;
}

int to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw std::invalid_argument("config: key '" + key + "' needs an integer");
    return i;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw std::invalid_argument("config: key '" + key + "' needs on/off");
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string describe(const DomainSpec& d) {
    char buf[160];
    switch (d.kind) {
        case DomainSpec::Kind::Interval:
            std::snprintf(buf, sizeof buf, "interval [%g, %g]", d.a, d.b);
            break;
        case DomainSpec::Kind::Rectangle:
            std::snprintf(buf, sizeof buf, "rectangle [%g, %g] x [%g, %g]", d.x0, d.x1,
                          d.y0, d.y1);
            break;
        case DomainSpec::Kind::Disk:
            std::snprintf(buf, sizeof buf, "disk center (%g, %g) radius %g", d.cx, d.cy,
                          d.r);
            break;
        case DomainSpec::Kind::Annulus:
            std::snprintf(buf, sizeof buf, "annulus center (%g, %g) radii [%g, %g]", d.cx,
                          d.cy, d.r_in, d.r_out);
            break;
    }
    return buf;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

}  // namespace

DomainSpec RunConfig::domain() const {
    if (domain_kind == "interval") return DomainSpec::interval(xmin, xmax);
    if (domain_kind == "square" || domain_kind == "rectangle")
        return DomainSpec::rectangle(xmin, xmax, ymin, ymax);
    if (domain_kind == "disk") return DomainSpec::disk(cx, cy, radius);
    if (domain_kind == "annulus") return DomainSpec::annulus(cx, cy, r_inner, r_outer);
    throw std::invalid_argument("config: unknown domain '" + domain_kind + "'");
}

Expression RunConfig::exponent() const {
    if (p_text.empty()) throw std::invalid_argument("config: missing exponent key 'p'");
    return Expression::parse(p_text);
}

void RunConfig::validate() const {
    const DomainSpec spec = domain();
    spec.validate();
    if (!(h > 0.0)) throw std::invalid_argument("config: h must be > 0");
    if (order != 1 && order != 2) throw std::invalid_argument("config: order must be 1 or 2");
    if (levels < 1) throw std::invalid_argument("config: levels must be >= 1");
    solver.validate();
    const Expression p = exponent();

    // dense sample of the closed domain, before any meshing
    const auto check_point = [&](double x, double y) {
        const double v = p(x, y);
        if (!std::isfinite(v) || !(v > 1.0)) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "config: exponent must stay in (1, inf); p(%g, %g) = %g", x, y, v);
            throw std::invalid_argument(buf);
        }
    };
    if (spec.kind == DomainSpec::Kind::Interval) {
        const int n = 2000;
        for (int i = 0; i <= n; ++i)
            check_point(spec.a + (spec.b - spec.a) * i / n, 0.0);
        return;
    }
    double bx0, bx1, by0, by1;
    if (spec.kind == DomainSpec::Kind::Rectangle) {
        bx0 = spec.x0, bx1 = spec.x1, by0 = spec.y0, by1 = spec.y1;
    } else {
        const double R = spec.kind == DomainSpec::Kind::Disk ? spec.r : spec.r_out;
        bx0 = spec.cx - R, bx1 = spec.cx + R, by0 = spec.cy - R, by1 = spec.cy + R;
    }
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double x = bx0 + (bx1 - bx0) * i / n;
            const double y = by0 + (by1 - by0) * j / n;
            if (spec.kind != DomainSpec::Kind::Rectangle) {
                const double r = std::hypot(x - spec.cx, y - spec.cy);
                const double R = spec.kind == DomainSpec::Kind::Disk ? spec.r : spec.r_out;
                if (r > R) continue;
                if (spec.kind == DomainSpec::Kind::Annulus && r < spec.r_in) continue;
            }
            check_point(x, y);
        }
    }
}

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "domain") {
        if (value != "square" && value != "rectangle" && value != "interval" &&
            value != "disk" && value != "annulus")
            throw std::invalid_argument("config: unknown domain '" + value + "'");
        cfg.domain_kind = value;
    } else if (key == "xmin") cfg.xmin = to_double(key, value);
    else if (key == "xmax") cfg.xmax = to_double(key, value);
    else if (key == "ymin") cfg.ymin = to_double(key, value);
    else if (key == "ymax") cfg.ymax = to_double(key, value);
    else if (key == "cx") cfg.cx = to_double(key, value);
    else if (key == "cy") cfg.cy = to_double(key, value);
    else if (key == "radius") cfg.radius = to_double(key, value);
    else if (key == "r_inner") cfg.r_inner = to_double(key, value);
    else if (key == "r_outer") cfg.r_outer = to_double(key, value);
    else if (key == "p") cfg.p_text = value;
    else if (key == "h") cfg.h = to_double(key, value);
    else if (key == "order") cfg.order = to_int(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "diagnostics") cfg.diagnostics = to_bool(key, value);
    else if (key == "levels") cfg.levels = to_int(key, value);
    else if (key == "newton_tol") cfg.solver.newton_tol = to_double(key, value);
    else if (key == "inner_tol") cfg.solver.inner_tol = to_double(key, value);
    else if (key == "inner_max_iters") cfg.solver.inner_max_iters = to_int(key, value);
    else if (key == "power_tol") cfg.solver.power_tol = to_double(key, value);
    else if (key == "power_max_iters") cfg.solver.power_max_iters = to_int(key, value);
    else if (key == "continuation_steps") cfg.solver.continuation_steps = to_int(key, value);
    else if (key == "regularization_eps") cfg.solver.regularization_eps = to_double(key, value);
    else if (key == "restart_period") cfg.solver.restart_period = to_int(key, value);
    else if (key == "scan_center") cfg.scan_center = to_double(key, value);
    else if (key == "scan_half_width") cfg.scan_half_width = to_double(key, value);
    else if (key == "scan_plateau") cfg.scan_plateau = to_double(key, value);
    else if (key == "scan_amplitudes") cfg.scan_amplitudes = parse_list(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        set_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void write_eigenfunction_csv(const ScalarField& u, const std::string& path) {
    if (!u.mesh) throw std::invalid_argument("write_eigenfunction_csv: field has no mesh");
    const Mesh& m = *u.mesh;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const std::vector<double> vals = full_dof_values(u);
    out << (m.dim == 1 ? "x,u\n" : "x,y,u\n");
    for (int i = 0; i < m.n_dofs(); ++i) {
        if (m.dim == 1)
            out << fmt(m.dof_coords[i][0]) << ',' << fmt(vals[i]) << '\n';
        else
            out << fmt(m.dof_coords[i][0]) << ',' << fmt(m.dof_coords[i][1]) << ','
                << fmt(vals[i]) << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path);
}

ScalarField read_eigenfunction_csv(const Mesh& mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("eigenfunction CSV is empty: " + path);
    const double coord_tol = 1e-9 * (1.0 + mesh.spec.diameter());

    ScalarField u(mesh);
    int row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (row >= mesh.n_dofs())
            throw std::runtime_error("eigenfunction CSV has too many rows: " + path);
        double x = 0, y = 0, v = 0;
        if (mesh.dim == 1) {
            if (std::sscanf(line.c_str(), "%lf,%lf", &x, &v) != 2)
                throw std::runtime_error("bad CSV row: " + line);
        } else {
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3)
                throw std::runtime_error("bad CSV row: " + line);
        }
        if (std::abs(x - mesh.dof_coords[row][0]) > coord_tol ||
            std::abs(y - mesh.dof_coords[row][1]) > coord_tol)
            throw std::runtime_error("eigenfunction CSV does not match the mesh dofs");
        const int k = mesh.dof_interior_index[row];
        if (k >= 0) u.coeffs[k] = v;
        ++row;
    }
    if (row != mesh.n_dofs())
        throw std::runtime_error("eigenfunction CSV has too few rows: " + path);
    return u;
}

void write_summary(const EigenpairResult& r, const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "domain = " << describe(cfg.domain()) << '\n';
    out << "p = " << cfg.p_text << '\n';
    out << "h = " << fmt(cfg.h) << '\n';
    out << "order = " << cfg.order << '\n';
    out << "lambda1 = " << fmt(r.lambda1) << '\n';
    out << "Lambda1 = " << fmt(r.Lambda1) << '\n';
    out << "K = " << fmt(r.K) << '\n';
    out << "k = " << fmt(r.k) << '\n';
    out << "S = " << fmt(r.S_const) << '\n';
    out << "iterations = " << r.iterations << '\n';
    out << "el_residual = " << fmt(r.el_residual) << '\n';
    out << "converged = " << (r.converged ? "true" : "false") << '\n';
    out << "trace = ";
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        if (i) out << ';';
        out << fmt(r.trace[i][0]) << ':' << fmt(r.trace[i][1]);
    }
    out << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

SolveArtifacts run_solve(const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);

    SolveArtifacts art;
    const DomainSpec spec = cfg.domain();
    art.mesh = std::make_unique<Mesh>(generate_mesh(spec, cfg.h, cfg.order));
    const Expression expr = cfg.exponent();
    ExponentField p =
        ExponentField::from([expr](double x, double y) { return expr(x, y); });

    art.result = continuation_solve(spec, p, *art.mesh, cfg.solver);

    const std::filesystem::path dir(cfg.out_dir);
    art.csv_path = (dir / "eigenfunction.csv").string();
    art.vtk_path = (dir / "eigenfunction.vtk").string();
    art.summary_path = (dir / "summary.txt").string();
    write_eigenfunction_csv(art.result.u, art.csv_path);
    const std::vector<double> vv = vertex_values(art.result.u);
    write_vtk(*art.mesh, art.vtk_path, &vv, "u");
    write_summary(art.result, cfg, art.summary_path);

    if (cfg.diagnostics) {
        const DiagnosticsReport rep = run_diagnostics(art.result, cfg);
        write_diagnostics(rep, (dir / "diagnostics.txt").string());
    }
    return art;
}

StudyResult run_convergence_study(const RunConfig& cfg, int levels) {
    if (levels < 3)
        throw std::invalid_argument("run_convergence_study: need at least 3 levels");
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);

    const DomainSpec spec = cfg.domain();
    const Expression expr = cfg.exponent();
    ExponentField p =
        ExponentField::from([expr](double x, double y) { return expr(x, y); });

    StudyResult study;
    std::unique_ptr<Mesh> mesh =
        std::make_unique<Mesh>(generate_mesh(spec, cfg.h, cfg.order));
    std::unique_ptr<Mesh> prev_mesh;
    EigenpairResult result;

    for (int level = 0; level < levels; ++level) {
        if (level > 0) {
            prev_mesh = std::move(mesh);
            mesh = std::make_unique<Mesh>(refine(*prev_mesh));
        }
        bool solved = false;
        if (level > 0 && result.converged) {
            // warm start: carry the previous level's eigenfunction over
            ScalarField u0 = transfer(result.u, *mesh);
            bool nonzero = false;
            for (double c : u0.coeffs) nonzero |= c != 0.0;
            if (nonzero) {
                EigenpairResult direct = inverse_power(p, *mesh, u0, cfg.solver);
                if (direct.converged) {
                    direct.trace = {{1.0, direct.lambda1}};
                    result = std::move(direct);
                    solved = true;
                }
            }
        }
        if (!solved) result = continuation_solve(spec, p, *mesh, cfg.solver);
        study.rows.push_back(
            {level, mesh->max_element_diameter(), mesh->n_interior(), result.lambda1});
    }

    for (std::size_t i = 2; i < study.rows.size(); ++i) {
        const double d0 = study.rows[i - 1].lambda1 - study.rows[i - 2].lambda1;
        const double d1 = study.rows[i].lambda1 - study.rows[i - 1].lambda1;
        study.orders.push_back(std::log2(std::abs(d0) / std::abs(d1)));
    }

    const std::filesystem::path dir(cfg.out_dir);
    study.csv_path = (dir / "study.csv").string();
    std::ofstream out(study.csv_path);
    if (!out) throw std::runtime_error("cannot open " + study.csv_path);
    out << "level,h,dofs,lambda1,order\n";
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const StudyRow& row = study.rows[i];
        out << row.level << ',' << fmt(row.h_max) << ',' << row.dofs << ','
            << fmt(row.lambda1) << ',';
        if (i >= 2) out << fmt(study.orders[i - 2]);
        out << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + study.csv_path);
    return study;
}

namespace {

// quantized coordinate key for exact-mirror lookups
std::pair<long long, long long> coord_key(double x, double y, double scale) {
    return {std::llround(x * scale), std::llround(y * scale)};
}

}  // namespace

DiagnosticsReport run_diagnostics(const EigenpairResult& result, const RunConfig& cfg) {
    if (!result.converged)
        throw std::invalid_argument("run_diagnostics: result did not converge");
    if (!result.u.mesh) throw std::invalid_argument("run_diagnostics: field has no mesh");
    const Mesh& m = *result.u.mesh;
    const DomainSpec spec = cfg.domain();
    const auto c = spec.center();

    const std::vector<double> vals = full_dof_values(result.u);
    double umax = 0.0;
    for (double v : vals) umax = std::max(umax, std::abs(v));
    if (umax == 0.0) throw std::invalid_argument("run_diagnostics: zero field");

    const double scale = 1e8 / (1.0 + spec.diameter());
    std::map<std::pair<long long, long long>, int> index;
    for (int i = 0; i < m.n_dofs(); ++i)
        index[coord_key(m.dof_coords[i][0], m.dof_coords[i][1], scale)] = i;

    DiagnosticsReport rep;
    rep.note =
        "symmetry-defect thresholds are resolution-calibration values, not analytic "
        "constants";

    int center_pairs = 0, reflect_pairs = 0;
    double center_max = 0.0, reflect_max = 0.0;
    for (int i = 0; i < m.n_dofs(); ++i) {
        const double x = m.dof_coords[i][0], y = m.dof_coords[i][1];
        auto it = index.find(coord_key(2.0 * c[0] - x, 2.0 * c[1] - y, scale));
        if (it != index.end()) {
            center_max = std::max(center_max, std::abs(vals[i] - vals[it->second]));
            ++center_pairs;
        }
        it = index.find(coord_key(2.0 * c[0] - x, y, scale));
        if (it != index.end()) {
            reflect_max = std::max(reflect_max, std::abs(vals[i] - vals[it->second]));
            ++reflect_pairs;
        }
    }
    if (center_pairs > 0) {
        rep.has_center = true;
        rep.center_defect = center_max / umax;
    }
    if (reflect_pairs > 0) {
        rep.has_xreflect = true;
        rep.xreflect_defect = reflect_max / umax;
    }

    if (m.dim == 1) {
        std::vector<std::pair<double, double>> pts;  // (x, u) at dofs
        for (int i = 0; i < m.n_dofs(); ++i)
            if (vals[i] > 1e-8 * umax) pts.push_back({m.dof_coords[i][0], vals[i]});
        std::sort(pts.begin(), pts.end());
        rep.max_second_diff = -1e300;
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            const double d2 = std::log(pts[i + 1].second) - 2.0 * std::log(pts[i].second) +
                              std::log(pts[i - 1].second);
            ++rep.second_diffs;
            if (d2 > 1e-12) ++rep.positive_second_diffs;
            rep.max_second_diff = std::max(rep.max_second_diff, d2);
        }
        if (rep.second_diffs == 0) rep.max_second_diff = 0.0;
    }
    return rep;
}

void write_diagnostics(const DiagnosticsReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    if (rep.has_center) out << "center_symmetry_defect = " << fmt(rep.center_defect) << '\n';
    if (rep.has_xreflect)
        out << "x_reflection_defect = " << fmt(rep.xreflect_defect) << '\n';
    out << "log_concavity_second_diffs = " << rep.second_diffs << '\n';
    out << "log_concavity_positive_second_diffs = " << rep.positive_second_diffs << '\n';
    out << "log_concavity_max_second_diff = " << fmt(rep.max_second_diff) << '\n';
    out << "note = " << rep.note << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path);
}

QuotientScan run_scan(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.domain().dim() != 1)
        throw std::invalid_argument("run_scan: scans require an interval domain");
    if (cfg.scan_amplitudes.empty())
        throw std::invalid_argument("run_scan: scan_amplitudes not set");
    std::filesystem::create_directories(cfg.out_dir);

    const Mesh mesh = generate_mesh(cfg.domain(), cfg.h, cfg.order);
    const Expression expr = cfg.exponent();
    ExponentField p =
        ExponentField::from([expr](double x, double y) { return expr(x, y); });
    QuotientScan scan = collapse_scan(p, mesh, cfg.scan_center, cfg.scan_amplitudes,
                                      cfg.scan_half_width, cfg.scan_plateau);
    write_scan_csv(scan, (std::filesystem::path(cfg.out_dir) / "scan.csv").string());
    return scan;
}

}  // namespace pxlap
