#include "pxlap/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pxlap/numeric.hpp"

namespace pxlap {

namespace {

std::vector<double> exponent_samples(const Mesh& m, const ExponentField& p) {
    ExponentField copy = p;
    return sample_exponent(m, copy);
}

double quotient(const ScalarField& u, const std::vector<double>& pv, bool inv_p_weights) {
    if (!u.mesh) throw std::invalid_argument("quotient: field has no mesh");
    bool any = false;
    for (double c : u.coeffs) any |= c != 0.0;
    if (!any) throw std::domain_error("quotient: zero field");
    const SampledField su = sample(u);
    const SampledField sg = sample_gradient(u);
    if (pv.size() != static_cast<std::size_t>(su.n_points()))
        throw std::invalid_argument("quotient: exponent sample size mismatch");

    KahanSum num, den;
    for (int q = 0; q < su.n_points(); ++q) {
        const double p = pv[q];
        const double w = inv_p_weights ? su.weights[q] / p : su.weights[q];
        const double gx = sg.values[2 * q], gy = sg.values[2 * q + 1];
        num.add(w * std::pow(gx * gx + gy * gy, 0.5 * p));
        den.add(w * std::pow(std::abs(su.values[q]), p));
    }
    const double value = num.value() / den.value();
    if (!std::isfinite(value)) throw std::runtime_error("quotient: non-finite value");
    return value;
}

}  // namespace

double quotient_mu(const ScalarField& u, const std::vector<double>& pv) {
    return quotient(u, pv, true);
}

double quotient_mu(const ScalarField& u, const ExponentField& p) {
    if (!u.mesh) throw std::invalid_argument("quotient: field has no mesh");
    return quotient(u, exponent_samples(*u.mesh, p), true);
}

double quotient_mubar(const ScalarField& u, const std::vector<double>& pv) {
    return quotient(u, pv, false);
}

double quotient_mubar(const ScalarField& u, const ExponentField& p) {
    if (!u.mesh) throw std::invalid_argument("quotient: field has no mesh");
    return quotient(u, exponent_samples(*u.mesh, p), false);
}

double bump_profile(double x, double center, double half_width, double plateau_half_width) {
    const double s = (half_width - std::abs(x - center)) / (half_width - plateau_half_width);
    return std::clamp(s, 0.0, 1.0);
}

QuotientScan collapse_scan(const ExponentField& p, const Mesh& mesh, double bump_center,
                           const std::vector<double>& amplitudes, double half_width,
                           double plateau_half_width) {
    if (mesh.dim != 1) throw std::invalid_argument("collapse_scan: 1D mesh required");
    if (!(plateau_half_width > 0.0) || !(half_width > plateau_half_width))
        throw std::invalid_argument("collapse_scan: need half_width > plateau_half_width > 0");
    if (amplitudes.size() < 2)
        throw std::invalid_argument("collapse_scan: degenerate amplitude grid");
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (!(amplitudes[i] > 0.0) || (i > 0 && !(amplitudes[i] < amplitudes[i - 1])))
            throw std::invalid_argument(
                "collapse_scan: amplitudes must be positive and strictly decreasing");
    }

    const std::vector<double> pv = exponent_samples(mesh, p);
    const ScalarField phi = interpolate(mesh, [&](double x, double) {
        return bump_profile(x, bump_center, half_width, plateau_half_width);
    });
    bool any = false;
    for (double c : phi.coeffs) any |= c != 0.0;
    if (!any)
        throw std::invalid_argument("collapse_scan: bump vanishes on the interior dofs");

    QuotientScan scan;
    {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "trapezoid bump at %g (half width %g, plateau %g), %zu amplitudes in "
                      "[%g, %g]",
                      bump_center, half_width, plateau_half_width, amplitudes.size(),
                      amplitudes.back(), amplitudes.front());
        scan.description = buf;
    }

    for (double t : amplitudes) {
        ScalarField u = phi;
        for (double& c : u.coeffs) c *= t;
        const double mb = quotient_mubar(u, pv);
        const double K = luxemburg_norm(sample_gradient(u), pv);
        const double k = luxemburg_norm(sample(u), pv);
        const double hq = K / k;
        if (!(std::isfinite(mb) && mb > 0.0 && std::isfinite(hq) && hq > 0.0))
            throw std::runtime_error("collapse_scan: nonpositive quotient recorded");
        scan.t.push_back(t);
        scan.mubar.push_back(mb);
        scan.homog.push_back(hq);
    }
    return scan;
}

void write_scan_csv(const QuotientScan& scan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_scan_csv: cannot open " + path);
    out << "t,mubar,homogeneous_quotient\n";
    for (std::size_t i = 0; i < scan.t.size(); ++i) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", scan.t[i], scan.mubar[i],
                      scan.homog[i]);
        out << buf;
    }
    out.flush();
    if (!out) throw std::runtime_error("write_scan_csv: write failed for " + path);
}

}  // namespace pxlap
