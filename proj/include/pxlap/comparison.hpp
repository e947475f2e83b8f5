#pragma once

#include <string>
#include <vector>

#include "pxlap/assembly.hpp"
#include "pxlap/luxemburg.hpp"
#include "pxlap/mesh.hpp"

namespace pxlap {

// one-parameter amplitude scan contrasting the nonhomogeneous quotient with
// the scale-invariant Luxemburg quotient
struct QuotientScan {
    std::string description;
    std::vector<double> t;      // amplitudes, strictly decreasing
    std::vector<double> mubar;  // quotient without 1/p weights at t * phi
    std::vector<double> homog;  // Luxemburg quotient ||grad(t phi)|| / ||t phi||
};

// integral-ratio quotient with 1/p(x) weights in both integrals:
// ( int |grad u|^p / p ) / ( int |u|^p / p )
double quotient_mu(const ScalarField& u, const std::vector<double>& p_values);
double quotient_mu(const ScalarField& u, const ExponentField& p);

// the same ratio without the 1/p(x) weights
double quotient_mubar(const ScalarField& u, const std::vector<double>& p_values);
double quotient_mubar(const ScalarField& u, const ExponentField& p);

// trapezoidal bump: 1 for |x - center| <= plateau_half_width, linear decay to 0
// at |x - center| = half_width
double bump_profile(double x, double center, double half_width, double plateau_half_width);

// scan of mubar(t * phi) over a decreasing amplitude grid, phi the trapezoidal
// bump interpolated on a 1D mesh; records the homogeneous quotient alongside
QuotientScan collapse_scan(const ExponentField& p, const Mesh& mesh, double bump_center,
                           const std::vector<double>& amplitudes, double half_width,
                           double plateau_half_width);

// CSV with header t,mubar,homogeneous_quotient; %.17g round-trip precision
void write_scan_csv(const QuotientScan& scan, const std::string& path);

}  // namespace pxlap
