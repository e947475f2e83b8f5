#include "pxlap/luxemburg.hpp"

#include <cmath>
#include <stdexcept>

#include "pxlap/numeric.hpp"

namespace pxlap {

ExponentField ExponentField::constant(double p) {
    ExponentField f;
    f.evaluator = [p](double, double) { return p; };
    f.p_minus = f.p_plus = p;
    return f;
}

ExponentField ExponentField::from(std::function<double(double, double)> fn) {
    ExponentField f;
    f.evaluator = std::move(fn);
    f.p_minus = f.p_plus = 0.0;  // unknown until sampled
    return f;
}

std::vector<double> sample_exponent(const Mesh& mesh, ExponentField& p) {
    const auto& qc = mesh.quad();
    std::vector<double> vals(qc.n_points());
    double lo = 1e300, hi = -1e300;
    for (int q = 0; q < qc.n_points(); ++q) {
        const double v = p.evaluator(qc.points[q][0], qc.points[q][1]);
        if (!(v > 1.0) || !std::isfinite(v))
            throw std::domain_error("exponent field: p(x) must satisfy p > 1 everywhere");
        vals[q] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    p.p_minus = lo;
    p.p_plus = hi;
    return vals;
}

double SampledField::abs_at(int q) const {
    if (ncomp == 1) return std::abs(values[q]);
    return std::hypot(values[2 * q], values[2 * q + 1]);
}

double SampledField::max_abs() const {
    double m = 0.0;
    for (int q = 0; q < n_points(); ++q) m = std::max(m, abs_at(q));
    return m;
}

bool SampledField::is_zero() const {
    for (double v : values)
        if (v != 0.0) return false;
    return true;
}

SampledField sampled_layout(const Mesh& mesh, int ncomp) {
    const auto& qc = mesh.quad();
    SampledField f;
    f.ncomp = ncomp;
    f.weights = qc.weights;
    f.points = qc.points;
    f.values.assign(static_cast<std::size_t>(qc.n_points()) * ncomp, 0.0);
    return f;
}

namespace {

std::vector<double> eval_exponent(const SampledField& f, const ExponentField& p) {
    std::vector<double> vals(f.n_points());
    for (int q = 0; q < f.n_points(); ++q) {
        vals[q] = p.evaluator(f.points[q][0], f.points[q][1]);
        if (!(vals[q] > 1.0)) throw std::domain_error("exponent field: p(x) must be > 1");
    }
    return vals;
}

// modular and its plain-power companion sum_q w |f/g|^p in one pass.
// Values are capped so an absurdly small gamma saturates instead of
// poisoning the compensated sum with infinities.
void modular_pair(const std::vector<double>& absf, const std::vector<double>& w,
                  const std::vector<double>& p, double gamma, double& mod, double& plain) {
    constexpr double cap = 1e290;
    KahanSum sm, sp;
    for (std::size_t q = 0; q < absf.size(); ++q) {
        double t = w[q] * std::pow(absf[q] / gamma, p[q]);
        if (!(t < cap)) t = cap;
        sp.add(t);
        sm.add(t / p[q]);
        if (sm.value() >= cap) break;
    }
    mod = sm.value();
    plain = sp.value();
}

}  // namespace

double modular(const SampledField& f, const std::vector<double>& p_values, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("modular: gamma must be > 0");
    std::vector<double> absf(f.n_points());
    for (int q = 0; q < f.n_points(); ++q) absf[q] = f.abs_at(q);
    double mod, plain;
    modular_pair(absf, f.weights, p_values, gamma, mod, plain);
    return mod;
}

double modular(const SampledField& f, const ExponentField& p, double gamma) {
    return modular(f, eval_exponent(f, p), gamma);
}

double luxemburg_norm(const SampledField& f, const std::vector<double>& p_values,
                      double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("luxemburg_norm: tol must be > 0");
    const int n = f.n_points();
    std::vector<double> absf(n);
    double maxabs = 0.0;
    KahanSum wsum;
    double pmin = 1e300, pmax = 0.0;
    for (int q = 0; q < n; ++q) {
        absf[q] = f.abs_at(q);
        if (!std::isfinite(absf[q]))
            throw std::domain_error("luxemburg_norm: non-finite field value");
        maxabs = std::max(maxabs, absf[q]);
        wsum.add(f.weights[q]);
        pmin = std::min(pmin, p_values[q]);
        pmax = std::max(pmax, p_values[q]);
    }
    if (maxabs == 0.0) return 0.0;

    // initial guess on the modular > 1 side, then monotone Newton: by
    // convexity every iterate from the left stays left of the root
    double gamma = maxabs * std::min(1.0, std::pow(wsum.value() / pmax, 1.0 / pmin));
    double mod, plain;
    for (int k = 0; k < 2200; ++k) {
        modular_pair(absf, f.weights, p_values, gamma, mod, plain);
        if (mod >= 1.0) break;
        gamma *= 0.5;
    }
    for (int it = 0; it < 200; ++it) {
        const double F = mod - 1.0;
        if (std::abs(F) <= tol) return gamma;
        // F'(gamma) = -plain / gamma
        double next = gamma + F * gamma / plain;
        if (!(next > 0.0) || !std::isfinite(next)) next = 0.5 * gamma;
        gamma = next;
        modular_pair(absf, f.weights, p_values, gamma, mod, plain);
    }
    throw std::runtime_error("luxemburg_norm: Newton iteration failed to converge");
}

double luxemburg_norm(const SampledField& f, const ExponentField& p, double tol) {
    return luxemburg_norm(f, eval_exponent(f, p), tol);
}

double norm_first_variation(const SampledField& f, const SampledField& eta,
                            const std::vector<double>& p_values) {
    if (f.is_zero())
        throw std::domain_error("norm_first_variation: norm not differentiable at 0");
    const double gamma = luxemburg_norm(f, p_values);
    KahanSum num, den;
    for (int q = 0; q < f.n_points(); ++q) {
        const double w = f.weights[q];
        if (f.ncomp == 1) {
            const double s = signed_pow(f.values[q] / gamma, p_values[q]);
            // s = |f/g|^{p-1} sign(f/g): multiply by eta and by |f/g| resp.
            num.add(w * s * eta.values[q]);
            den.add(w * s * (f.values[q] / gamma));
        } else {
            double ox, oy;
            vector_pow(f.values[2 * q] / gamma, f.values[2 * q + 1] / gamma, p_values[q], ox,
                       oy);
            num.add(w * (ox * eta.values[2 * q] + oy * eta.values[2 * q + 1]));
            den.add(w * (ox * (f.values[2 * q] / gamma) + oy * (f.values[2 * q + 1] / gamma)));
        }
    }
    return num.value() / den.value();
}

double norm_first_variation(const SampledField& f, const SampledField& eta,
                            const ExponentField& p) {
    return norm_first_variation(f, eta, eval_exponent(f, p));
}

}  // namespace pxlap
