#include "parax/scales.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "parax/errors.hpp"

namespace parax {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be positive and finite (got " << v << ")";
        throw DomainError(os.str());
    }
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be non-negative and finite (got " << v << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

void PhysicalScales::validate() const {
    require_positive(L, "L");
    require_positive(L_x, "L_x");
    require_positive(ell, "ell");
    require_positive(k0, "k0");
    require_positive(ell_c, "ell_c");
    require_nonnegative(sigma, "sigma");
}

void ModelParams::validate() const {
    require_positive(k, "k");
    require_positive(l_c, "l_c");
    require_positive(eps, "eps");
    require_nonnegative(beta, "beta");
    require_nonnegative(delta, "delta");
    require_positive(N_F, "N_F");
    require_positive(mu, "mu");
}

double ModelParams::diffraction() const { return 1.0 / (4.0 * std::numbers::pi * N_F); }

ModelParams make_params(double k, double l_c, double eps, double beta, double delta, double N_F) {
    ModelParams p;
    p.k = k;
    p.l_c = l_c;
    p.eps = eps;
    p.beta = beta;
    p.delta = delta;
    p.N_F = N_F;
    p.mu = 1.0 / (k * l_c);
    p.validate();
    return p;
}

ModelParams derive_params(const PhysicalScales& s, double delta) {
    s.validate();
    require_nonnegative(delta, "delta");
    const double k = s.k0 * s.ell;
    const double l_c = s.ell_c / s.ell;
    const double eps = std::sqrt(s.ell / s.L);
    const double N_F = s.L_x * s.L_x * k / (2.0 * std::numbers::pi * s.L * s.ell);
    return make_params(k, l_c, eps, s.sigma / eps, delta, N_F);
}

PhysicalScales reconstruct_scales(const ModelParams& p, double ell, double L_x) {
    PhysicalScales s;
    s.ell = ell;
    s.L = ell / (p.eps * p.eps);
    s.L_x = L_x;
    s.k0 = p.k / ell;
    s.ell_c = p.l_c * ell;
    s.sigma = p.beta * p.eps;
    return s;
}

RegimeReport regime_report(const ModelParams& p, const RegimeThresholds& t) {
    RegimeReport r;
    r.eps = p.eps;
    r.N_F = p.N_F;
    r.mu = p.mu;
    r.paraxial_ok = p.eps <= t.eps_max;
    r.fresnel_ok = p.N_F >= t.nf_min && p.N_F <= t.nf_max;
    if (p.mu <= t.mu_high_frequency) {
        r.regime = FrequencyRegime::high_frequency;
    } else if (p.mu <= t.mu_low_frequency) {
        r.regime = FrequencyRegime::same_order;
    } else {
        r.regime = FrequencyRegime::long_wavelength;
    }
    if (!r.paraxial_ok) {
        std::ostringstream os;
        os << "eps = " << p.eps << " exceeds " << t.eps_max << "; the paraxial white-noise scaling assumes eps << 1";
        r.warnings.push_back(os.str());
    }
    if (!r.fresnel_ok) {
        std::ostringstream os;
        os << "Fresnel number " << p.N_F << " outside [" << t.nf_min << ", " << t.nf_max << "]";
        r.warnings.push_back(os.str());
    }
    return r;
}

const char* to_string(FrequencyRegime r) {
    switch (r) {
        case FrequencyRegime::high_frequency: return "high-frequency";
        case FrequencyRegime::same_order: return "same-order";
        case FrequencyRegime::long_wavelength: return "long-wavelength";
    }
    return "unknown";
}

}  // namespace parax
