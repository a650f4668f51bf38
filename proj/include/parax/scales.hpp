#pragma once

#include <numbers>
#include <string>
#include <vector>

namespace parax {

/// A propagation scenario in one consistent length unit.
struct PhysicalScales {
    double L = 0.0;       ///< longitudinal propagation distance
    double L_x = 0.0;     ///< transverse reference scale (beam width)
    double ell = 0.0;     ///< reference scale for wavelength and correlation length
    double k0 = 0.0;      ///< free-space wavenumber
    double ell_c = 0.0;   ///< medium correlation length
    double sigma = 0.0;   ///< fluctuation strength of n^2 - 1

    double wavelength() const { return 2.0 * std::numbers::pi / k0; }
    void validate() const;
};

/// Dimensionless parameter record read by every solver.
///
/// k = k0*ell, l_c = ell_c/ell, eps^2 = ell/L, sigma = beta*eps,
/// N_F = L_x^2 k / (2 pi L ell) and mu = 1/(k l_c). delta is the
/// regularization; the full model needs delta > 0, the limiting SPDE
/// accepts delta = 0.
struct ModelParams {
    double k = 1.0;
    double l_c = 1.0;
    double eps = 0.1;
    double beta = 0.0;
    double delta = 0.0;
    double N_F = 1.0;
    double mu = 1.0;

    void validate() const;
    /// Coefficient of the transverse Laplacian in the limiting model, 1/(4 pi N_F).
    double diffraction() const;
    /// Correlation length of eta in z-units, eps^2 l_c.
    double correlation_length() const { return eps * eps * l_c; }
};

/// Build a record directly from dimensionless values; mu is derived.
ModelParams make_params(double k, double l_c, double eps, double beta, double delta, double N_F);

ModelParams derive_params(const PhysicalScales& s, double delta);

/// Inverse of derive_params for the quantities that survive it, given the
/// original ell (sigma = beta*eps, ell_c = l_c*ell, L = ell/eps^2).
PhysicalScales reconstruct_scales(const ModelParams& p, double ell, double L_x);

struct RegimeThresholds {
    double eps_max = 0.1;
    double nf_min = 0.1;
    double nf_max = 10.0;
    double mu_high_frequency = 0.1;  ///< mu at or below this is "mu << 1"
    double mu_low_frequency = 10.0;  ///< mu above this is long-wavelength
};

enum class FrequencyRegime { high_frequency, same_order, long_wavelength };

struct RegimeReport {
    bool paraxial_ok = false;  ///< eps <= eps_max
    bool fresnel_ok = false;   ///< N_F within [nf_min, nf_max]
    FrequencyRegime regime = FrequencyRegime::same_order;
    double eps = 0.0;
    double N_F = 0.0;
    double mu = 0.0;
    std::vector<std::string> warnings;
};

/// Advisory only; never throws for a valid record.
RegimeReport regime_report(const ModelParams& p, const RegimeThresholds& t = {});

const char* to_string(FrequencyRegime r);

}  // namespace parax
