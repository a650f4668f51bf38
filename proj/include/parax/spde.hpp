#pragma once

#include <span>
#include <vector>

#include "parax/grid.hpp"
#include "parax/scales.hpp"

namespace parax {

/// Coefficients of the limiting Ito equation
///   du = i diffr Lap u dz + c u dz + i g u dW.
struct SpdeCoefficients {
    cplx c_drift;      ///< -k^2 beta^2 l_c / (8 (1 + (delta - i/(2k))/l_c))
    double g_noise;    ///< k beta sqrt(l_c) / 2
    double diffr;      ///< 1 / (4 pi N_F)

    /// Deterministic pathwise log-growth of the L2 norm, Re c + g^2/2.
    double norm_growth_rate() const { return c_drift.real() + 0.5 * g_noise * g_noise; }
};

SpdeCoefficients spde_coefficients(const ModelParams& p);

/// Exact Ito step in spectral space: each mode gets the free phase
/// exp(-i diffr |kappa|^2 dz) and the whole field the scalar multiplier
/// exp((c + g^2/2) dz + i g dW). The two factors commute, so the step is exact.
SpectralField spde_step(const SpectralField& f, double dW, double dz, const SpdeCoefficients& coeff);

/// Reusable stepper for a fixed dz; caches the per-|kappa|^2 free phases.
class SpdeStepper {
public:
    SpdeStepper(const GridPtr& grid, double dz, const SpdeCoefficients& coeff);
    void step(SpectralField& f, double dW) const;
    double dz() const { return dz_; }

private:
    GridPtr grid_;
    double dz_;
    SpdeCoefficients coeff_;
    std::vector<cplx> class_phase_;
};

/// S(z) u0: free propagation, exact in spectral space. Output in the input's space.
SpectralField free_propagate(const SpectralField& u0, double z, double diffr);

/// exp((c + g^2/2) z + i g W(z)) S(z) u0 with W(z) the sum of the increments.
SpectralField closed_form_solution(const SpectralField& u0, std::span<const double> w_increments, double z,
                                   const SpdeCoefficients& coeff);
SpectralField closed_form_solution_at(const SpectralField& u0, double w_value, double z,
                                      const SpdeCoefficients& coeff);

/// E[u](z) = exp(c z) S(z) u0.
SpectralField coherent_field(const SpectralField& u0, double z, const SpdeCoefficients& coeff);

/// Scalar multiplier exp((c + g^2/2) z + i g W).
cplx pathwise_multiplier(double w_value, double z, const SpdeCoefficients& coeff);

}  // namespace parax
