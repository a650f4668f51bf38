#include "parax/spde.hpp"

#include <cmath>

#include "parax/errors.hpp"

namespace parax {

SpdeCoefficients spde_coefficients(const ModelParams& p) {
    const double strength = p.k * p.k * p.beta * p.beta * p.l_c;
    const cplx denom = 8.0 * (1.0 + cplx(p.delta, -1.0 / (2.0 * p.k)) / p.l_c);
    SpdeCoefficients c;
    c.c_drift = -strength / denom;
    c.g_noise = 0.5 * p.k * p.beta * std::sqrt(p.l_c);
    c.diffr = p.diffraction();
    return c;
}

cplx pathwise_multiplier(double w_value, double z, const SpdeCoefficients& coeff) {
    const double g = coeff.g_noise;
    return std::exp((coeff.c_drift + 0.5 * g * g) * z + cplx(0.0, g * w_value));
}

SpdeStepper::SpdeStepper(const GridPtr& grid, double dz, const SpdeCoefficients& coeff)
    : grid_(grid), dz_(dz), coeff_(coeff) {
    class_phase_.reserve(grid->n_classes());
    for (double k2 : grid->class_kappa2()) class_phase_.push_back(std::polar(1.0, -coeff.diffr * k2 * dz));
}

void SpdeStepper::step(SpectralField& f, double dW) const {
    if (f.space != Space::spectral) throw UsageError("spde_step expects a spectral-space field");
    if (f.grid != grid_) throw UsageError("field grid does not match stepper grid");
    const cplx m = pathwise_multiplier(dW, dz_, coeff_);
    const auto& cls = grid_->mode_class();
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] *= class_phase_[cls[i]] * m;
}

SpectralField spde_step(const SpectralField& f, double dW, double dz, const SpdeCoefficients& coeff) {
    if (f.space != Space::spectral) throw UsageError("spde_step expects a spectral-space field");
    SpectralField out = f;
    SpdeStepper(f.grid, dz, coeff).step(out, dW);
    return out;
}

namespace {

SpectralField scaled_free(const SpectralField& u0, double z, double diffr, cplx scalar) {
    SpectralField f = u0.space == Space::spectral ? u0 : to_spectral(u0);
    const auto& g = *f.grid;
    const auto& cls = g.mode_class();
    const auto& k2 = g.class_kappa2();
    std::vector<cplx> phase(k2.size());
    for (std::size_t c = 0; c < k2.size(); ++c) phase[c] = std::polar(1.0, -diffr * k2[c] * z) * scalar;
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] *= phase[cls[i]];
    if (u0.space == Space::physical) to_physical_inplace(f);
    return f;
}

}  // namespace

SpectralField free_propagate(const SpectralField& u0, double z, double diffr) {
    return scaled_free(u0, z, diffr, 1.0);
}

SpectralField closed_form_solution(const SpectralField& u0, std::span<const double> w_increments, double z,
                                   const SpdeCoefficients& coeff) {
    double w = 0.0;
    for (double dw : w_increments) w += dw;
    return closed_form_solution_at(u0, w, z, coeff);
}

SpectralField closed_form_solution_at(const SpectralField& u0, double w_value, double z,
                                      const SpdeCoefficients& coeff) {
    return scaled_free(u0, z, coeff.diffr, pathwise_multiplier(w_value, z, coeff));
}

SpectralField coherent_field(const SpectralField& u0, double z, const SpdeCoefficients& coeff) {
    if (z < 0.0) throw DomainError("coherent_field needs z >= 0");
    return scaled_free(u0, z, coeff.diffr, std::exp(coeff.c_drift * z));
}

}  // namespace parax
