#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "parax/grid.hpp"
#include "parax/noise.hpp"
#include "parax/scales.hpp"

namespace parax {

/// Per-mode drift of the regularized system
///   du = v/eps dz
///   dv = [ -(damping/eps^2) v - (diffraction/eps) u + (medium/eps^2) eta u ] dz
/// with damping = 2k/(2 delta k - i), diffraction = |kappa|^2 (k/(2 pi N_F)) i/(2 delta k - i)
/// and medium = k^2 beta i/(2 delta k - i).
struct ModeCoefficients {
    cplx damping;
    cplx diffraction;
    cplx medium;
};

ModeCoefficients mode_coefficients(const ModelParams& p, double kappa2);

/// Largest admissible step c_stab * eps^2 * min(l_c, |2 delta k - i|/(2k)).
double full_step_bound(const ModelParams& p, double c_stab = 0.1);

struct FullState {
    SpectralField u_hat;
    SpectralField v_hat;  ///< eps du/dz
    double z = 0.0;
    double eta = 0.0;
};

/// Initial state; v_hat defaults to zero. Physical-space inputs are transformed.
FullState make_full_state(const SpectralField& u0, double eta0, const std::optional<SpectralField>& v0 = {});

/// 2x2 complex matrix acting on (u_hat, v_hat) of one mode.
struct Mat2c {
    cplx a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};
};

Mat2c operator*(const Mat2c& a, const Mat2c& b);

/// exp(h M) for M = [[0, 1/eps], [c21, -damping/eps^2]], in closed form.
Mat2c mode_propagator(double eps, cplx damping, cplx c21, double h);

/// Exponential integrator for one grid and one step size. Each step freezes
/// eta at the average of its endpoint values and applies the exact 2x2
/// exponential to every mode; modes with equal |kappa|^2 share it.
class FullStepper {
public:
    /// Throws StabilityError if dz exceeds full_step_bound(p, c_stab).
    FullStepper(const ModelParams& p, GridPtr grid, double dz, double c_stab = 0.1);

    double dz() const { return dz_; }
    const ModelParams& params() const { return p_; }
    const GridPtr& grid() const { return grid_; }

    Mat2c class_propagator(std::size_t cls, double eta_mid) const;

    /// One step of the whole field; eta_next is eta at z + dz.
    void step(FullState& s, double eta_next) const;

    /// Left-multiply prod[cls] by the propagators of the steps spanned by
    /// eta (length m + 1 covers m steps).
    void accumulate(std::span<const double> eta, std::vector<Mat2c>& prod) const;

    /// Apply per-class propagators to the state and advance z by n_steps*dz.
    void apply(const std::vector<Mat2c>& prod, FullState& s, std::size_t n_steps, double eta_end) const;

private:
    ModelParams p_;
    GridPtr grid_;
    double dz_;
    cplx damping_;
    cplx medium_;
    std::vector<cplx> class_diffraction_;
    cplx decay_;     // exp(dz T), T = -damping/(2 eps^2)
    cplx t_;
    cplx t2_;
};

/// Single step from scratch (builds a FullStepper); for repeated steps use FullStepper.
FullState step_full(const FullState& s, double eta_next, const ModelParams& p, double dz, double c_stab = 0.1);

struct FullRunOptions {
    double dz = 0.0;                    ///< 0: largest admissible step that lands on every snapshot
    double c_stab = 0.1;
    std::optional<SpectralField> v0;    ///< default v_hat(0) = 0
};

struct FullTrajectory {
    std::vector<FullState> snapshots;
    double dz = 0.0;
    std::size_t n_steps = 0;
};

/// Step count for [0, z_end] so that every snapshot z lies on the step grid.
std::size_t full_step_count(const ModelParams& p, double z_end, std::span<const double> snapshot_zs,
                            double c_stab = 0.1);

/// Sample the OU path for `seed` and integrate to z_end, recording snapshots.
FullTrajectory solve_full(const SpectralField& u0, const ModelParams& p, double z_end, StreamId seed,
                          std::span<const double> snapshot_zs, const FullRunOptions& opt = {});

/// Integrate along given eta samples (eta[n] at z = n*dz); snapshot_steps ascending.
std::vector<FullState> solve_full_on_path(const SpectralField& u0, const ModelParams& p,
                                          std::span<const double> eta, double dz,
                                          std::span<const std::size_t> snapshot_steps,
                                          const FullRunOptions& opt = {});

/// Same as solve_full_on_path, stepping the whole field every step (reference path).
std::vector<FullState> solve_full_on_path_stepwise(const SpectralField& u0, const ModelParams& p,
                                                   std::span<const double> eta, double dz,
                                                   std::span<const std::size_t> snapshot_steps,
                                                   const FullRunOptions& opt = {});

}  // namespace parax
