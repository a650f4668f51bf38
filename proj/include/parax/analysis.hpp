#pragma once

#include <cstdint>
#include <vector>

#include "parax/ensemble.hpp"
#include "parax/exec.hpp"
#include "parax/grid.hpp"
#include "parax/scales.hpp"

namespace parax {

/// Lambda = k^2 beta^2 l_c / (8 (1 + 1/(4 k^2 l_c^2))), decay rate of E[u] at delta = 0.
double decay_constant_theory(const ModelParams& p);

/// Re c + g^2/2 at delta = 0: (k^2 beta^2 l_c/8) (mu^2/4)/(1 + mu^2/4).
double norm_growth_rate_theory(const ModelParams& p);

/// One snapshot for the decay fit: ensemble mean and its standard error at
/// the probe point, and the free-propagation reference S(z)u0 there.
struct DecaySample {
    double z = 0.0;
    cplx mean;
    cplx reference;
    double stderr_mean = 0.0;
};

struct DecayReport {
    double lambda_fit = 0.0;
    double lambda_theory = 0.0;
    double stderr = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    std::size_t n_points = 0;
    bool weighted = false;

    double rel_error() const;
};

/// Slope of log|E[u](z)| - log|S(z)u0| against z, weighted by the delta-method
/// variance (SE/|E u|)^2/2 when standard errors are given, ordinary least
/// squares otherwise. Throws FitError for fewer than 5 snapshots or a mean
/// within noise_sigmas standard errors of zero.
DecayReport fit_decay(const std::vector<DecaySample>& samples, const ModelParams& p, double noise_sigmas = 3.0);

/// Build fit inputs from per-snapshot ensembles (physical space) and
/// matching free-propagation references.
std::vector<DecaySample> decay_samples(const std::vector<EnsembleStats>& snapshots, const std::vector<double>& zs,
                                       const std::vector<SpectralField>& references, std::size_t probe);

struct MuExpansionReport {
    double mu = 0.0;
    cplx full;             ///< -(k^2 beta^2 l_c/8) / (1 - i mu/2)
    cplx two_term;         ///< -k^2 beta^2 l_c/8 - i mu k^2 beta^2 l_c/16
    double remainder = 0.0;
    double rel_remainder = 0.0;       ///< remainder / (k^2 beta^2 l_c/8)
    double rel_remainder_half = 0.0;  ///< same at mu/2
    double ratio = 0.0;               ///< rel_remainder / rel_remainder_half, NaN at mu = 0
    double second_to_first = 0.0;     ///< |second term| / |first term| = mu/2
    bool ratio_in_band = true;        ///< ratio in [3.5, 4.5]; only asserted for 0 < mu <= 0.2
    bool pass = true;
};

MuExpansionReport mu_expansion_check(const ModelParams& p);

enum class NoiseCoupling {
    shared_wiener,  ///< one Wiener path per sample, coarsened for every eps
    independent,    ///< fresh OU path per eps
};

struct ConvergenceOptions {
    NoiseCoupling coupling = NoiseCoupling::shared_wiener;
    double c_stab = 0.1;
    bool beta0_control = true;
    Exec exec = Exec::parallel;
    int workers = 0;
};

struct ConvergenceRow {
    double eps = 0.0;
    std::size_t n_steps = 0;
    double dz = 0.0;
    double err_mean = 0.0;          ///< ||E u - U|| / ||U||
    double err_mean_cv = 0.0;       ///< same with the pathwise limit as control variate
    double err_probe = 0.0;         ///< |E u(x0) - U(x0)| / |U(x0)| at the grid center
    double err_probe_cv = 0.0;
    double err_second_moment = 0.0; ///< ||E|u|^2 - E|u_lim|^2|| / ||E|u_lim|^2||
    double mc_se = 0.0;             ///< ||SE of E u|| / ||U||
    double mc_se_cv = 0.0;
    double err_beta0 = 0.0;         ///< beta = 0 run against S(z)u0
    double err_beta0_exact = 0.0;   ///< beta = 0 run against one exact exponential over [0, z_end]
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::size_t n_paths = 0;
    std::uint64_t master_seed = 0;
    std::size_t fine_steps = 0;     ///< Wiener path resolution in shared mode
    NoiseCoupling coupling = NoiseCoupling::shared_wiener;
    double z_end = 0.0;
    bool monotone_plain = false;
    bool monotone_cv = false;
};

/// Full-model ensembles for each eps against the delta > 0 limiting SPDE.
ConvergenceTable convergence_study(const SpectralField& u0, const ModelParams& tmpl,
                                   const std::vector<double>& eps_list, double z_end, std::size_t n_paths,
                                   std::uint64_t master_seed, const ConvergenceOptions& opt = {});

bool strictly_decreasing(const std::vector<double>& v);

/// ||a - b|| / ||b|| over the grid (discrete L2).
double relative_l2_error(const std::vector<cplx>& a, const std::vector<cplx>& b);
double relative_l2_error(const std::vector<double>& a, const std::vector<double>& b);
/// max |a - b| / max |b|.
double relative_max_error(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Ensembles of the limiting SPDE (exact scheme, one Wiener increment per
/// snapshot interval), physical-space snapshots at zs.
std::vector<EnsembleStats> spde_ensemble(const SpectralField& u0, const ModelParams& p, const std::vector<double>& zs,
                                         std::size_t n_paths, std::uint64_t master_seed, Exec exec = Exec::parallel,
                                         int workers = 0);

/// Ensembles of the full model at the snapshot zs (physical space);
/// v_hat(0) = v0_scale * u_hat(0).
std::vector<EnsembleStats> full_ensemble(const SpectralField& u0, const ModelParams& p, double z_end,
                                         const std::vector<double>& zs, std::size_t n_paths,
                                         std::uint64_t master_seed, double c_stab = 0.1, double v0_scale = 0.0,
                                         Exec exec = Exec::parallel, int workers = 0);

}  // namespace parax
