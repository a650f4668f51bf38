#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "parax/rng.hpp"
#include "parax/scales.hpp"

namespace parax {

/// Stationary OU sample path eta(z_n), z_n = n*z_step, n = 0..n_steps,
/// together with the increments W(z_{n+1}) - W(z_n) of the Wiener process
/// that drives it, d eta = -eta/(eps^2 l_c) dz + dW/(eps sqrt(l_c)).
struct OUPath {
    double z_step = 0.0;
    std::vector<double> values;        ///< n_steps + 1 samples, values[0] ~ N(0, 1/2)
    std::vector<double> w_increments;  ///< n_steps increments, each ~ N(0, z_step)
    StreamId seed;

    std::size_t n_steps() const { return w_increments.size(); }
};

/// Exact one-step transition law of (eta_{n+1}, dW_n) given eta_n over a step h.
///
/// eta_{n+1} = a eta_n + I with I ~ N(0, s^2), dW ~ N(0, h) and
/// Cov(I, dW) = eps sqrt(l_c) (1 - a).
struct OUTransition {
    double h = 0.0;
    double a = 0.0;           ///< exp(-h/(eps^2 l_c))
    double s = 0.0;           ///< sqrt((1 - a^2)/2)
    double cov = 0.0;         ///< Cov(I, dW)
    double w_given_i = 0.0;   ///< E[dW | I] = w_given_i * I
    double w_cond_sd = 0.0;   ///< sd(dW | I)
    double i_given_w = 0.0;   ///< E[I | dW] = i_given_w * dW
    double i_cond_sd = 0.0;   ///< sd(I | dW)
};

OUTransition ou_transition(const ModelParams& p, double z_step);

/// (1/2) exp(-lag/(eps^2 l_c)).
double ou_autocovariance_theory(double lag, const ModelParams& p);

/// Exact-in-law path: eta first from the OU innovation, then the Wiener
/// increment from its conditional law. Deterministic for fixed seed.
OUPath sample_ou_path(const ModelParams& p, std::size_t n_steps, double z_step, StreamId seed);

/// Same joint law, Wiener increments given. Used when several models must
/// be driven by one Wiener path (e.g. different eps on nested grids).
OUPath ou_path_from_increments(const ModelParams& p, std::span<const double> w_increments, double z_step,
                               StreamId seed);

/// i.i.d. N(0, z_step) increments.
std::vector<double> sample_wiener_path(std::size_t n_steps, double z_step, StreamId seed);

/// Sum consecutive groups of `factor` increments (coarsen a Wiener path).
std::vector<double> aggregate_increments(std::span<const double> fine, std::size_t factor);

/// Biased (1/N) sample autocovariance at lags 0..max_lag, after removing the
/// known mean zero.
std::vector<double> sample_autocovariance(std::span<const double> values, std::size_t max_lag);

/// Bartlett standard error of the lag-m sample autocovariance of a Gaussian
/// AR(1) series with coefficient a and marginal variance var, length n.
double ar1_autocovariance_stderr(double a, double var, std::size_t lag, std::size_t n);

}  // namespace parax
