#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "parax/exec.hpp"
#include "parax/grid.hpp"
#include "parax/scales.hpp"

namespace parax {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Linear fast subsystem d(vR, vI, eta) = -gamma (vR, vI, eta) dz + d_vec dW
/// with (uR, uI) frozen.
struct GammaSystem {
    Mat3 gamma{};
    std::array<double, 3> d_vec{};
    double uR = 0.0;
    double uI = 0.0;
};

GammaSystem build_gamma(const ModelParams& p, double uR, double uI);

/// lambda_{1,2} = (4 delta k^2 +- 2k i)/(4 delta^2 k^2 + 1), lambda_3 = 1/l_c,
/// ordered (lambda_1 with positive imaginary part, lambda_2, lambda_3).
std::array<cplx, 3> gamma_eigenvalues_theory(const ModelParams& p);
/// Dense eigensolve, same ordering as the theory values.
std::array<cplx, 3> gamma_eigenvalues_numeric(const GammaSystem& gs);

enum class CovEntry { vRvR, vRvI, vIvI, vReta, vIeta, etaeta };
inline constexpr std::array<CovEntry, 6> kCovEntries{CovEntry::vRvR,  CovEntry::vRvI,  CovEntry::vIvI,
                                                     CovEntry::vReta, CovEntry::vIeta, CovEntry::etaeta};
const char* to_string(CovEntry e);

struct StationaryCovariance {
    double vRvR = 0.0, vRvI = 0.0, vIvI = 0.0, vReta = 0.0, vIeta = 0.0, etaeta = 0.0;

    double get(CovEntry e) const;
    double& get(CovEntry e);
    Mat3 matrix() const;
};

/// Solve gamma S + S gamma^T = d d^T for the six independent entries.
/// Throws SpectralError if gamma has an eigenvalue with Re <= 0.
StationaryCovariance stationary_covariance_numeric(const GammaSystem& gs);

/// Closed-form entries as functions of (k, beta, l_c, delta, uR, uI).
StationaryCovariance stationary_covariance_closed_form(const ModelParams& p, double uR, double uI);

/// delta * vRvR written without the 1/delta factor; finite at delta = 0.
double scaled_vRvR(const ModelParams& p, double uR, double uI);

/// Normwise backward error ||gamma S + S gamma^T - d d^T||_F / (2 ||gamma||_F ||S||_F + ||d d^T||_F).
double lyapunov_residual(const GammaSystem& gs, const StationaryCovariance& s);
/// Smallest eigenvalue of the symmetric 3x3 covariance matrix.
double min_covariance_eigenvalue(const StationaryCovariance& s);

struct CovTuple {
    double k, beta, l_c, delta, uR, uI;
};

/// Uniform random tuples over k in [0.5,5], beta in [0,2], l_c in [0.2,5],
/// delta log-uniform in [1e-3,1], (uR,uI) in [-2,2]^2.
std::vector<CovTuple> default_verification_grid(std::size_t n, std::uint64_t seed);

using ClosedFormFn = std::function<StationaryCovariance(const ModelParams&, double, double)>;

struct EntryError {
    double max_rel_err = 0.0;
    std::size_t worst_tuple = 0;
};

struct AppendixReport {
    std::size_t n_tuples = 0;
    std::array<EntryError, 6> entries{};    ///< indexed like kCovEntries
    double max_rel_err = 0.0;
    CovEntry worst_entry = CovEntry::vRvR;
    double max_eig_err = 0.0;
    double max_residual = 0.0;
    double min_eigenvalue = 0.0;
    double max_etaeta_dev = 0.0;            ///< max |closed-form etaeta - 1/2|
    double tolerance = 1e-10;
    std::vector<std::string> failing_entries;
    bool pass = false;
};

/// Compare closed form against the Lyapunov solve on every tuple. Relative
/// error per entry is |a-b|/max(|a|,|b|) (0 when both vanish).
AppendixReport verify_appendix_a(const std::vector<CovTuple>& tuples, const ClosedFormFn& closed_form = {},
                                 double tolerance = 1e-10, Exec exec = Exec::parallel, int workers = 0);

struct NoncommutativityRow {
    double delta;
    double vRvR;             ///< grows like 1/delta
    double delta_vRvR;       ///< delta * vRvR(delta)
    double diff_from_prev;   ///< |delta_vRvR - previous row's|, NaN for the first row
    cplx c_delta;
    double c_gap;            ///< |c(delta) - c(0)|
};

struct NoncommutativityReport {
    std::vector<NoncommutativityRow> rows;
    double limit_delta_vRvR = 0.0;  ///< closed-form delta*vRvR at delta = 0
    cplx c0;
    double K = 0.0;                 ///< max |c(delta) - c(0)| / delta over the sweep
    double K_bound = 0.0;           ///< |dc/d delta| at delta = 0
    bool differences_decrease = false;
    bool K_finite = false;
    bool pass = false;
};

/// Sweep delta (default 1e-1 ... 1e-4) at the other parameters of p.
NoncommutativityReport limit_noncommutativity_demo(const ModelParams& p, double uR, double uI,
                                                   std::vector<double> deltas = {});

}  // namespace parax
