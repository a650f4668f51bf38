#include "parax/homog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <omp.h>

#include "parax/errors.hpp"
#include "parax/rng.hpp"
#include "parax/spde.hpp"

namespace parax {

namespace {

void require_damping(double delta, const char* what) {
    if (!(delta > 0.0)) {
        std::ostringstream os;
        os << what << " needs delta > 0 (got " << delta
           << "): without damping the fast (v, eta) subsystem has no integrable stationary density "
              "and the covariance entries diverge like 1/delta";
        throw DomainError(os.str());
    }
}

Eigen::Matrix3d to_eigen(const Mat3& m) {
    Eigen::Matrix3d e;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) e(i, j) = m[i][j];
    return e;
}

// Independent entries of a symmetric 3x3 matrix, in CovEntry order.
constexpr int kRow[6] = {0, 0, 1, 0, 1, 2};
constexpr int kCol[6] = {0, 1, 1, 2, 2, 2};

double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Numerator of vRvR shared by vRvR and delta*vRvR.
double vRvR_numerator(double k, double beta, double l_c, double delta, double uR, double uI) {
    return k * k * beta * beta *
           (uR * uR / l_c + 4.0 * delta * k * uR * uI / l_c +
            (1.0 / l_c + 8.0 * delta * k * k * (1.0 + delta / l_c)) * uI * uI);
}

double e_factor(double k, double l_c, double delta) {
    const double g = 1.0 + delta / l_c;
    return 1.0 / (l_c * l_c) + 4.0 * k * k * g * g;
}

}  // namespace

GammaSystem build_gamma(const ModelParams& p, double uR, double uI) {
    require_damping(p.delta, "build_gamma");
    const double k = p.k, d = p.delta, b = p.beta;
    const double den = 4.0 * d * d * k * k + 1.0;
    GammaSystem gs;
    gs.uR = uR;
    gs.uI = uI;
    gs.gamma[0] = {4.0 * d * k * k / den, -2.0 * k / den, (k * k * b * uR + 2.0 * d * k * k * k * b * uI) / den};
    gs.gamma[1] = {2.0 * k / den, 4.0 * d * k * k / den, (-2.0 * d * k * k * k * b * uR + k * k * b * uI) / den};
    gs.gamma[2] = {0.0, 0.0, 1.0 / p.l_c};
    gs.d_vec = {0.0, 0.0, 1.0 / std::sqrt(p.l_c)};
    return gs;
}

std::array<cplx, 3> gamma_eigenvalues_theory(const ModelParams& p) {
    const double k = p.k, d = p.delta;
    const double den = 4.0 * d * d * k * k + 1.0;
    const double re = 4.0 * d * k * k / den;
    const double im = 2.0 * k / den;
    return {cplx(re, im), cplx(re, -im), cplx(1.0 / p.l_c, 0.0)};
}

std::array<cplx, 3> gamma_eigenvalues_numeric(const GammaSystem& gs) {
    Eigen::EigenSolver<Eigen::Matrix3d> es(to_eigen(gs.gamma), false);
    std::array<cplx, 3> ev{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.imag() > b.imag(); });
    // sorted by imaginary part: (+, 0, -) -> (+, -, 0)
    return {ev[0], ev[2], ev[1]};
}

const char* to_string(CovEntry e) {
    switch (e) {
        case CovEntry::vRvR: return "vRvR";
        case CovEntry::vRvI: return "vRvI";
        case CovEntry::vIvI: return "vIvI";
        case CovEntry::vReta: return "vReta";
        case CovEntry::vIeta: return "vIeta";
        case CovEntry::etaeta: return "etaeta";
    }
    return "?";
}

double StationaryCovariance::get(CovEntry e) const {
    return const_cast<StationaryCovariance*>(this)->get(e);
}

double& StationaryCovariance::get(CovEntry e) {
    switch (e) {
        case CovEntry::vRvR: return vRvR;
        case CovEntry::vRvI: return vRvI;
        case CovEntry::vIvI: return vIvI;
        case CovEntry::vReta: return vReta;
        case CovEntry::vIeta: return vIeta;
        case CovEntry::etaeta: return etaeta;
    }
    throw UsageError("bad covariance entry");
}

Mat3 StationaryCovariance::matrix() const {
    Mat3 m{};
    for (int u = 0; u < 6; ++u) {
        const double v = get(kCovEntries[u]);
        m[kRow[u]][kCol[u]] = v;
        m[kCol[u]][kRow[u]] = v;
    }
    return m;
}

StationaryCovariance stationary_covariance_numeric(const GammaSystem& gs) {
    const auto ev = gamma_eigenvalues_numeric(gs);
    for (const cplx& l : ev) {
        if (!(l.real() > 0.0)) {
            std::ostringstream os;
            os << "drift matrix is not Hurwitz: eigenvalue " << l.real() << (l.imag() < 0 ? " - " : " + ")
               << std::abs(l.imag()) << "i has non-positive real part";
            throw SpectralError(os.str());
        }
    }
    const Eigen::Matrix3d g = to_eigen(gs.gamma);
    Eigen::Matrix<double, 6, 6> a;
    for (int u = 0; u < 6; ++u) {
        Eigen::Matrix3d basis = Eigen::Matrix3d::Zero();
        basis(kRow[u], kCol[u]) = 1.0;
        basis(kCol[u], kRow[u]) = 1.0;
        const Eigen::Matrix3d img = g * basis + basis * g.transpose();
        for (int r = 0; r < 6; ++r) a(r, u) = img(kRow[r], kCol[r]);
    }
    Eigen::Matrix<double, 6, 1> rhs;
    for (int r = 0; r < 6; ++r) rhs(r) = gs.d_vec[kRow[r]] * gs.d_vec[kCol[r]];
    const Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(a);
    Eigen::Matrix<double, 6, 1> x = lu.solve(rhs);
    x += lu.solve(rhs - a * x);  // one step of iterative refinement
    StationaryCovariance s;
    for (int u = 0; u < 6; ++u) s.get(kCovEntries[u]) = x(u);
    return s;
}

StationaryCovariance stationary_covariance_closed_form(const ModelParams& p, double uR, double uI) {
    require_damping(p.delta, "closed-form covariance");
    const double k = p.k, b = p.beta, lc = p.l_c, d = p.delta;
    const double g = 1.0 + d / lc;
    const double e = e_factor(k, lc, d);
    StationaryCovariance s;
    s.vRvR = vRvR_numerator(k, b, lc, d, uR, uI) / (16.0 * d * e);
    s.vIvI = k * k * b * b *
             (uI * uI / lc - 4.0 * d * k * uR * uI / lc + (1.0 / lc + 8.0 * d * k * k * g) * uR * uR) /
             (16.0 * d * e);
    s.vRvI = k * k * k * b * b * (uI * uI / lc - 4.0 * k * uR * uI * g - uR * uR / lc) / (8.0 * e);
    s.vReta = -k * k * b * (2.0 * k * uI * g + uR / lc) / (2.0 * e);
    s.vIeta = k * k * b * (2.0 * k * uR * g - uI / lc) / (2.0 * e);
    s.etaeta = 0.5;
    return s;
}

double scaled_vRvR(const ModelParams& p, double uR, double uI) {
    if (p.delta < 0.0) throw DomainError("scaled_vRvR needs delta >= 0");
    return vRvR_numerator(p.k, p.beta, p.l_c, p.delta, uR, uI) / (16.0 * e_factor(p.k, p.l_c, p.delta));
}

double lyapunov_residual(const GammaSystem& gs, const StationaryCovariance& s) {
    const Eigen::Matrix3d g = to_eigen(gs.gamma);
    const Eigen::Matrix3d sig = to_eigen(s.matrix());
    Eigen::Vector3d d(gs.d_vec[0], gs.d_vec[1], gs.d_vec[2]);
    const Eigen::Matrix3d ddt = d * d.transpose();
    return (g * sig + sig * g.transpose() - ddt).norm() / (2.0 * g.norm() * sig.norm() + ddt.norm());
}

double min_covariance_eigenvalue(const StationaryCovariance& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(to_eigen(s.matrix()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

std::vector<CovTuple> default_verification_grid(std::size_t n, std::uint64_t seed) {
    NormalStream rng(stream_for(seed, 0, StreamPurpose::generic));
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    std::vector<CovTuple> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        CovTuple t;
        t.k = uni(0.5, 5.0);
        t.beta = uni(0.0, 2.0);
        t.l_c = uni(0.2, 5.0);
        t.delta = std::pow(10.0, uni(-3.0, 0.0));
        t.uR = uni(-2.0, 2.0);
        t.uI = uni(-2.0, 2.0);
        out.push_back(t);
    }
    return out;
}

namespace {

struct TupleResult {
    std::array<double, 6> rel{};
    double eig_err = 0.0;
    double residual = 0.0;
    double min_eig = 0.0;
    double etaeta_dev = 0.0;
};

TupleResult check_tuple(const CovTuple& t, const ClosedFormFn& closed_form) {
    const ModelParams p = make_params(t.k, t.l_c, 0.1, t.beta, t.delta, 1.0);
    const GammaSystem gs = build_gamma(p, t.uR, t.uI);
    const StationaryCovariance num = stationary_covariance_numeric(gs);
    const StationaryCovariance cf =
        closed_form ? closed_form(p, t.uR, t.uI) : stationary_covariance_closed_form(p, t.uR, t.uI);
    TupleResult r;
    for (int u = 0; u < 6; ++u) r.rel[u] = rel_err(cf.get(kCovEntries[u]), num.get(kCovEntries[u]));
    const auto et = gamma_eigenvalues_theory(p);
    const auto en = gamma_eigenvalues_numeric(gs);
    for (int i = 0; i < 3; ++i) r.eig_err = std::max(r.eig_err, std::abs(et[i] - en[i]));
    r.residual = lyapunov_residual(gs, num);
    r.min_eig = min_covariance_eigenvalue(num);
    r.etaeta_dev = std::abs(cf.etaeta - 0.5);
    return r;
}

}  // namespace

AppendixReport verify_appendix_a(const std::vector<CovTuple>& tuples, const ClosedFormFn& closed_form,
                                 double tolerance, Exec exec, int workers) {
    std::vector<TupleResult> results(tuples.size());
    const auto n = static_cast<std::ptrdiff_t>(tuples.size());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) results[i] = check_tuple(tuples[i], closed_form);
    } else {
        const int nt = workers > 0 ? workers : omp_get_max_threads();
        std::exception_ptr err;
#pragma omp parallel for num_threads(nt) schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                results[i] = check_tuple(tuples[i], closed_form);
            } catch (...) {
#pragma omp critical(parax_verify_err)
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    }

    AppendixReport rep;
    rep.n_tuples = tuples.size();
    rep.tolerance = tolerance;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const TupleResult& r = results[i];
        for (int u = 0; u < 6; ++u) {
            if (r.rel[u] > rep.entries[u].max_rel_err) rep.entries[u] = {r.rel[u], i};
        }
        rep.max_eig_err = std::max(rep.max_eig_err, r.eig_err);
        rep.max_residual = std::max(rep.max_residual, r.residual);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, r.min_eig);
        rep.max_etaeta_dev = std::max(rep.max_etaeta_dev, r.etaeta_dev);
    }
    for (int u = 0; u < 6; ++u) {
        if (rep.entries[u].max_rel_err > rep.max_rel_err) {
            rep.max_rel_err = rep.entries[u].max_rel_err;
            rep.worst_entry = kCovEntries[u];
        }
        if (!(rep.entries[u].max_rel_err <= tolerance)) rep.failing_entries.push_back(to_string(kCovEntries[u]));
    }
    if (rep.max_etaeta_dev != 0.0 &&
        std::find(rep.failing_entries.begin(), rep.failing_entries.end(), "etaeta") == rep.failing_entries.end())
        rep.failing_entries.push_back("etaeta");
    rep.pass = !tuples.empty() && rep.failing_entries.empty();
    return rep;
}

NoncommutativityReport limit_noncommutativity_demo(const ModelParams& p, double uR, double uI,
                                                   std::vector<double> deltas) {
    if (deltas.empty()) deltas = {1e-1, 1e-2, 1e-3, 1e-4};
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw DomainError("delta sweep values must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1])) throw DomainError("delta sweep must be strictly decreasing");
    }
    NoncommutativityReport rep;
    ModelParams q = p;
    q.delta = 0.0;
    rep.c0 = spde_coefficients(q).c_drift;
    rep.limit_delta_vRvR = scaled_vRvR(q, uR, uI);
    const double strength = p.k * p.k * p.beta * p.beta * p.l_c;
    rep.K_bound = strength / (8.0 * p.l_c * std::norm(cplx(1.0, -1.0 / (2.0 * p.k * p.l_c))));

    for (std::size_t i = 0; i < deltas.size(); ++i) {
        q.delta = deltas[i];
        NoncommutativityRow row;
        row.delta = deltas[i];
        row.delta_vRvR = scaled_vRvR(q, uR, uI);
        row.vRvR = stationary_covariance_closed_form(q, uR, uI).vRvR;
        row.diff_from_prev = i == 0 ? std::numeric_limits<double>::quiet_NaN()
                                    : std::abs(row.delta_vRvR - rep.rows.back().delta_vRvR);
        row.c_delta = spde_coefficients(q).c_drift;
        row.c_gap = std::abs(row.c_delta - rep.c0);
        rep.K = std::max(rep.K, row.c_gap / row.delta);
        rep.rows.push_back(row);
    }
    rep.differences_decrease = rep.rows.size() >= 3;
    for (std::size_t i = 2; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].diff_from_prev < rep.rows[i - 1].diff_from_prev)) rep.differences_decrease = false;
    rep.K_finite = std::isfinite(rep.K) && rep.K <= rep.K_bound * (1.0 + 1e-12);
    rep.pass = rep.differences_decrease && rep.K_finite && std::isfinite(rep.limit_delta_vRvR) &&
               rep.limit_delta_vRvR > 0.0;
    return rep;
}

}  // namespace parax
