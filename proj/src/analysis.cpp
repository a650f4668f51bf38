#include "parax/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parax/errors.hpp"
#include "parax/fullmodel.hpp"
#include "parax/noise.hpp"
#include "parax/spde.hpp"

namespace parax {

double decay_constant_theory(const ModelParams& p) {
    const double strength = p.k * p.k * p.beta * p.beta * p.l_c;
    return strength / (8.0 * (1.0 + 1.0 / (4.0 * p.k * p.k * p.l_c * p.l_c)));
}

double norm_growth_rate_theory(const ModelParams& p) {
    const double strength = p.k * p.k * p.beta * p.beta * p.l_c;
    const double q = p.mu * p.mu / 4.0;
    return strength / 8.0 * q / (1.0 + q);
}

double DecayReport::rel_error() const {
    return lambda_theory == 0.0 ? std::abs(lambda_fit) : std::abs(lambda_fit - lambda_theory) / lambda_theory;
}

DecayReport fit_decay(const std::vector<DecaySample>& samples, const ModelParams& p, double noise_sigmas) {
    const std::size_t n = samples.size();
    if (n < 5) {
        std::ostringstream os;
        os << "decay fit needs at least 5 snapshots (got " << n << ")";
        throw FitError(os.str(), -1);
    }
    std::vector<double> z(n), y(n), sd(n);
    bool any_se = false;
    for (std::size_t i = 0; i < n; ++i) {
        const DecaySample& s = samples[i];
        const double m = std::abs(s.mean);
        const double r = std::abs(s.reference);
        if (!(m > noise_sigmas * s.stderr_mean) || !(m > 0.0) || !(r > 0.0) || !std::isfinite(m)) {
            std::ostringstream os;
            os << "snapshot " << i << " (z = " << s.z << "): |E u| = " << m << " is not above the noise floor "
               << noise_sigmas << " * SE = " << noise_sigmas * s.stderr_mean;
            throw FitError(os.str(), static_cast<int>(i));
        }
        z[i] = s.z;
        y[i] = std::log(m) - std::log(r);
        sd[i] = s.stderr_mean / (m * std::sqrt(2.0));
        any_se = any_se || s.stderr_mean > 0.0;
    }

    DecayReport rep;
    rep.lambda_theory = decay_constant_theory(p);
    rep.n_points = n;
    rep.z_min = *std::min_element(z.begin(), z.end());
    rep.z_max = *std::max_element(z.begin(), z.end());
    rep.weighted = any_se;

    std::vector<double> w(n, 1.0);
    if (any_se) {
        // exact points (SE = 0, e.g. z = 0) get a floor so they act as a near-constraint
        double sd_min = std::numeric_limits<double>::infinity();
        for (double s : sd)
            if (s > 0.0) sd_min = std::min(sd_min, s);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::max(sd[i], 1e-3 * sd_min);
            w[i] = 1.0 / (s * s);
        }
    }
    double sw = 0.0, swz = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        swz += w[i] * z[i];
        swy += w[i] * y[i];
    }
    const double zbar = swz / sw, ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += w[i] * (z[i] - zbar) * (z[i] - zbar);
        sxy += w[i] * (z[i] - zbar) * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) throw FitError("decay fit needs distinct snapshot z values", -1);
    const double slope = sxy / sxx;
    rep.lambda_fit = -slope;
    if (any_se) {
        rep.stderr = std::sqrt(1.0 / sxx);
    } else {
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double res = y[i] - ybar - slope * (z[i] - zbar);
            ssr += res * res;
        }
        rep.stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    }
    return rep;
}

std::vector<DecaySample> decay_samples(const std::vector<EnsembleStats>& snapshots, const std::vector<double>& zs,
                                       const std::vector<SpectralField>& references, std::size_t probe) {
    if (snapshots.size() != zs.size() || references.size() != zs.size())
        throw UsageError("decay_samples: snapshot, z and reference counts differ");
    std::vector<DecaySample> out;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (references[i].space != Space::physical) throw UsageError("decay references must be in physical space");
        DecaySample s;
        s.z = zs[i];
        s.mean = snapshots[i].mean().at(probe);
        s.stderr_mean = snapshots[i].count() > 1 ? snapshots[i].standard_error().at(probe) : 0.0;
        s.reference = references[i].data.at(probe);
        out.push_back(s);
    }
    return out;
}

MuExpansionReport mu_expansion_check(const ModelParams& p) {
    const double strength = p.k * p.k * p.beta * p.beta * p.l_c;
    auto rel_rem = [](double mu) {
        const cplx x(0.0, mu / 2.0);
        return std::abs(x * x / (1.0 - x));
    };
    MuExpansionReport r;
    r.mu = p.mu;
    r.full = -(strength / 8.0) / cplx(1.0, -p.mu / 2.0);
    r.two_term = cplx(-strength / 8.0, -p.mu * strength / 16.0);
    r.remainder = std::abs(r.full - r.two_term);
    r.rel_remainder = rel_rem(p.mu);
    r.rel_remainder_half = rel_rem(p.mu / 2.0);
    r.ratio = p.mu > 0.0 ? r.rel_remainder / r.rel_remainder_half : std::numeric_limits<double>::quiet_NaN();
    r.second_to_first = p.mu / 2.0;
    if (p.mu > 0.0 && p.mu <= 0.2) r.ratio_in_band = r.ratio >= 3.5 && r.ratio <= 4.5;
    r.pass = r.ratio_in_band && (p.mu > 0.0 || r.remainder == 0.0);
    return r;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return !v.empty();
}

double relative_l2_error(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw UsageError("relative_l2_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

double relative_l2_error(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw UsageError("relative_l2_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

double relative_max_error(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw UsageError("relative_max_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / den;
}

namespace {

double norm_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm_of(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

std::size_t smallest_5_smooth_at_least(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t f : {2, 3, 5})
            while (r % f == 0) r /= f;
        if (r == 1) return m;
    }
}

std::size_t smallest_divisor_at_least(std::size_t n, std::size_t lo) {
    for (std::size_t d = std::max<std::size_t>(lo, 1); d <= n; ++d)
        if (n % d == 0) return d;
    return n;
}

std::size_t min_steps(const ModelParams& p, double z_end, double c_stab) {
    return static_cast<std::size_t>(std::ceil(z_end / full_step_bound(p, c_stab) * (1.0 - 1e-12)));
}

}  // namespace

ConvergenceTable convergence_study(const SpectralField& u0_in, const ModelParams& tmpl,
                                   const std::vector<double>& eps_list, double z_end, std::size_t n_paths,
                                   std::uint64_t master_seed, const ConvergenceOptions& opt) {
    if (eps_list.empty()) throw DomainError("convergence study needs at least one eps");
    if (!strictly_decreasing(eps_list)) throw DomainError("eps_list must be strictly decreasing");
    if (!(tmpl.delta > 0.0)) throw DomainError("convergence study compares at fixed delta > 0");
    if (!(z_end > 0.0)) throw DomainError("z_end must be positive");
    if (n_paths < 2) throw DomainError("convergence study needs at least two paths");

    const SpectralField u0 = u0_in.space == Space::physical ? u0_in : to_physical(u0_in);
    const std::size_t ne = eps_list.size();
    std::vector<ModelParams> ps(ne);
    std::vector<std::size_t> steps(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        ps[e] = make_params(tmpl.k, tmpl.l_c, eps_list[e], tmpl.beta, tmpl.delta, tmpl.N_F);
        steps[e] = min_steps(ps[e], z_end, opt.c_stab);
    }
    std::size_t fine = 0;
    if (opt.coupling == NoiseCoupling::shared_wiener) {
        fine = smallest_5_smooth_at_least(*std::max_element(steps.begin(), steps.end()));
        for (std::size_t e = 0; e < ne; ++e) steps[e] = smallest_divisor_at_least(fine, steps[e]);
    }

    const SpdeCoefficients coeff = spde_coefficients(tmpl);
    const SpectralField free_end = free_propagate(u0, z_end, coeff.diffr);
    const SpectralField coherent = coherent_field(u0, z_end, coeff);
    const std::size_t size = u0.size();

    auto path_fn = [&](std::uint64_t path, std::vector<std::vector<cplx>>& out) {
        std::vector<double> fine_w;
        double w_shared = 0.0;
        if (opt.coupling == NoiseCoupling::shared_wiener) {
            fine_w = sample_wiener_path(fine, z_end / static_cast<double>(fine),
                                        stream_for(master_seed, path, StreamPurpose::wiener));
            for (double dw : fine_w) w_shared += dw;
        }
        for (std::size_t e = 0; e < ne; ++e) {
            const double dz = z_end / static_cast<double>(steps[e]);
            OUPath ou;
            double w;
            if (opt.coupling == NoiseCoupling::shared_wiener) {
                const auto coarse = aggregate_increments(fine_w, fine / steps[e]);
                ou = ou_path_from_increments(
                    ps[e], coarse, dz,
                    stream_for(master_seed, path, StreamPurpose::ou_given_wiener, static_cast<std::uint32_t>(e)));
                w = w_shared;
            } else {
                ou = sample_ou_path(ps[e], steps[e], dz,
                                    stream_for(master_seed, path, StreamPurpose::ou, static_cast<std::uint32_t>(e)));
                w = 0.0;
                for (double dw : ou.w_increments) w += dw;
            }
            const std::size_t last = steps[e];
            const auto states = solve_full_on_path(u0, ps[e], ou.values, dz, std::span(&last, 1),
                                                   FullRunOptions{dz, opt.c_stab, {}});
            const SpectralField u = to_physical(states[0].u_hat);
            const cplx m = pathwise_multiplier(w, z_end, coeff);
            out[e] = u.data;
            out[ne + e].resize(size);
            for (std::size_t i = 0; i < size; ++i) out[ne + e][i] = u.data[i] - m * free_end.data[i];
        }
    };
    const auto stats = run_paths(n_paths, 2 * ne, size, path_fn, opt.exec, opt.workers);

    ConvergenceTable tab;
    tab.n_paths = n_paths;
    tab.master_seed = master_seed;
    tab.fine_steps = fine;
    tab.coupling = opt.coupling;
    tab.z_end = z_end;

    const double u_norm = norm_of(coherent.data);
    const std::size_t probe = u0.grid->center_index();
    // E|u_lim|^2 = |S u0|^2 exp(2 (Re c + g^2/2) z) on every path
    std::vector<double> m2_lim(size);
    const double growth = std::exp(2.0 * coeff.norm_growth_rate() * z_end);
    for (std::size_t i = 0; i < size; ++i) m2_lim[i] = std::norm(free_end.data[i]) * growth;

    for (std::size_t e = 0; e < ne; ++e) {
        ConvergenceRow row;
        row.eps = eps_list[e];
        row.n_steps = steps[e];
        row.dz = z_end / static_cast<double>(steps[e]);
        const auto mean = stats[e].mean();
        auto mean_cv = stats[ne + e].mean();
        for (std::size_t i = 0; i < size; ++i) mean_cv[i] += coherent.data[i];
        row.err_mean = relative_l2_error(mean, coherent.data);
        row.err_mean_cv = relative_l2_error(mean_cv, coherent.data);
        row.err_probe = std::abs(mean[probe] - coherent.data[probe]) / std::abs(coherent.data[probe]);
        row.err_probe_cv = std::abs(mean_cv[probe] - coherent.data[probe]) / std::abs(coherent.data[probe]);
        row.err_second_moment = relative_l2_error(stats[e].second_moment(), m2_lim);
        row.mc_se = norm_of(stats[e].standard_error()) / u_norm;
        row.mc_se_cv = norm_of(stats[ne + e].standard_error()) / u_norm;
        tab.rows.push_back(row);
    }

    if (opt.beta0_control) {
        // beta = 0 decouples the noise, so one path is the whole ensemble
        const SpectralField u0_hat = to_spectral(u0);
        for (std::size_t e = 0; e < ne; ++e) {
            ModelParams q = ps[e];
            q.beta = 0.0;
            const double dz = tab.rows[e].dz;
            const std::vector<double> eta(steps[e] + 1, 0.0);
            const std::size_t last = steps[e];
            const auto states =
                solve_full_on_path(u0, q, eta, dz, std::span(&last, 1), FullRunOptions{dz, opt.c_stab, {}});
            const SpectralField u = to_physical(states[0].u_hat);
            tab.rows[e].err_beta0 = relative_l2_error(u.data, free_end.data);

            const ModeCoefficients base = mode_coefficients(q, 1.0);
            SpectralField exact(u0.grid, Space::spectral);
            for (std::size_t i = 0; i < size; ++i) {
                const cplx c21 = -u0.grid->kappa2(i) * base.diffraction / q.eps;
                const Mat2c m = mode_propagator(q.eps, base.damping, c21, z_end);
                exact.data[i] = m.a11 * u0_hat.data[i];
            }
            to_physical_inplace(exact);
            tab.rows[e].err_beta0_exact = relative_l2_error(u.data, exact.data);
        }
    }

    std::vector<double> plain, cv;
    for (const auto& r : tab.rows) {
        plain.push_back(r.err_mean);
        cv.push_back(r.err_mean_cv);
    }
    tab.monotone_plain = strictly_decreasing(plain);
    tab.monotone_cv = strictly_decreasing(cv);
    return tab;
}

std::vector<EnsembleStats> spde_ensemble(const SpectralField& u0_in, const ModelParams& p, const std::vector<double>& zs,
                                         std::size_t n_paths, std::uint64_t master_seed, Exec exec, int workers) {
    for (std::size_t i = 0; i < zs.size(); ++i)
        if (zs[i] < 0.0 || (i > 0 && zs[i] < zs[i - 1])) throw DomainError("snapshot z values must be ascending and >= 0");
    const SpdeCoefficients coeff = spde_coefficients(p);
    const SpectralField u0_hat = u0_in.space == Space::spectral ? u0_in : to_spectral(u0_in);
    std::vector<SpdeStepper> steppers;
    double prev = 0.0;
    for (double z : zs) {
        steppers.emplace_back(u0_hat.grid, z - prev, coeff);
        prev = z;
    }
    auto path_fn = [&](std::uint64_t path, std::vector<std::vector<cplx>>& out) {
        NormalStream rng(stream_for(master_seed, path, StreamPurpose::wiener));
        SpectralField f = u0_hat;
        for (std::size_t j = 0; j < steppers.size(); ++j) {
            const double dW = std::sqrt(steppers[j].dz()) * rng.next();
            steppers[j].step(f, dW);
            out[j] = to_physical(f).data;
        }
    };
    return run_paths(n_paths, zs.size(), u0_hat.size(), path_fn, exec, workers);
}

std::vector<EnsembleStats> full_ensemble(const SpectralField& u0, const ModelParams& p, double z_end,
                                         const std::vector<double>& zs, std::size_t n_paths,
                                         std::uint64_t master_seed, double c_stab, double v0_scale, Exec exec,
                                         int workers) {
    const std::size_t n = full_step_count(p, z_end, zs, c_stab);
    const double dz = z_end / static_cast<double>(n);
    FullRunOptions opt{dz, c_stab, {}};
    if (v0_scale != 0.0) {
        SpectralField v0 = u0.space == Space::spectral ? u0 : to_spectral(u0);
        for (auto& v : v0.data) v *= v0_scale;
        opt.v0 = std::move(v0);
    }
    (void)FullStepper(p, u0.grid, dz, c_stab);  // surface stability errors before fanning out
    auto path_fn = [&](std::uint64_t path, std::vector<std::vector<cplx>>& out) {
        const auto traj = solve_full(u0, p, z_end, stream_for(master_seed, path, StreamPurpose::ou), zs, opt);
        for (std::size_t j = 0; j < zs.size(); ++j) out[j] = to_physical(traj.snapshots[j].u_hat).data;
    };
    return run_paths(n_paths, zs.size(), u0.size(), path_fn, exec, workers);
}

}  // namespace parax
