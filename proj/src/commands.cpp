#include "parax/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>

#include "parax/analysis.hpp"
#include "parax/errors.hpp"
#include "parax/fullmodel.hpp"
#include "parax/homog.hpp"
#include "parax/io.hpp"
#include "parax/noise.hpp"
#include "parax/spde.hpp"
#include "parax/version.hpp"

namespace parax {

using nlohmann::json;

bool CommandResult::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<std::string> CommandResult::failures() const {
    std::vector<std::string> f;
    for (const auto& c : checks)
        if (!c.pass) f.push_back(c.name);
    return f;
}

namespace {

namespace fs = std::filesystem;

struct Context {
    const CommandOptions& opt;
    RunConfig cfg;
    ModelParams p;
    std::string name;
    CommandResult result;

    std::string file(const std::string& leaf) const { return (fs::path(opt.out_dir) / leaf).string(); }

    std::uint64_t seed() const {
        if (opt.seed) return *opt.seed;
        if (cfg.run.master_seed) return *cfg.run.master_seed;
        throw UsageError(name + " needs a master seed: pass --seed or set [run] master_seed");
    }

    void check(const std::string& what, bool pass, double value, double tol) {
        result.checks.push_back({what, pass, value, tol});
    }
    // value <= tol
    void check_le(const std::string& what, double value, double tol) { check(what, value <= tol, value, tol); }
};

json params_json(const ModelParams& p) {
    return {{"k", p.k}, {"l_c", p.l_c}, {"eps", p.eps}, {"beta", p.beta},
            {"delta", p.delta}, {"N_F", p.N_F}, {"mu", p.mu}};
}

json regime_json(const ModelParams& p, const RegimeThresholds& t) {
    const RegimeReport r = regime_report(p, t);
    return {{"paraxial_ok", r.paraxial_ok}, {"fresnel_ok", r.fresnel_ok}, {"regime", to_string(r.regime)},
            {"warnings", r.warnings}};
}

std::string snap_name(const char* stem, std::size_t j) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%02zu.fld", stem, j);
    return buf;
}

SpectralField initial_beam(const Context& c, const GridPtr& g) {
    return gaussian_beam(g, c.cfg.grid.beam_width, c.cfg.grid.amplitude);
}

// ---------------------------------------------------------------- validate-noise

void cmd_validate_noise(Context& c) {
    const ModelParams& p = c.p;
    OUPath path;
    if (!c.opt.ou_path_file.empty()) {
        path = read_ou_path(c.opt.ou_path_file);
        c.result.manifest["ou_path_file"] = c.opt.ou_path_file;
    } else {
        const double dz = c.cfg.noise.dz_factor * p.correlation_length();
        path = sample_ou_path(p, c.cfg.noise.n_steps, dz, stream_for(c.seed(), 0, StreamPurpose::ou));
        c.result.manifest["master_seed"] = c.seed();
        if (c.cfg.noise.dump_path) write_ou_path(c.file("ou_path.oup"), path);
    }
    const double dz = path.z_step;
    const double corr = p.correlation_length();
    const auto max_lag = static_cast<std::size_t>(std::llround(c.cfg.noise.max_corr_lengths * corr / dz));
    const auto acov = sample_autocovariance(path.values, max_lag);
    const double a = std::exp(-dz / corr);
    const double sig = c.cfg.noise.sigmas;

    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    std::vector<double> lx, ls, lt;
    for (std::size_t m = 0; m <= max_lag; ++m) {
        const double theory = ou_autocovariance_theory(static_cast<double>(m) * dz, p);
        const double se = ar1_autocovariance_stderr(a, 0.5, m, path.values.size());
        worst = std::max(worst, std::abs(acov[m] - theory) / se);
        rows.push_back({static_cast<double>(m), static_cast<double>(m) * dz, acov[m], theory, se});
        lx.push_back(static_cast<double>(m) * dz);
        ls.push_back(acov[m]);
        lt.push_back(theory);
    }
    write_csv(c.file("autocovariance.csv"), {"lag", "lag_z", "sample", "theory", "stderr"}, rows);
    write_svg_plot(c.file("autocovariance.svg"),
                   {"OU autocovariance", "lag (z units)", "covariance", false, false},
                   {{"sample", lx, ls, false}, {"theory", lx, lt, true}});

    // decay length from a log-linear fit over lags with covariance clearly above noise
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t m = 1; m <= max_lag; ++m) {
        if (!(acov[m] > sig * rows[m][4])) break;
        const double x = rows[m][1], y = std::log(acov[m]);
        sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
    }
    double fitted = std::numeric_limits<double>::quiet_NaN();
    if (n >= 2) fitted = -1.0 / ((n * sxy - sx * sy) / (n * sxx - sx * sx));

    c.result.manifest["n_steps"] = path.n_steps();
    c.result.manifest["z_step"] = dz;
    c.result.manifest["max_lag"] = max_lag;
    c.result.manifest["correlation_length_theory"] = corr;
    c.result.manifest["correlation_length_fit"] = fitted;
    c.check_le("autocovariance_within_band", worst, sig);
    c.check_le("lag0_variance", std::abs(acov[0] - 0.5) / rows[0][4], sig);
}

// ---------------------------------------------------------------- verify-covariance

void cmd_verify_covariance(Context& c) {
    const ModelParams& p = c.p;
    const auto& cs = c.cfg.covariance;
    // refuses delta <= 0 before any work
    const GammaSystem gs = build_gamma(p, cs.uR, cs.uI);
    const StationaryCovariance num = stationary_covariance_numeric(gs);
    const StationaryCovariance cf = stationary_covariance_closed_form(p, cs.uR, cs.uI);
    double point_err = 0.0;
    json point;
    for (CovEntry e : kCovEntries) {
        const double a = cf.get(e), b = num.get(e);
        const double scale = std::max(std::abs(a), std::abs(b));
        point_err = std::max(point_err, scale == 0.0 ? 0.0 : std::abs(a - b) / scale);
        point[to_string(e)] = {{"closed_form", a}, {"numeric", b}};
    }

    const auto tuples = default_verification_grid(cs.n_tuples, cs.grid_seed);
    const auto t0 = std::chrono::steady_clock::now();
    const AppendixReport rep = verify_appendix_a(tuples, {}, cs.tolerance, Exec::parallel, c.opt.workers);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const NoncommutativityReport demo = limit_noncommutativity_demo(p, cs.uR, cs.uI, cs.deltas);

    json entries;
    for (std::size_t u = 0; u < kCovEntries.size(); ++u)
        entries[to_string(kCovEntries[u])] = {{"max_rel_err", rep.entries[u].max_rel_err},
                                              {"worst_tuple", rep.entries[u].worst_tuple}};
    json report = {{"n_tuples", rep.n_tuples},
                   {"grid", {{"k", {0.5, 5.0}}, {"beta", {0.0, 2.0}}, {"l_c", {0.2, 5.0}},
                             {"delta", {1e-3, 1.0}}, {"delta_sampling", "log-uniform"}, {"u", {-2.0, 2.0}},
                             {"seed", cs.grid_seed}}},
                   {"entries", entries},
                   {"max_rel_err", rep.max_rel_err},
                   {"worst_entry", to_string(rep.worst_entry)},
                   {"max_eigenvalue_err", rep.max_eig_err},
                   {"max_lyapunov_residual", rep.max_residual},
                   {"min_covariance_eigenvalue", rep.min_eigenvalue},
                   {"etaeta_max_deviation", rep.max_etaeta_dev},
                   {"tolerance", rep.tolerance},
                   {"failing_entries", rep.failing_entries},
                   {"seconds", secs},
                   {"result", rep.pass ? "PASS" : "FAIL"},
                   {"point_check", point}};
    json demo_rows = json::array();
    std::vector<std::vector<double>> rows;
    for (const auto& r : demo.rows) {
        demo_rows.push_back({{"delta", r.delta}, {"vRvR", r.vRvR}, {"delta_vRvR", r.delta_vRvR},
                             {"c_re", r.c_delta.real()}, {"c_im", r.c_delta.imag()}, {"c_gap", r.c_gap}});
        rows.push_back({r.delta, r.vRvR, r.delta_vRvR, std::isnan(r.diff_from_prev) ? 0.0 : r.diff_from_prev,
                        r.c_delta.real(), r.c_delta.imag(), r.c_gap});
    }
    report["noncommutativity"] = {{"rows", demo_rows},
                                  {"limit_delta_vRvR", demo.limit_delta_vRvR},
                                  {"c0", {demo.c0.real(), demo.c0.imag()}},
                                  {"K", demo.K},
                                  {"K_bound", demo.K_bound},
                                  {"differences_decrease", demo.differences_decrease},
                                  {"result", demo.pass ? "PASS" : "FAIL"}};
    write_json(c.file("covariance_report.json"), report);
    write_csv(c.file("noncommutativity.csv"),
              {"delta", "vRvR", "delta_vRvR", "diff_from_prev", "c_re", "c_im", "c_gap"}, rows);

    c.result.manifest["report"] = "covariance_report.json";
    c.check_le("appendix_a_max_rel_err", rep.max_rel_err, cs.tolerance);
    c.check_le("etaeta_exact", rep.max_etaeta_dev, 0.0);
    c.check_le("eigenvalues", rep.max_eig_err, 1e-12);
    c.check_le("lyapunov_residual", rep.max_residual, 1e-12);
    c.check("covariance_psd", rep.min_eigenvalue >= -1e-12, rep.min_eigenvalue, -1e-12);
    c.check_le("point_check", point_err, cs.tolerance);
    c.check("noncommuting_limits", demo.pass, demo.K, demo.K_bound);
}

// ---------------------------------------------------------------- run-spde

void cmd_run_spde(Context& c) {
    const ModelParams& p = c.p;
    const SpdeCoefficients coeff = spde_coefficients(p);
    const GridPtr g = make_grid(c.cfg.grid.n, c.cfg.grid.extent);
    const SpectralField u0 = initial_beam(c, g);
    const auto zs = c.cfg.run.snapshot_list();
    const std::uint64_t seed = c.seed();
    const auto ens = spde_ensemble(u0, p, zs, c.cfg.run.n_paths, seed, Exec::parallel, c.opt.workers);

    const std::size_t probe = g->center_index();
    std::vector<std::vector<double>> rows;
    double worst_sigma = 0.0, worst_exact = 0.0;
    for (std::size_t j = 0; j < zs.size(); ++j) {
        const auto mean = ens[j].mean();
        const auto m2 = ens[j].second_moment();
        const double se = ens[j].count() > 1 ? ens[j].standard_error()[probe] : 0.0;
        const SpectralField U = coherent_field(u0, zs[j], coeff);
        write_field(c.file(snap_name("mean", j)), SpectralField(g, mean, Space::physical), zs[j]);
        std::vector<cplx> m2c(m2.begin(), m2.end());
        write_field(c.file(snap_name("second_moment", j)), SpectralField(g, m2c, Space::physical), zs[j]);
        const double dev = std::abs(mean[probe] - U.data[probe]);
        if (se > 0.0) worst_sigma = std::max(worst_sigma, dev / se);
        else worst_exact = std::max(worst_exact, dev / std::abs(U.data[probe]));
        rows.push_back({zs[j], mean[probe].real(), mean[probe].imag(), std::abs(mean[probe]),
                        std::abs(U.data[probe]), se, m2[probe]});
    }
    write_csv(c.file("probe.csv"), {"z", "mean_re", "mean_im", "mean_abs", "coherent_abs", "stderr", "second_moment"},
              rows);
    c.check_le("coherent_field_sigmas", worst_sigma, 3.0);
    c.check_le("coherent_field_exact", worst_exact, 1e-12);

    // path 0 through the same stepping as the ensemble
    const SpectralField u0_hat = to_spectral(u0);
    NormalStream rng(stream_for(seed, 0, StreamPurpose::wiener));
    SpectralField f = u0_hat;
    double prev = 0.0, w = 0.0, norm_dev = 0.0, mode_dev = 0.0;
    const double ref_norm0 = std::sqrt(l2_norm_sq(u0_hat));
    double peak0 = 0.0;
    for (const auto& v : u0_hat.data) peak0 = std::max(peak0, std::abs(v));
    for (double z : zs) {
        const double dW = std::sqrt(z - prev) * rng.next();
        SpdeStepper(g, z - prev, coeff).step(f, dW);
        w += dW;
        prev = z;
        const double ratio = std::sqrt(l2_norm_sq(f)) / ref_norm0;  // S(z) is unitary
        norm_dev = std::max(norm_dev, std::abs(ratio / std::exp(coeff.norm_growth_rate() * z) - 1.0));
        if (p.beta == 0.0)
            for (std::size_t i = 0; i < f.data.size(); ++i)
                mode_dev = std::max(mode_dev, std::abs(std::abs(f.data[i]) - std::abs(u0_hat.data[i])) / peak0);
    }
    c.check_le("second_moment_law", norm_dev, 1e-10);
    if (p.beta == 0.0) c.check_le("mode_magnitudes_conserved", mode_dev, 1e-12);

    if (c.opt.oracle_check) {
        const std::size_t steps = 1000;
        const double z_end = zs.back() > 0.0 ? zs.back() : c.cfg.run.z_end;
        const double dz = z_end / static_cast<double>(steps);
        const auto dws = sample_wiener_path(steps, dz, stream_for(seed, 0, StreamPurpose::generic));
        const SpdeStepper st(g, dz, coeff);
        SpectralField h = u0_hat;
        for (double dW : dws) st.step(h, dW);
        const SpectralField ref = closed_form_solution(u0_hat, dws, z_end, coeff);
        const double err = relative_max_error(to_physical(h).data, to_physical(ref).data);
        c.result.manifest["oracle_check"] = {{"steps", steps}, {"max_rel_err", err}};
        c.check_le("oracle_check", err, 1e-10);
    }

    c.result.manifest["master_seed"] = seed;
    c.result.manifest["n_paths"] = c.cfg.run.n_paths;
    c.result.manifest["snapshots"] = zs;
    c.result.manifest["coefficients"] = {{"c_re", coeff.c_drift.real()}, {"c_im", coeff.c_drift.imag()},
                                         {"g", coeff.g_noise}, {"diffr", coeff.diffr}};
    c.result.manifest["scheme"] = "exact split step, Ito multiplier exp((c + g^2/2) dz + i g dW)";
}

// ---------------------------------------------------------------- run-full

void cmd_run_full(Context& c) {
    const ModelParams& p = c.p;
    (void)mode_coefficients(p, 0.0);  // refuses delta <= 0
    const GridPtr g = make_grid(c.cfg.grid.n, c.cfg.grid.extent);
    const SpectralField u0 = initial_beam(c, g);
    auto zs = c.cfg.run.snapshot_list();
    const double z_end = c.cfg.run.z_end;
    const std::uint64_t seed = c.seed();
    std::size_t n_steps;
    if (c.cfg.run.dz > 0.0) {
        n_steps = static_cast<std::size_t>(std::llround(z_end / c.cfg.run.dz));
        const double bound = full_step_bound(p, c.cfg.run.c_stab);
        if (c.cfg.run.dz > bound * (1.0 + 1e-12))
            throw StabilityError("configured dz = " + std::to_string(c.cfg.run.dz) + " exceeds stability bound " +
                                     std::to_string(bound),
                                 c.cfg.run.dz, bound);
    } else {
        n_steps = full_step_count(p, z_end, zs, c.cfg.run.c_stab);
    }
    const double dz = z_end / static_cast<double>(n_steps);
    const auto ens = full_ensemble(u0, p, z_end, zs, c.cfg.run.n_paths, seed, c.cfg.run.c_stab, c.cfg.run.v0_scale,
                                   Exec::parallel, c.opt.workers);

    const SpdeCoefficients coeff = spde_coefficients(p);
    const std::size_t probe = g->center_index();
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < zs.size(); ++j) {
        const auto mean = ens[j].mean();
        write_field(c.file(snap_name("mean", j)), SpectralField(g, mean, Space::physical), zs[j]);
        const SpectralField U = coherent_field(u0, zs[j], coeff);
        const double se = ens[j].count() > 1 ? ens[j].standard_error()[probe] : 0.0;
        rows.push_back({zs[j], mean[probe].real(), mean[probe].imag(), std::abs(U.data[probe]), se,
                        relative_l2_error(mean, U.data)});
    }
    write_csv(c.file("probe.csv"), {"z", "mean_re", "mean_im", "limit_abs", "stderr", "rel_l2_vs_limit"}, rows);

    FullRunOptions fo{dz, c.cfg.run.c_stab, {}};
    if (c.cfg.run.v0_scale != 0.0) {
        SpectralField v0 = to_spectral(u0);
        for (auto& v : v0.data) v *= c.cfg.run.v0_scale;
        fo.v0 = v0;
    }
    const auto a = solve_full(u0, p, z_end, stream_for(seed, 0, StreamPurpose::ou), zs, fo);
    const auto b = solve_full(u0, p, z_end, stream_for(seed, 0, StreamPurpose::ou), zs, fo);
    bool same = true;
    for (std::size_t j = 0; j < zs.size(); ++j)
        same = same && std::memcmp(a.snapshots[j].u_hat.data.data(), b.snapshots[j].u_hat.data.data(),
                                   a.snapshots[j].u_hat.data.size() * sizeof(cplx)) == 0;
    c.check("repeat_bitwise_identical", same, same ? 0.0 : 1.0, 0.0);

    c.result.manifest["master_seed"] = seed;
    c.result.manifest["n_paths"] = c.cfg.run.n_paths;
    c.result.manifest["snapshots"] = zs;
    c.result.manifest["dz"] = dz;
    c.result.manifest["n_steps"] = n_steps;
    c.result.manifest["c_stab"] = c.cfg.run.c_stab;
    c.result.manifest["v0_scale"] = c.cfg.run.v0_scale;
    c.result.manifest["scheme"] = "per-mode exact 2x2 exponential, eta frozen at the step average of the exact OU path";
}

// ---------------------------------------------------------------- decay-fit

void cmd_decay_fit(Context& c) {
    const ModelParams& p = c.p;
    const GridPtr g = make_grid(c.cfg.grid.n, c.cfg.grid.extent);
    const SpectralField u0 = initial_beam(c, g);
    const auto zs = c.cfg.run.snapshot_list();
    const std::size_t probe = g->center_index();
    const SpdeCoefficients coeff = spde_coefficients(p);
    std::vector<SpectralField> refs;
    for (double z : zs) refs.push_back(free_propagate(u0, z, coeff.diffr));

    std::vector<DecaySample> samples;
    if (c.opt.synthetic) {
        for (std::size_t j = 0; j < zs.size(); ++j)
            samples.push_back({zs[j], coherent_field(u0, zs[j], coeff).data[probe], refs[j].data[probe], 0.0});
    } else {
        const auto ens = spde_ensemble(u0, p, zs, c.cfg.run.n_paths, c.seed(), Exec::parallel, c.opt.workers);
        samples = decay_samples(ens, zs, refs, probe);
        c.result.manifest["master_seed"] = c.seed();
        c.result.manifest["n_paths"] = c.cfg.run.n_paths;
    }
    const DecayReport rep = fit_decay(samples, p, c.cfg.decay.noise_sigmas);

    std::vector<std::vector<double>> rows;
    std::vector<double> xs, ys, yt;
    for (const auto& s : samples) {
        const double y = std::log(std::abs(s.mean)) - std::log(std::abs(s.reference));
        rows.push_back({s.z, y, s.stderr_mean / std::abs(s.mean), -rep.lambda_theory * s.z});
        xs.push_back(s.z);
        ys.push_back(y);
        yt.push_back(-rep.lambda_theory * s.z);
    }
    write_csv(c.file("decay.csv"), {"z", "log_ratio", "rel_stderr", "theory"}, rows);
    write_svg_plot(c.file("decay.svg"), {"coherent field decay", "z", "log|E u| - log|S u0|", false, false},
                   {{"ensemble", xs, ys, false}, {"-Lambda z", xs, yt, true}});

    c.result.manifest["synthetic"] = c.opt.synthetic;
    c.result.manifest["decay"] = {{"lambda_fit", rep.lambda_fit}, {"lambda_theory", rep.lambda_theory},
                                  {"stderr", rep.stderr}, {"z_window", {rep.z_min, rep.z_max}},
                                  {"n_points", rep.n_points}, {"weighted", rep.weighted}};
    if (c.opt.synthetic) {
        const double err = rep.lambda_theory > 0 ? rep.rel_error() : std::abs(rep.lambda_fit);
        c.check_le("synthetic_recovery", err, 1e-12);
    } else if (rep.lambda_theory > 0.0) {
        c.check_le("lambda_rel_error", rep.rel_error(), c.cfg.decay.tolerance);
    } else {
        c.check_le("lambda_zero", std::abs(rep.lambda_fit), std::max(3.0 * rep.stderr, 1e-12));
    }
}

// ---------------------------------------------------------------- converge

void cmd_converge(Context& c) {
    const ModelParams& p = c.p;
    const GridPtr g = make_grid(c.cfg.grid.n, c.cfg.grid.extent);
    const SpectralField u0 = initial_beam(c, g);
    const auto eps = c.opt.eps_list ? *c.opt.eps_list : c.cfg.converge.eps_list;
    ConvergenceOptions co;
    co.coupling = c.cfg.converge.coupling == "independent" ? NoiseCoupling::independent : NoiseCoupling::shared_wiener;
    co.c_stab = c.cfg.run.c_stab;
    co.workers = c.opt.workers;
    const auto tab = convergence_study(u0, p, eps, c.cfg.run.z_end, c.cfg.run.n_paths, c.seed(), co);

    std::vector<std::vector<double>> rows;
    std::vector<double> xe, yp, yc, yb;
    double beta0 = 0.0, beta0_exact = 0.0;
    json jrows = json::array();
    for (const auto& r : tab.rows) {
        rows.push_back({r.eps, static_cast<double>(r.n_steps), r.dz, r.err_mean, r.err_mean_cv, r.err_probe,
                        r.err_probe_cv, r.err_second_moment, r.mc_se, r.mc_se_cv, r.err_beta0, r.err_beta0_exact});
        jrows.push_back({{"eps", r.eps}, {"n_steps", r.n_steps}, {"err_mean", r.err_mean},
                         {"err_mean_cv", r.err_mean_cv}, {"mc_se", r.mc_se}, {"mc_se_cv", r.mc_se_cv},
                         {"err_second_moment", r.err_second_moment}, {"err_beta0", r.err_beta0},
                         {"err_beta0_exact", r.err_beta0_exact}});
        xe.push_back(r.eps);
        yp.push_back(r.err_mean);
        yc.push_back(r.err_mean_cv);
        yb.push_back(r.err_beta0);
        beta0 = std::max(beta0, r.err_beta0);
        beta0_exact = std::max(beta0_exact, r.err_beta0_exact);
    }
    write_csv(c.file("convergence.csv"),
              {"eps", "n_steps", "dz", "err_mean", "err_mean_cv", "err_probe", "err_probe_cv", "err_second_moment",
               "mc_se", "mc_se_cv", "err_beta0", "err_beta0_exact"},
              rows);
    write_svg_plot(c.file("convergence.svg"), {"full model vs limit", "eps", "relative L2 error", true, true},
                   {{"E[u] plain", xe, yp, false}, {"E[u] control variate", xe, yc, false},
                    {"beta = 0", xe, yb, true}});

    c.result.manifest["master_seed"] = tab.master_seed;
    c.result.manifest["n_paths"] = tab.n_paths;
    c.result.manifest["z_end"] = tab.z_end;
    c.result.manifest["coupling"] = c.cfg.converge.coupling;
    c.result.manifest["fine_steps"] = tab.fine_steps;
    c.result.manifest["rows"] = jrows;
    c.result.manifest["monotone_plain"] = tab.monotone_plain;
    c.check("errors_decrease_monotonically", tab.monotone_cv, tab.monotone_cv ? 1.0 : 0.0, 1.0);
    c.check_le("beta0_vs_free_propagation", beta0, c.cfg.converge.beta0_tolerance);
    c.check_le("beta0_vs_exact_regularized", beta0_exact, c.cfg.converge.beta0_tolerance);
}

// ---------------------------------------------------------------- expand-mu

void cmd_expand_mu(Context& c) {
    const ModelParams& p = c.p;
    std::vector<std::vector<double>> rows;
    std::vector<double> xm, yr;
    const double strength_ref = p.k * p.k * p.beta * p.beta;
    for (double mu : c.cfg.expand.mus) {
        if (!(mu > 0.0)) throw DomainError("expand-mu: mu values must be positive");
        const ModelParams q = make_params(p.k, 1.0 / (p.k * mu), p.eps, p.beta, 0.0, p.N_F);
        const MuExpansionReport r = mu_expansion_check(q);
        rows.push_back({mu, r.full.real(), r.full.imag(), r.two_term.real(), r.two_term.imag(), r.remainder,
                        r.rel_remainder, r.ratio, r.second_to_first, norm_growth_rate_theory(q)});
        xm.push_back(mu);
        yr.push_back(r.rel_remainder);
        if (mu <= 0.2) {
            char name[64];
            std::snprintf(name, sizeof name, "remainder_ratio_mu_%g", mu);
            c.check(name, r.ratio_in_band, r.ratio, 4.0);
        }
        if (mu == 1.0) c.check_le("second_term_half_at_mu_1", std::abs(r.second_to_first - 0.5), 1e-15);
        if (mu == 0.01 && strength_ref > 0.0) {
            const double cap = 1e-4 * strength_ref * q.l_c / 4.0;
            c.check_le("norm_growth_high_frequency", norm_growth_rate_theory(q) / cap, 1.0);
        }
    }
    write_csv(c.file("mu_expansion.csv"),
              {"mu", "full_re", "full_im", "two_term_re", "two_term_im", "remainder", "rel_remainder", "ratio",
               "second_to_first", "norm_growth_rate"},
              rows);
    write_svg_plot(c.file("mu_expansion.svg"), {"two-term expansion remainder", "mu", "relative remainder", true, true},
                   {{"remainder / (k^2 beta^2 l_c / 8)", xm, yr, false}});
    const MuExpansionReport own = mu_expansion_check([&] {
        ModelParams q = p;
        q.delta = 0.0;
        return q;
    }());
    c.result.manifest["config_mu"] = {{"mu", own.mu}, {"remainder", own.remainder}, {"ratio", own.ratio},
                                      {"second_to_first", own.second_to_first}};
}

using Handler = void (*)(Context&);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h{
        {"validate-noise", cmd_validate_noise}, {"verify-covariance", cmd_verify_covariance},
        {"run-spde", cmd_run_spde},             {"run-full", cmd_run_full},
        {"decay-fit", cmd_decay_fit},           {"converge", cmd_converge},
        {"expand-mu", cmd_expand_mu},
    };
    return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"validate-noise", "verify-covariance", "run-spde", "run-full",
                                                "decay-fit",      "converge",          "expand-mu"};
    return names;
}

CommandResult run_command(const std::string& name, const CommandOptions& opt) {
    const auto it = handlers().find(name);
    if (it == handlers().end()) throw UsageError("unknown subcommand '" + name + "'");
    Context c{opt, opt.config, {}, name, {}};
    if (opt.delta) c.cfg.delta = *opt.delta;
    if (opt.seed) c.cfg.run.master_seed = *opt.seed;
    if (opt.eps_list) c.cfg.converge.eps_list = *opt.eps_list;
    c.p = c.cfg.params();
    fs::create_directories(opt.out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    c.result.manifest = {{"command", name},
                         {"version", kVersion},
                         {"params", params_json(c.p)},
                         {"regime", regime_json(c.p, c.cfg.regime)},
                         {"workers", opt.workers},
                         {"config", serialize_config(c.cfg)}};
    it->second(c);
    json checks = json::array();
    for (const auto& ch : c.result.checks)
        checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"value", ch.value}, {"tolerance", ch.tolerance}});
    c.result.manifest["checks"] = checks;
    c.result.manifest["failures"] = c.result.failures();
    c.result.manifest["pass"] = c.result.all_pass();
    c.result.manifest["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(c.file("manifest.json"), c.result.manifest);
    return c.result;
}

}  // namespace parax
