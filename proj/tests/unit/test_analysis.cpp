#include <doctest.h>

#include <cmath>

#include "parax/analysis.hpp"
#include "parax/errors.hpp"
#include "parax/spde.hpp"

using namespace parax;

namespace {

std::vector<DecaySample> synthetic(double lambda, std::size_t n, double se) {
    std::vector<DecaySample> out;
    for (std::size_t i = 0; i < n; ++i) {
        DecaySample s;
        s.z = 0.5 * static_cast<double>(i);
        s.reference = cplx(0.3, -0.2) * std::exp(cplx(0.0, 0.1 * i));
        s.mean = s.reference * std::exp(-lambda * s.z) * std::exp(cplx(0.0, 0.7 * i));
        s.stderr_mean = se;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_SUITE("analysis") {
    TEST_CASE("decay constant") {
        CHECK(decay_constant_theory(make_params(1.0, 1.0, 0.1, 1.0, 0.0, 1.0)) == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(decay_constant_theory(make_params(1.0, 1.0, 0.1, 0.0, 0.0, 1.0)) == 0.0);
        // mu -> 0: Lambda -> k^2 beta^2 l_c / 8
        const ModelParams hf = make_params(1000.0, 1.0, 0.1, 1e-3, 0.0, 1.0);
        CHECK(decay_constant_theory(hf) == doctest::Approx(1.0 / 8.0).epsilon(1e-6));
        for (double k : {0.2, 1.0, 7.0}) {
            const ModelParams p = make_params(k, 0.4, 0.1, 0.8, 0.0, 1.0);
            CHECK(decay_constant_theory(p) == doctest::Approx(-spde_coefficients(p).c_drift.real()).epsilon(1e-14));
            CHECK(norm_growth_rate_theory(p) ==
                  doctest::Approx(spde_coefficients(p).norm_growth_rate()).epsilon(1e-12));
        }
    }

    TEST_CASE("fit recovers a synthetic decay") {
        const ModelParams p = make_params(1.0, 1.0, 0.1, 1.0, 0.0, 1.0);
        const auto ols = fit_decay(synthetic(0.1, 8, 0.0), p);
        CHECK_FALSE(ols.weighted);
        CHECK(std::abs(ols.lambda_fit - 0.1) < 1e-12);
        CHECK(ols.rel_error() < 1e-10);
        CHECK(ols.n_points == 8);
        CHECK(ols.z_max == 3.5);
        const auto wls = fit_decay(synthetic(0.1, 8, 1e-4), p);
        CHECK(wls.weighted);
        CHECK(std::abs(wls.lambda_fit - 0.1) < 1e-12);
        CHECK(wls.stderr > 0.0);
    }

    TEST_CASE("fit refusals") {
        const ModelParams p = make_params(1.0, 1.0, 0.1, 1.0, 0.0, 1.0);
        CHECK_THROWS_AS(fit_decay(synthetic(0.1, 4, 0.0), p), FitError);
        auto s = synthetic(0.1, 8, 1e-3);
        s[5].mean = cplx(1e-3, 0.0);
        try {
            fit_decay(s, p);
            FAIL("expected FitError");
        } catch (const FitError& e) {
            CHECK(e.bad_snapshot() == 5);
        }
        auto same = synthetic(0.1, 6, 0.0);
        for (auto& x : same) x.z = 1.0;
        CHECK_THROWS_AS(fit_decay(same, p), FitError);
    }

    TEST_CASE("beta = 0 fit gives zero") {
        const ModelParams p = make_params(1.0, 1.0, 0.1, 0.0, 0.0, 1.0);
        const auto r = fit_decay(synthetic(0.0, 6, 0.0), p);
        CHECK(r.lambda_theory == 0.0);
        CHECK(std::abs(r.lambda_fit) < 1e-14);
        CHECK(r.rel_error() < 1e-14);
    }

    TEST_CASE("mu expansion") {
        for (double mu : {0.2, 0.1, 0.05, 0.01}) {
            // mu = 1/(k l_c)
            const ModelParams p = make_params(1.0 / mu, 1.0, 0.1, mu, 0.0, 1.0);
            const auto r = mu_expansion_check(p);
            CHECK(r.mu == doctest::Approx(mu));
            CHECK(r.ratio_in_band);
            CHECK(r.ratio == doctest::Approx(4.0).epsilon(0.15));
            CHECK(r.pass);
            const double strength = p.k * p.k * p.beta * p.beta * p.l_c;
            CHECK(r.remainder / (strength / 8.0) == doctest::Approx(r.rel_remainder).epsilon(1e-10));
            CHECK(std::abs(r.full - spde_coefficients(p).c_drift) < 1e-14 * std::abs(r.full));
        }
        const auto one = mu_expansion_check(make_params(1.0, 1.0, 0.1, 1.0, 0.0, 1.0));
        CHECK(one.second_to_first == 0.5);
        CHECK(one.pass);
    }

    TEST_CASE("error norms") {
        const std::vector<cplx> a{1.0, cplx(0, 1)}, b{1.0, cplx(0, 2)};
        CHECK(relative_l2_error(a, b) == doctest::Approx(1.0 / std::sqrt(5.0)));
        CHECK(relative_max_error(a, b) == doctest::Approx(0.5));
        CHECK(strictly_decreasing({3.0, 2.0, 1.0}));
        CHECK_FALSE(strictly_decreasing({3.0, 3.0, 1.0}));
        CHECK_THROWS_AS(relative_l2_error(a, std::vector<cplx>{1.0}), UsageError);
    }

    TEST_CASE("small convergence study") {
        auto g = make_grid(8, 3.0);
        const auto u0 = gaussian_beam(g, 0.6, 1.0);
        const ModelParams tmpl = make_params(1.0, 2.0, 0.2, 1.0, 0.1, 1.0);
        ConvergenceOptions opt;
        const auto t = convergence_study(u0, tmpl, {0.1, 0.05}, 0.5, 200, 4, opt);
        REQUIRE(t.rows.size() == 2);
        CHECK(t.fine_steps % t.rows[0].n_steps == 0);
        CHECK(t.fine_steps % t.rows[1].n_steps == 0);
        for (const auto& r : t.rows) {
            CHECK(r.mc_se_cv < r.mc_se);
            CHECK(r.err_beta0_exact <= 1e-10);
            CHECK(r.err_beta0 > 0.0);
        }
        opt.coupling = NoiseCoupling::independent;
        opt.beta0_control = false;
        const auto ti = convergence_study(u0, tmpl, {0.1, 0.05}, 0.5, 200, 4, opt);
        CHECK(ti.fine_steps == 0);
        for (const auto& r : ti.rows) CHECK(r.mc_se_cv < r.mc_se);
        CHECK_THROWS_AS(convergence_study(u0, tmpl, {0.1, 0.2}, 0.1, 10, 4), DomainError);
    }
}
