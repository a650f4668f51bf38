#include <doctest.h>

#include <cmath>
#include <numbers>

#include "parax/errors.hpp"
#include "parax/scales.hpp"

using namespace parax;

namespace {

PhysicalScales base_scales() {
    PhysicalScales s;
    s.ell = 1.0;
    s.L = 1e4;
    s.k0 = 1.0;
    s.ell_c = 1.0;
    s.sigma = 0.005;
    s.L_x = std::sqrt(2.0 * std::numbers::pi * s.L * s.ell / (s.k0 * s.ell));
    return s;
}

}  // namespace

TEST_SUITE("scales") {
    TEST_CASE("derived parameters") {
        const ModelParams p = derive_params(base_scales(), 0.0);
        CHECK(p.eps == doctest::Approx(0.01).epsilon(1e-15));
        CHECK(p.k == 1.0);
        CHECK(p.l_c == 1.0);
        CHECK(p.mu == 1.0);
        CHECK(p.N_F == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p.beta == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(p.mu * p.k * p.l_c == doctest::Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("round trip through reconstruct_scales") {
        PhysicalScales s = base_scales();
        s.k0 = 3.7;
        s.ell_c = 0.42;
        s.ell = 0.9;
        s.L = 1234.5;
        const ModelParams p = derive_params(s, 0.1);
        const PhysicalScales r = reconstruct_scales(p, s.ell, s.L_x);
        CHECK(std::abs(r.sigma / s.sigma - 1.0) < 1e-14);
        CHECK(std::abs(r.ell_c / s.ell_c - 1.0) < 1e-14);
        CHECK(std::abs(r.L / s.L - 1.0) < 1e-14);
        CHECK(std::abs(r.k0 / s.k0 - 1.0) < 1e-14);
        CHECK(std::abs(r.wavelength() - 2.0 * std::numbers::pi / s.k0) < 1e-14);
    }

    TEST_CASE("invalid scales are rejected") {
        PhysicalScales s = base_scales();
        s.L = 0.0;
        CHECK_THROWS_AS(derive_params(s, 0.0), DomainError);
        s = base_scales();
        s.k0 = -1.0;
        CHECK_THROWS_AS(derive_params(s, 0.0), DomainError);
        s = base_scales();
        s.sigma = -0.1;
        CHECK_THROWS_AS(derive_params(s, 0.0), DomainError);
        CHECK_THROWS_AS(derive_params(base_scales(), -1.0), DomainError);
        CHECK_THROWS_AS(make_params(1, 0, 0.1, 0, 0, 1), DomainError);
    }

    TEST_CASE("regime report") {
        RegimeReport r = regime_report(make_params(1.0, 1.0, 0.01, 0.5, 0.0, 1.0));
        CHECK(r.paraxial_ok);
        CHECK(r.fresnel_ok);
        CHECK(r.regime == FrequencyRegime::same_order);
        CHECK(r.warnings.empty());

        r = regime_report(make_params(1.0, 100.0, 0.01, 0.5, 0.0, 1.0));
        CHECK(r.regime == FrequencyRegime::high_frequency);

        r = regime_report(make_params(1.0, 1.0, 0.01, 0.5, 0.0, 100.0));
        CHECK_FALSE(r.fresnel_ok);
        CHECK(r.warnings.size() == 1);

        r = regime_report(make_params(1.0, 1.0, 0.3, 0.5, 0.0, 1.0));
        CHECK_FALSE(r.paraxial_ok);

        RegimeThresholds t;
        t.eps_max = 0.5;
        CHECK(regime_report(make_params(1.0, 1.0, 0.3, 0.5, 0.0, 1.0), t).paraxial_ok);
    }
}
