#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "parax/errors.hpp"
#include "parax/homog.hpp"
#include "parax/rng.hpp"
#include "parax/spde.hpp"

using namespace parax;

TEST_SUITE("homog") {
    TEST_CASE("gamma entries") {
        const ModelParams p = make_params(1.0, 2.0, 0.1, 1.0, 0.5, 1.0);
        const GammaSystem gs = build_gamma(p, 1.0, 0.0);
        // den = 4 delta^2 k^2 + 1 = 2
        CHECK(gs.gamma[0][0] == doctest::Approx(1.0));
        CHECK(gs.gamma[0][1] == doctest::Approx(-1.0));
        CHECK(gs.gamma[1][0] == doctest::Approx(1.0));
        CHECK(gs.gamma[1][1] == doctest::Approx(1.0));
        CHECK(gs.gamma[0][2] == doctest::Approx(0.5));
        CHECK(gs.gamma[1][2] == doctest::Approx(-0.5));
        CHECK(gs.gamma[2][2] == doctest::Approx(0.5));
        CHECK(gs.d_vec[2] == doctest::Approx(1.0 / std::sqrt(2.0)));

        ModelParams q = p;
        q.beta = 0.0;
        const GammaSystem g0 = build_gamma(q, 1.3, -0.2);
        CHECK(g0.gamma[0][2] == 0.0);
        CHECK(g0.gamma[1][2] == 0.0);

        q.delta = 0.0;
        CHECK_THROWS_AS(build_gamma(q, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS(stationary_covariance_closed_form(q, 1.0, 0.0), DomainError);
    }

    TEST_CASE("eigenvalues") {
        for (double delta : {1e-3, 0.1, 0.5, 2.0}) {
            for (double k : {0.5, 1.0, 3.0}) {
                const ModelParams p = make_params(k, 0.8, 0.1, 1.2, delta, 1.0);
                const auto th = gamma_eigenvalues_theory(p);
                const auto nu = gamma_eigenvalues_numeric(build_gamma(p, 0.3, -1.1));
                for (int i = 0; i < 3; ++i) CHECK(std::abs(th[i] - nu[i]) <= 1e-12 * std::abs(th[i]));
                CHECK(th[0].imag() > 0.0);
                CHECK(th[1] == std::conj(th[0]));
            }
        }
    }

    TEST_CASE("known values") {
        const ModelParams p = make_params(1.0, 1.0, 0.1, 1.0, 0.1, 1.0);
        const auto s = stationary_covariance_closed_form(p, 1.0, 0.0);
        CHECK(s.vRvR == doctest::Approx(1.0 / 9.344).epsilon(1e-14));
        CHECK(s.etaeta == 0.5);
        const auto n = stationary_covariance_numeric(build_gamma(p, 1.0, 0.0));
        CHECK(n.vRvR == doctest::Approx(1.0 / 9.344).epsilon(1e-12));
        CHECK(n.etaeta == doctest::Approx(0.5).epsilon(1e-14));

        const auto z = stationary_covariance_closed_form(p, 0.0, 0.0);
        CHECK(z.vReta == 0.0);
        CHECK(z.vIeta == 0.0);

        ModelParams q = p;
        q.beta = 0.0;
        const auto b0 = stationary_covariance_numeric(build_gamma(q, 0.7, 0.4));
        CHECK(std::abs(b0.vRvR) < 1e-15);
        CHECK(std::abs(b0.vIvI) < 1e-15);
        CHECK(std::abs(b0.vRvI) < 1e-15);
        CHECK(std::abs(b0.vReta) < 1e-15);
        CHECK(std::abs(b0.vIeta) < 1e-15);
        CHECK(b0.etaeta == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("swap symmetry and the 1/delta law") {
        const ModelParams p = make_params(1.7, 0.6, 0.1, 0.9, 0.03, 1.0);
        const double uR = 0.8, uI = -1.3;
        const auto a = stationary_covariance_closed_form(p, uR, uI);
        const auto b = stationary_covariance_closed_form(p, uI, -uR);
        CHECK(a.vIvI == doctest::Approx(b.vRvR).epsilon(1e-14));

        CHECK(p.delta * a.vRvR == doctest::Approx(scaled_vRvR(p, uR, uI)).epsilon(1e-14));
        ModelParams z = p;
        z.delta = 0.0;
        const double lim = scaled_vRvR(z, uR, uI);
        CHECK(lim > 0.0);
        z.delta = 1e-7;
        CHECK(z.delta * stationary_covariance_closed_form(z, uR, uI).vRvR == doctest::Approx(lim).epsilon(1e-5));
    }

    TEST_CASE("closed form agrees with the Lyapunov solve") {
        const auto tuples = default_verification_grid(100, 3);
        const auto r = verify_appendix_a(tuples);
        CHECK(r.pass);
        CHECK(r.n_tuples == 100);
        CHECK(r.max_rel_err <= 1e-10);
        CHECK(r.max_residual <= 1e-12);
        CHECK(r.min_eigenvalue >= -1e-12);
        CHECK(r.max_etaeta_dev == 0.0);
        CHECK(r.failing_entries.empty());
        for (const auto& t : tuples) {
            CHECK(t.delta >= 1e-3);
            CHECK(t.delta <= 1.0);
        }
        const auto s = verify_appendix_a(tuples, {}, 1e-10, Exec::serial);
        CHECK(s.max_rel_err == r.max_rel_err);
    }

    TEST_CASE("a sign error in one entry is caught and named") {
        ClosedFormFn broken = [](const ModelParams& p, double uR, double uI) {
            auto s = stationary_covariance_closed_form(p, uR, uI);
            s.vRvI = -s.vRvI;
            return s;
        };
        const auto r = verify_appendix_a(default_verification_grid(50, 9), broken);
        CHECK_FALSE(r.pass);
        REQUIRE(r.failing_entries.size() == 1);
        CHECK(r.failing_entries[0] == "vRvI");
        CHECK(r.worst_entry == CovEntry::vRvI);
    }

    TEST_CASE("non-Hurwitz drift is refused") {
        GammaSystem gs = build_gamma(make_params(1.0, 1.0, 0.1, 1.0, 0.5, 1.0), 1.0, 0.0);
        gs.gamma[2][2] = -1.0;
        CHECK_THROWS_AS(stationary_covariance_numeric(gs), SpectralError);
    }

    TEST_CASE("noncommuting limits demo") {
        const ModelParams p = make_params(1.0, 1.0, 0.1, 1.0, 0.0, 1.0);
        const auto r = limit_noncommutativity_demo(p, 1.0, 0.5);
        CHECK(r.pass);
        CHECK(r.rows.size() == 4);
        CHECK(r.differences_decrease);
        CHECK(r.K_finite);
        CHECK(r.K <= 2.0 * r.K_bound);
        CHECK(std::abs(r.c0 - spde_coefficients(p).c_drift) < 1e-15);
        CHECK(r.rows.back().delta_vRvR == doctest::Approx(r.limit_delta_vRvR).epsilon(1e-3));
        CHECK_THROWS_AS(limit_noncommutativity_demo(p, 1.0, 0.5, {1e-2, 1e-1}), DomainError);
    }

    TEST_CASE("sample covariance of the exact OU chain matches the Lyapunov solution") {
        const ModelParams p = make_params(1.0, 1.0, 0.1, 1.0, 0.5, 1.0);
        const GammaSystem gs = build_gamma(p, 0.7, -0.4);
        const auto sigma = stationary_covariance_numeric(gs);

        // Van Loan: exp([[gamma, d d^T], [0, -gamma^T]] h) gives the one-step noise covariance.
        Eigen::Matrix3d g;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = gs.gamma[i][j];
        const Eigen::Vector3d d(gs.d_vec[0], gs.d_vec[1], gs.d_vec[2]);
        const double h = 0.5;
        Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
        m.topLeftCorner<3, 3>() = g * h;
        m.topRightCorner<3, 3>() = d * d.transpose() * h;
        m.bottomRightCorner<3, 3>() = -g.transpose() * h;
        const Eigen::Matrix<double, 6, 6> e = m.exp();
        const Eigen::Matrix3d phi = e.bottomRightCorner<3, 3>().transpose();
        Eigen::Matrix3d q = phi * e.topRightCorner<3, 3>();
        q = 0.5 * (q + q.transpose());
        const Eigen::Matrix3d chol = q.llt().matrixL();

        NormalStream rng(stream_for(5, 0, StreamPurpose::generic));
        const std::size_t n_batches = 100, batch = 2000, burn = 200;
        Eigen::Vector3d x = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < burn; ++i) {
            const Eigen::Vector3d z(rng.next(), rng.next(), rng.next());
            x = phi * x + chol * z;
        }
        constexpr int R[6] = {0, 0, 1, 0, 1, 2};
        constexpr int C[6] = {0, 1, 1, 2, 2, 2};
        std::array<std::vector<double>, 6> means;
        for (std::size_t b = 0; b < n_batches; ++b) {
            std::array<double, 6> acc{};
            for (std::size_t i = 0; i < batch; ++i) {
                const Eigen::Vector3d z(rng.next(), rng.next(), rng.next());
                x = phi * x + chol * z;
                for (int u = 0; u < 6; ++u) acc[u] += x(R[u]) * x(C[u]);
            }
            for (int u = 0; u < 6; ++u) means[u].push_back(acc[u] / batch);
        }
        for (int u = 0; u < 6; ++u) {
            double mean = 0, var = 0;
            for (double v : means[u]) mean += v;
            mean /= n_batches;
            for (double v : means[u]) var += (v - mean) * (v - mean);
            const double se = std::sqrt(var / (n_batches - 1) / n_batches);
            const double expect = sigma.get(kCovEntries[u]);
            INFO(to_string(kCovEntries[u]) << " sample " << mean << " expected " << expect << " se " << se);
            CHECK(std::abs(mean - expect) < 3.0 * se);
        }
    }
}
