#include "parax/noise.hpp"

#include <cmath>
#include <sstream>

#include "parax/errors.hpp"

namespace parax {

namespace {

// x - 2 tanh(x/2), accurate for small x.
double tanh_defect(double x) {
    if (x < 1e-2) {
        const double x3 = x * x * x;
        return x3 / 12.0 - x3 * x * x / 120.0 + 17.0 * x3 * x3 * x / 20160.0;
    }
    return x - 2.0 * std::tanh(0.5 * x);
}

void require_step(double z_step) {
    if (!(z_step > 0.0) || !std::isfinite(z_step)) {
        std::ostringstream os;
        os << "z_step must be positive (got " << z_step << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

OUTransition ou_transition(const ModelParams& p, double z_step) {
    require_step(z_step);
    if (!(p.eps > 0.0) || !(p.l_c > 0.0)) throw DomainError("OU path needs eps > 0 and l_c > 0");
    const double scale = p.eps * std::sqrt(p.l_c);  // eps sqrt(l_c)
    const double x = z_step / (p.eps * p.eps * p.l_c);
    const double one_minus_a = -std::expm1(-x);
    OUTransition t;
    t.h = z_step;
    t.a = std::exp(-x);
    t.s = std::sqrt(-0.5 * std::expm1(-2.0 * x));
    t.cov = scale * one_minus_a;
    // 1 - rho^2 = (x - 2 tanh(x/2)) / x
    const double defect = tanh_defect(x) / x;
    t.w_given_i = 2.0 * scale / (1.0 + t.a);
    t.w_cond_sd = std::sqrt(z_step * defect);
    t.i_given_w = one_minus_a / (x * scale);
    t.i_cond_sd = t.s * std::sqrt(defect);
    return t;
}

double ou_autocovariance_theory(double lag, const ModelParams& p) {
    return 0.5 * std::exp(-lag / (p.eps * p.eps * p.l_c));
}

OUPath sample_ou_path(const ModelParams& p, std::size_t n_steps, double z_step, StreamId seed) {
    const OUTransition t = ou_transition(p, z_step);
    OUPath path;
    path.z_step = z_step;
    path.seed = seed;
    path.values.resize(n_steps + 1);
    path.w_increments.resize(n_steps);
    NormalStream rng(seed);
    double eta = std::sqrt(0.5) * rng.next();
    path.values[0] = eta;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double innovation = t.s * rng.next();
        const double xi_w = rng.next();
        eta = t.a * eta + innovation;
        path.values[n + 1] = eta;
        path.w_increments[n] = t.w_given_i * innovation + t.w_cond_sd * xi_w;
    }
    return path;
}

OUPath ou_path_from_increments(const ModelParams& p, std::span<const double> w_increments, double z_step,
                               StreamId seed) {
    const OUTransition t = ou_transition(p, z_step);
    OUPath path;
    path.z_step = z_step;
    path.seed = seed;
    path.values.resize(w_increments.size() + 1);
    path.w_increments.assign(w_increments.begin(), w_increments.end());
    NormalStream rng(seed);
    double eta = std::sqrt(0.5) * rng.next();
    path.values[0] = eta;
    for (std::size_t n = 0; n < w_increments.size(); ++n) {
        const double innovation = t.i_given_w * w_increments[n] + t.i_cond_sd * rng.next();
        eta = t.a * eta + innovation;
        path.values[n + 1] = eta;
    }
    return path;
}

std::vector<double> sample_wiener_path(std::size_t n_steps, double z_step, StreamId seed) {
    require_step(z_step);
    const double sd = std::sqrt(z_step);
    std::vector<double> dw(n_steps);
    NormalStream rng(seed);
    for (auto& w : dw) w = sd * rng.next();
    return dw;
}

std::vector<double> aggregate_increments(std::span<const double> fine, std::size_t factor) {
    if (factor == 0 || fine.size() % factor != 0) {
        throw DomainError("aggregation factor must divide the number of fine increments");
    }
    std::vector<double> coarse(fine.size() / factor, 0.0);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < factor; ++j) sum += fine[i * factor + j];
        coarse[i] = sum;
    }
    return coarse;
}

std::vector<double> sample_autocovariance(std::span<const double> values, std::size_t max_lag) {
    const std::size_t n = values.size();
    std::vector<double> acov(max_lag + 1, 0.0);
    if (n == 0) return acov;
    for (std::size_t m = 0; m <= max_lag && m < n; ++m) {
        double sum = 0.0;
        for (std::size_t i = 0; i + m < n; ++i) sum += values[i] * values[i + m];
        acov[m] = sum / static_cast<double>(n);
    }
    return acov;
}

double ar1_autocovariance_stderr(double a, double var, std::size_t lag, std::size_t n) {
    // Bartlett: n Var(c_m) ~ sum_j [g(j)^2 + g(j+m) g(j-m)], g(j) = var a^|j|.
    // Closed-form geometric sums for the AR(1) kernel.
    const double a2 = a * a;
    const double m = static_cast<double>(lag);
    const double am = std::pow(a, m);
    const double sum_sq = (1.0 + a2) / (1.0 - a2);                       // sum_j a^{2|j|}
    const double sum_cross = am * am * ((1.0 + a2) / (1.0 - a2) + 2.0 * m);  // sum_j a^{|j+m|+|j-m|}
    const double v = var * var * (sum_sq + sum_cross) / static_cast<double>(n);
    return std::sqrt(v);
}

}  // namespace parax
