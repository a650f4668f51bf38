#include "parax/fullmodel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "parax/errors.hpp"

namespace parax {

namespace {

void require_damping(const ModelParams& p) {
    if (!(p.delta > 0.0)) {
        std::ostringstream os;
        os << "regularized model needs delta > 0 (got " << p.delta
           << "): without damping the fast (v, eta) subsystem has no integrable stationary density";
        throw DomainError(os.str());
    }
}

// cosh(r) and sinh(r)/r as functions of r^2, valid for |r^2| <= 1/4.
void cosh_sinhc_series(cplx r2, cplx& ch, cplx& shc) {
    static constexpr double cden[] = {2, 12, 30, 56, 90, 132, 182, 240, 306};
    static constexpr double sden[] = {6, 20, 42, 72, 110, 156, 210, 272, 342};
    ch = 1.0;
    shc = 1.0;
    for (int j = 8; j >= 0; --j) {
        ch = 1.0 + r2 / cden[j] * ch;
        shc = 1.0 + r2 / sden[j] * shc;
    }
}

// exp(h M) with M = [[0, 1/eps], [c21, 2T]], given exp(hT), T and T^2.
Mat2c propagator_from(double eps, double h, cplx decay, cplx t, cplx t2, cplx c21) {
    const cplx q = t2 + c21 / eps;
    const cplx r2 = h * h * q;
    cplx ch, shc;
    if (std::abs(r2) <= 0.25) {
        cosh_sinhc_series(r2, ch, shc);
    } else {
        const cplx r = h * std::sqrt(q);
        const cplx e = std::exp(r);
        const cplx ei = 1.0 / e;
        ch = 0.5 * (e + ei);
        shc = 0.5 * (e - ei) / r;
    }
    const cplx sh = h * shc;  // sinh(h s)/s
    Mat2c m;
    m.a11 = decay * (ch - t * sh);
    m.a12 = decay * sh / eps;
    m.a21 = decay * c21 * sh;
    m.a22 = decay * (ch + t * sh);
    return m;
}

void check_grids(const FullState& s, const GridPtr& g) {
    if (s.u_hat.space != Space::spectral || s.v_hat.space != Space::spectral)
        throw UsageError("full-model state must be in spectral space");
    if (s.u_hat.grid != g || s.v_hat.grid != g) throw UsageError("full-model state grid mismatch");
}

}  // namespace

ModeCoefficients mode_coefficients(const ModelParams& p, double kappa2) {
    require_damping(p);
    const cplx denom(2.0 * p.delta * p.k, -1.0);
    const cplx i_over = cplx(0.0, 1.0) / denom;
    ModeCoefficients m;
    m.damping = 2.0 * p.k / denom;
    m.diffraction = kappa2 * (p.k / (2.0 * std::numbers::pi * p.N_F)) * i_over;
    m.medium = p.k * p.k * p.beta * i_over;
    return m;
}

double full_step_bound(const ModelParams& p, double c_stab) {
    require_damping(p);
    const double fast = std::abs(cplx(2.0 * p.delta * p.k, -1.0)) / (2.0 * p.k);
    return c_stab * p.eps * p.eps * std::min(p.l_c, fast);
}

FullState make_full_state(const SpectralField& u0, double eta0, const std::optional<SpectralField>& v0) {
    FullState s;
    s.u_hat = u0.space == Space::spectral ? u0 : to_spectral(u0);
    if (v0) {
        if (v0->grid != u0.grid) throw UsageError("v0 grid differs from u0 grid");
        s.v_hat = v0->space == Space::spectral ? *v0 : to_spectral(*v0);
    } else {
        s.v_hat = SpectralField(u0.grid, Space::spectral);
    }
    s.eta = eta0;
    return s;
}

Mat2c operator*(const Mat2c& a, const Mat2c& b) {
    Mat2c m;
    m.a11 = a.a11 * b.a11 + a.a12 * b.a21;
    m.a12 = a.a11 * b.a12 + a.a12 * b.a22;
    m.a21 = a.a21 * b.a11 + a.a22 * b.a21;
    m.a22 = a.a21 * b.a12 + a.a22 * b.a22;
    return m;
}

Mat2c mode_propagator(double eps, cplx damping, cplx c21, double h) {
    const cplx t = -damping / (2.0 * eps * eps);
    return propagator_from(eps, h, std::exp(h * t), t, t * t, c21);
}

FullStepper::FullStepper(const ModelParams& p, GridPtr grid, double dz, double c_stab)
    : p_(p), grid_(std::move(grid)), dz_(dz) {
    p_.validate();
    const double bound = full_step_bound(p_, c_stab);
    if (!(dz > 0.0)) throw DomainError("full-model step must be positive");
    if (dz > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "step dz = " << dz << " exceeds stability bound " << bound << " (c_stab = " << c_stab
           << ", eps = " << p_.eps << ")";
        throw StabilityError(os.str(), dz, bound);
    }
    const ModeCoefficients base = mode_coefficients(p_, 1.0);
    damping_ = base.damping;
    medium_ = base.medium;
    class_diffraction_.reserve(grid_->n_classes());
    for (double k2 : grid_->class_kappa2()) class_diffraction_.push_back(k2 * base.diffraction);
    t_ = -damping_ / (2.0 * p_.eps * p_.eps);
    t2_ = t_ * t_;
    decay_ = std::exp(dz_ * t_);
}

Mat2c FullStepper::class_propagator(std::size_t cls, double eta_mid) const {
    const double eps = p_.eps;
    const cplx c21 = -class_diffraction_[cls] / eps + medium_ * (eta_mid / (eps * eps));
    return propagator_from(eps, dz_, decay_, t_, t2_, c21);
}

void FullStepper::step(FullState& s, double eta_next) const {
    check_grids(s, grid_);
    const double eta_mid = 0.5 * (s.eta + eta_next);
    std::vector<Mat2c> props(grid_->n_classes());
    for (std::size_t c = 0; c < props.size(); ++c) props[c] = class_propagator(c, eta_mid);
    const auto& cls = grid_->mode_class();
    for (std::size_t i = 0; i < s.u_hat.data.size(); ++i) {
        const Mat2c& m = props[cls[i]];
        const cplx u = s.u_hat.data[i];
        const cplx v = s.v_hat.data[i];
        s.u_hat.data[i] = m.a11 * u + m.a12 * v;
        s.v_hat.data[i] = m.a21 * u + m.a22 * v;
    }
    s.z += dz_;
    s.eta = eta_next;
}

void FullStepper::accumulate(std::span<const double> eta, std::vector<Mat2c>& prod) const {
    if (prod.size() != grid_->n_classes()) prod.assign(grid_->n_classes(), Mat2c{});
    for (std::size_t n = 0; n + 1 < eta.size(); ++n) {
        const double eta_mid = 0.5 * (eta[n] + eta[n + 1]);
        for (std::size_t c = 0; c < prod.size(); ++c) prod[c] = class_propagator(c, eta_mid) * prod[c];
    }
}

void FullStepper::apply(const std::vector<Mat2c>& prod, FullState& s, std::size_t n_steps, double eta_end) const {
    check_grids(s, grid_);
    if (prod.size() != grid_->n_classes()) throw UsageError("propagator table has the wrong size");
    const auto& cls = grid_->mode_class();
    for (std::size_t i = 0; i < s.u_hat.data.size(); ++i) {
        const Mat2c& m = prod[cls[i]];
        const cplx u = s.u_hat.data[i];
        const cplx v = s.v_hat.data[i];
        s.u_hat.data[i] = m.a11 * u + m.a12 * v;
        s.v_hat.data[i] = m.a21 * u + m.a22 * v;
    }
    s.z += static_cast<double>(n_steps) * dz_;
    s.eta = eta_end;
}

FullState step_full(const FullState& s, double eta_next, const ModelParams& p, double dz, double c_stab) {
    FullStepper stepper(p, s.u_hat.grid, dz, c_stab);
    FullState out = s;
    stepper.step(out, eta_next);
    return out;
}

std::size_t full_step_count(const ModelParams& p, double z_end, std::span<const double> snapshot_zs,
                            double c_stab) {
    if (!(z_end > 0.0)) throw DomainError("z_end must be positive");
    for (double z : snapshot_zs)
        if (z < 0.0 || z > z_end * (1.0 + 1e-12)) throw DomainError("snapshot z outside [0, z_end]");
    const double bound = full_step_bound(p, c_stab);
    const auto n_min = static_cast<std::size_t>(std::ceil(z_end / bound * (1.0 - 1e-12)));
    for (std::size_t n = std::max<std::size_t>(n_min, 1); n <= 64 * n_min + 1024; ++n) {
        bool aligned = true;
        for (double z : snapshot_zs) {
            const double r = z / z_end * static_cast<double>(n);
            if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
                aligned = false;
                break;
            }
        }
        if (aligned) return n;
    }
    throw DomainError("no admissible step count puts every snapshot on the step grid");
}

namespace {

std::vector<std::size_t> snapshot_steps_for(std::span<const double> zs, double dz) {
    std::vector<std::size_t> steps;
    steps.reserve(zs.size());
    for (double z : zs) steps.push_back(static_cast<std::size_t>(std::llround(z / dz)));
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i] < steps[i - 1]) throw DomainError("snapshot z values must be ascending");
    return steps;
}

void check_path(std::span<const double> eta, std::span<const std::size_t> steps) {
    if (eta.empty()) throw DomainError("empty eta path");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i] >= eta.size()) throw DomainError("snapshot beyond end of eta path");
        if (i > 0 && steps[i] < steps[i - 1]) throw DomainError("snapshot steps must be ascending");
    }
}

}  // namespace

FullTrajectory solve_full(const SpectralField& u0, const ModelParams& p, double z_end, StreamId seed,
                          std::span<const double> snapshot_zs, const FullRunOptions& opt) {
    p.validate();
    std::size_t n;
    if (opt.dz > 0.0) {
        const double r = z_end / opt.dz;
        n = static_cast<std::size_t>(std::llround(r));
        if (n == 0 || std::abs(r - static_cast<double>(n)) > 1e-9 * r)
            throw DomainError("dz must divide z_end");
        const double bound = full_step_bound(p, opt.c_stab);
        if (opt.dz > bound * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "step dz = " << opt.dz << " exceeds stability bound " << bound;
            throw StabilityError(os.str(), opt.dz, bound);
        }
    } else {
        n = full_step_count(p, z_end, snapshot_zs, opt.c_stab);
    }
    const double dz = z_end / static_cast<double>(n);
    const OUPath ou = sample_ou_path(p, n, dz, seed);
    const auto steps = snapshot_steps_for(snapshot_zs, dz);
    FullTrajectory traj;
    traj.dz = dz;
    traj.n_steps = n;
    traj.snapshots = solve_full_on_path(u0, p, ou.values, dz, steps, opt);
    return traj;
}

std::vector<FullState> solve_full_on_path(const SpectralField& u0, const ModelParams& p,
                                          std::span<const double> eta, double dz,
                                          std::span<const std::size_t> snapshot_steps,
                                          const FullRunOptions& opt) {
    check_path(eta, snapshot_steps);
    const FullStepper stepper(p, u0.grid, dz, opt.c_stab);
    const FullState initial = make_full_state(u0, eta[0], opt.v0);
    std::vector<Mat2c> prod(u0.grid->n_classes());
    std::vector<FullState> out;
    out.reserve(snapshot_steps.size());
    std::size_t cur = 0;
    for (std::size_t target : snapshot_steps) {
        stepper.accumulate(eta.subspan(cur, target - cur + 1), prod);
        cur = target;
        FullState s = initial;
        stepper.apply(prod, s, 0, eta[target]);
        s.z = static_cast<double>(target) * dz;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<FullState> solve_full_on_path_stepwise(const SpectralField& u0, const ModelParams& p,
                                                   std::span<const double> eta, double dz,
                                                   std::span<const std::size_t> snapshot_steps,
                                                   const FullRunOptions& opt) {
    check_path(eta, snapshot_steps);
    const FullStepper stepper(p, u0.grid, dz, opt.c_stab);
    FullState s = make_full_state(u0, eta[0], opt.v0);
    std::vector<FullState> out;
    out.reserve(snapshot_steps.size());
    std::size_t cur = 0;
    for (std::size_t target : snapshot_steps) {
        for (; cur < target; ++cur) stepper.step(s, eta[cur + 1]);
        FullState snap = s;
        snap.z = static_cast<double>(target) * dz;
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace parax
