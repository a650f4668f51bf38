#include "parax/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "parax/errors.hpp"

namespace parax {

namespace {

// FFTW's planner is not thread safe; execution with the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

TransverseGrid::TransverseGrid(std::size_t n, double extent) : n_(n), extent_(extent) {
    if (n < 8 || !is_power_of_two(n)) {
        std::ostringstream os;
        os << "grid size must be a power of two >= 8 (got " << n << ")";
        throw DomainError(os.str());
    }
    if (!(extent > 0.0) || !std::isfinite(extent)) throw DomainError("grid extent must be positive");
    dx_ = 2.0 * extent / static_cast<double>(n);
    dkappa_ = std::numbers::pi / extent;
    x_.resize(n);
    kappa_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        x_[j] = -extent + static_cast<double>(j) * dx_;
        kappa_[j] = static_cast<double>(mode_number(j)) * dkappa_;
    }

    std::map<long, std::size_t> classes;
    std::vector<long> keys(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const long ma = mode_number(a), mb = mode_number(b);
            keys[a * n + b] = ma * ma + mb * mb;
            classes.emplace(keys[a * n + b], 0);
        }
    }
    std::size_t idx = 0;
    for (auto& [key, id] : classes) {
        id = idx++;
        class_kappa2_.push_back(static_cast<double>(key) * dkappa_ * dkappa_);
    }
    mode_class_.resize(n * n);
    for (std::size_t i = 0; i < n * n; ++i) mode_class_[i] = classes.at(keys[i]);

    std::vector<cplx> scratch(n * n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int ni = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    plan_pos_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_neg_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

TransverseGrid::~TransverseGrid() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_pos_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_neg_));
}

long TransverseGrid::mode_number(std::size_t j) const {
    const long jl = static_cast<long>(j);
    const long nl = static_cast<long>(n_);
    return jl < nl / 2 ? jl : jl - nl;
}

double TransverseGrid::kappa2(std::size_t flat) const {
    const double ka = kappa_[flat / n_];
    const double kb = kappa_[flat % n_];
    return ka * ka + kb * kb;
}

void TransverseGrid::fft_forward(cplx* data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_pos_), buf, buf);
}

void TransverseGrid::fft_backward(cplx* data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_neg_), buf, buf);
}

GridPtr make_grid(std::size_t n, double extent) { return std::make_shared<const TransverseGrid>(n, extent); }

SpectralField::SpectralField(GridPtr g, Space s) : grid(std::move(g)), data(grid->size()), space(s) {}

SpectralField::SpectralField(GridPtr g, std::vector<cplx> values, Space s)
    : grid(std::move(g)), data(std::move(values)), space(s) {
    if (data.size() != grid->size()) throw UsageError("field data size does not match grid");
}

// x_j = -extent + j dx puts a factor (-1)^(m1+m2) on mode (m1, m2) relative
// to a plain DFT; n is even so the sign only depends on the DFT index.
void to_spectral_inplace(SpectralField& f) {
    if (f.space != Space::physical) throw UsageError("to_spectral expects a physical-space field");
    const auto& g = *f.grid;
    g.fft_forward(f.data.data());
    const double w = g.dx() * g.dx();
    const std::size_t n = g.n();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            f.data[a * n + b] *= ((a + b) & 1u) ? -w : w;
        }
    }
    f.space = Space::spectral;
}

void to_physical_inplace(SpectralField& f) {
    if (f.space != Space::spectral) throw UsageError("to_physical expects a spectral-space field");
    const auto& g = *f.grid;
    const std::size_t n = g.n();
    const double w = 1.0 / (static_cast<double>(n * n) * g.dx() * g.dx());
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            f.data[a * n + b] *= ((a + b) & 1u) ? -w : w;
        }
    }
    g.fft_backward(f.data.data());
    f.space = Space::physical;
}

SpectralField to_spectral(const SpectralField& f) {
    SpectralField out = f;
    to_spectral_inplace(out);
    return out;
}

SpectralField to_physical(const SpectralField& f) {
    SpectralField out = f;
    to_physical_inplace(out);
    return out;
}

double l2_norm_sq(const SpectralField& f) {
    double sum = 0.0;
    for (const auto& v : f.data) sum += std::norm(v);
    const auto& g = *f.grid;
    if (f.space == Space::physical) return sum * g.dx() * g.dx();
    return sum * g.dkappa() * g.dkappa() / (4.0 * std::numbers::pi * std::numbers::pi);
}

SpectralField gaussian_beam(const GridPtr& g, double w0, double amplitude) {
    if (!(w0 > 0.0)) throw DomainError("beam width must be positive");
    SpectralField f(g, Space::physical);
    const auto& x = g->x_coords();
    const std::size_t n = g->n();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double r2 = x[a] * x[a] + x[b] * x[b];
            f.data[a * n + b] = amplitude * std::exp(-r2 / (w0 * w0));
        }
    }
    return f;
}

std::optional<std::string> extent_warning(const TransverseGrid& g, double w0) {
    if (g.extent() >= 6.0 * w0) return std::nullopt;
    std::ostringstream os;
    os << "grid half-width " << g.extent() << " is below 6 beam widths (" << 6.0 * w0
       << "); periodic wrap-around may contaminate the field";
    return os.str();
}

SpectralField envelope_to_field(const SpectralField& u, double z, const ModelParams& p) {
    if (u.space != Space::physical) throw UsageError("envelope_to_field expects a physical-space field");
    SpectralField out = u;
    const cplx carrier = std::polar(1.0, p.k * z / (p.eps * p.eps));
    for (auto& v : out.data) v *= carrier;
    return out;
}

}  // namespace parax
