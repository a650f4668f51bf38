#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "parax/scales.hpp"

namespace parax {

using cplx = std::complex<double>;

/// Uniform periodic n x n grid on [-extent, extent)^2 with its DFT mode
/// layout. Immutable once built; share it through GridPtr.
///
/// Fourier convention: u_hat(kappa) = \int u(x) exp(+i kappa.x) dx,
/// approximated by dx^2 * sum; the inverse carries 1/(2 pi)^2 so a round
/// trip is the identity and Parseval reads sum|u|^2 dx^2 = sum|u_hat|^2 dk^2/(4 pi^2).
class TransverseGrid {
public:
    TransverseGrid(std::size_t n, double extent);
    ~TransverseGrid();
    TransverseGrid(const TransverseGrid&) = delete;
    TransverseGrid& operator=(const TransverseGrid&) = delete;

    std::size_t n() const { return n_; }
    std::size_t size() const { return n_ * n_; }
    double extent() const { return extent_; }
    double dx() const { return dx_; }
    double dkappa() const { return dkappa_; }
    const std::vector<double>& x_coords() const { return x_; }
    const std::vector<double>& kappa_coords() const { return kappa_; }
    /// Signed integer mode number of DFT index j.
    long mode_number(std::size_t j) const;
    /// |kappa|^2 of the flat spectral index.
    double kappa2(std::size_t flat) const;

    /// Modes with equal |kappa|^2 evolve identically in a layered medium;
    /// mode_class()[flat] indexes class_kappa2().
    const std::vector<std::size_t>& mode_class() const { return mode_class_; }
    const std::vector<double>& class_kappa2() const { return class_kappa2_; }
    std::size_t n_classes() const { return class_kappa2_.size(); }

    /// Flat index of the physical sample nearest to the origin.
    std::size_t center_index() const { return (n_ / 2) * n_ + n_ / 2; }

    void fft_forward(cplx* data) const;   // exp(+i k x) sign, unnormalized
    void fft_backward(cplx* data) const;  // exp(-i k x) sign, unnormalized

private:
    std::size_t n_;
    double extent_;
    double dx_;
    double dkappa_;
    std::vector<double> x_;
    std::vector<double> kappa_;
    std::vector<std::size_t> mode_class_;
    std::vector<double> class_kappa2_;
    void* plan_pos_ = nullptr;
    void* plan_neg_ = nullptr;
};

using GridPtr = std::shared_ptr<const TransverseGrid>;

GridPtr make_grid(std::size_t n, double extent);

enum class Space { physical, spectral };

/// Complex transverse field in one of its two representations.
struct SpectralField {
    GridPtr grid;
    std::vector<cplx> data;
    Space space = Space::physical;

    SpectralField() = default;
    SpectralField(GridPtr g, Space s);
    SpectralField(GridPtr g, std::vector<cplx> values, Space s);

    std::size_t size() const { return data.size(); }
};

SpectralField to_spectral(const SpectralField& f);
SpectralField to_physical(const SpectralField& f);
void to_spectral_inplace(SpectralField& f);
void to_physical_inplace(SpectralField& f);

/// Squared L2 norm with the quadrature weight of the field's space.
double l2_norm_sq(const SpectralField& f);

/// u(x) = A exp(-|x|^2 / w0^2) in physical space.
SpectralField gaussian_beam(const GridPtr& g, double w0, double amplitude);

/// Advisory: set when extent < 6 beam widths (wrap-around risk).
std::optional<std::string> extent_warning(const TransverseGrid& g, double w0);

/// Multiply the envelope by the carrier exp(i k z / eps^2) (= exp(i k0 r3)).
SpectralField envelope_to_field(const SpectralField& u, double z, const ModelParams& p);

}  // namespace parax
