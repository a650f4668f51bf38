#pragma once

#include <stdexcept>
#include <string>

namespace parax {

/// Argument outside the mathematical domain of an operation (nonpositive
/// length, non-power-of-two grid, delta <= 0 where damping is required, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation called on an object in the wrong state, e.g. a physical-space
/// field handed to a spectral-space kernel.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Requested step exceeds the stability bound of the full-model integrator.
class StabilityError : public std::runtime_error {
public:
    StabilityError(const std::string& what, double step, double bound)
        : std::runtime_error(what), step_(step), bound_(bound) {}
    double step() const noexcept { return step_; }
    double bound() const noexcept { return bound_; }

private:
    double step_;
    double bound_;
};

/// Drift matrix is not Hurwitz; no stationary covariance exists.
class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decay fit could not be performed on the supplied snapshots.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, int bad_snapshot)
        : std::runtime_error(what), bad_snapshot_(bad_snapshot) {}
    /// Index of the first offending snapshot, or -1 when the failure is global.
    int bad_snapshot() const noexcept { return bad_snapshot_; }

private:
    int bad_snapshot_;
};

/// Malformed configuration text. line() is 1-based, 0 if not line specific.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace parax
