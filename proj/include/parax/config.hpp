#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parax/scales.hpp"

namespace parax {

/// Dimensionless parameters given directly (alternative to [scales]).
struct ModelSection {
    double k = 1.0;
    double l_c = 1.0;
    double eps = 0.1;
    double beta = 0.5;
    double N_F = 1.0;
};

struct GridSection {
    std::size_t n = 64;
    double extent = 8.0;
    double beam_width = 1.0;
    double amplitude = 1.0;
};

struct RunSection {
    double z_end = 1.0;
    double dz = 0.0;                      ///< 0: chosen by the solver
    std::vector<double> snapshots;        ///< empty: n_snapshots evenly spaced on [0, z_end]
    std::size_t n_snapshots = 8;
    std::size_t n_paths = 200;
    std::optional<std::uint64_t> master_seed;
    double c_stab = 0.1;
    double v0_scale = 0.0;                ///< v_hat(0) = v0_scale * u_hat(0)

    std::vector<double> snapshot_list() const;
};

struct NoiseSection {
    std::size_t n_steps = 1000000;
    double dz_factor = 0.1;               ///< dz = dz_factor * eps^2 l_c
    double max_corr_lengths = 5.0;
    double sigmas = 3.0;
    bool dump_path = false;
};

struct CovarianceSection {
    std::size_t n_tuples = 200;
    std::uint64_t grid_seed = 1;
    double tolerance = 1e-10;
    double uR = 1.0;
    double uI = 0.0;
    std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
};

struct DecaySection {
    double tolerance = 0.05;
    double noise_sigmas = 3.0;
};

struct ConvergeSection {
    std::vector<double> eps_list{0.2, 0.1, 0.05};
    std::string coupling = "shared";      ///< shared | independent
    double beta0_tolerance = 1e-10;
};

struct ExpandSection {
    std::vector<double> mus{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
};

/// Everything a subcommand needs. Text form: '#' comments, [section]
/// headers, `key = value` lines, lists comma separated.
struct RunConfig {
    std::optional<PhysicalScales> scales;  ///< [scales]; exclusive with [model]
    ModelSection model;
    double delta = 0.0;
    GridSection grid;
    RunSection run;
    RegimeThresholds regime;
    NoiseSection noise;
    CovarianceSection covariance;
    DecaySection decay;
    ConvergeSection converge;
    ExpandSection expand;
    std::string experiment;

    ModelParams params() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

}  // namespace parax
