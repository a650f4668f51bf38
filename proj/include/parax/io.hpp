#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "parax/grid.hpp"
#include "parax/noise.hpp"

namespace parax {

/// FLD1 snapshot: "FLD1", u32 n, f64 extent, u32 space (0 physical,
/// 1 spectral), f64 z, then n*n row-major (re, im) f64 pairs. Little-endian.
void write_field(const std::string& path, const SpectralField& f, double z);

struct FieldFile {
    SpectralField field;
    double z = 0.0;
};
FieldFile read_field(const std::string& path);

/// OUP1 path dump: "OUP1", u32 version (1), u64 n_steps, f64 z_step, then
/// n_steps+1 values and n_steps increments as f64. Little-endian.
void write_ou_path(const std::string& path, const OUPath& ou);
OUPath read_ou_path(const std::string& path);

/// Comma-separated table with a header row; numbers printed with %.17g.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

/// Static SVG line chart.
void write_svg_plot(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace parax
