#include "parax/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "parax/errors.hpp"

namespace parax {

namespace {

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    }
    void magic(const char* m) { out_.write(m, 4); }
    void u32(std::uint32_t v) { bytes(v, 4); }
    void u64(std::uint64_t v) { bytes(v, 8); }
    void f64(double v) { bytes(std::bit_cast<std::uint64_t>(v), 8); }
    void finish() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed: " + path_);
    }

private:
    void bytes(std::uint64_t v, int n) {
        char buf[8];
        for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        out_.write(buf, n);
    }
    std::ofstream out_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw std::runtime_error("cannot open " + path);
    }
    void expect_magic(const char* m) {
        char buf[4];
        read(buf, 4);
        if (std::memcmp(buf, m, 4) != 0) throw std::runtime_error(path_ + ": bad magic, expected " + std::string(m, 4));
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
    std::uint64_t u64() { return bytes(8); }
    double f64() { return std::bit_cast<double>(bytes(8)); }

private:
    void read(char* buf, int n) {
        in_.read(buf, n);
        if (in_.gcount() != n) throw std::runtime_error(path_ + ": truncated file");
    }
    std::uint64_t bytes(int n) {
        unsigned char buf[8];
        read(reinterpret_cast<char*>(buf), n);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    }
    std::ifstream in_;
    std::string path_;
};

}  // namespace

void write_field(const std::string& path, const SpectralField& f, double z) {
    Writer w(path);
    w.magic("FLD1");
    w.u32(static_cast<std::uint32_t>(f.grid->n()));
    w.f64(f.grid->extent());
    w.u32(f.space == Space::physical ? 0u : 1u);
    w.f64(z);
    for (const cplx& v : f.data) {
        w.f64(v.real());
        w.f64(v.imag());
    }
    w.finish();
}

FieldFile read_field(const std::string& path) {
    Reader r(path);
    r.expect_magic("FLD1");
    const std::uint32_t n = r.u32();
    const double extent = r.f64();
    const std::uint32_t tag = r.u32();
    if (tag > 1) throw std::runtime_error(path + ": unknown space tag");
    FieldFile ff;
    ff.z = r.f64();
    ff.field = SpectralField(make_grid(n, extent), tag == 0 ? Space::physical : Space::spectral);
    for (auto& v : ff.field.data) {
        const double re = r.f64();
        const double im = r.f64();
        v = cplx(re, im);
    }
    return ff;
}

void write_ou_path(const std::string& path, const OUPath& ou) {
    if (ou.values.size() != ou.w_increments.size() + 1) throw UsageError("OU path values/increments size mismatch");
    Writer w(path);
    w.magic("OUP1");
    w.u32(1);
    w.u64(ou.n_steps());
    w.f64(ou.z_step);
    for (double v : ou.values) w.f64(v);
    for (double v : ou.w_increments) w.f64(v);
    w.finish();
}

OUPath read_ou_path(const std::string& path) {
    Reader r(path);
    r.expect_magic("OUP1");
    const std::uint32_t version = r.u32();
    if (version != 1) throw std::runtime_error(path + ": unsupported OUP1 version " + std::to_string(version));
    const std::uint64_t n = r.u64();
    OUPath ou;
    ou.z_step = r.f64();
    ou.values.resize(n + 1);
    ou.w_increments.resize(n);
    for (auto& v : ou.values) v = r.f64();
    for (auto& v : ou.w_increments) v = r.f64();
    return ou;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    char buf[64];
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw UsageError("CSV row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    constexpr double W = 640, H = 420, ml = 70, mr = 150, mt = 40, mb = 55;
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
    };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(spec.title) << "</text>\n";
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = x0 + (x1 - x0) * t / 4.0, fy = y0 + (y1 - y0) * t / 4.0;
        const double sx = ml + pw * t / 4.0, sy = mt + ph - ph * t / 4.0;
        o << "<text x=\"" << sx << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">"
          << fmt_tick(spec.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        o << "<text x=\"" << ml - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
          << fmt_tick(spec.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2
      << ")\">" << xml_escape(spec.y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = colors[k % 6];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"5,4\"" : "")
          << " points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (usable(s.x[i], s.y[i])) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        o << "\"/>\n";
        const double ly = mt + 14 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr + 30 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - mr + 34 << "\" y=\"" << ly << "\">" << xml_escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << o.str();
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace parax
