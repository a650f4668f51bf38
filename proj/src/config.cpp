#include "parax/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "parax/errors.hpp"

namespace parax {

std::vector<double> RunSection::snapshot_list() const {
    if (!snapshots.empty()) return snapshots;
    std::vector<double> zs;
    const std::size_t n = std::max<std::size_t>(n_snapshots, 1);
    for (std::size_t j = 0; j < n; ++j)
        zs.push_back(n == 1 ? z_end : z_end * static_cast<double>(j) / static_cast<double>(n - 1));
    return zs;
}

ModelParams RunConfig::params() const {
    if (scales) return derive_params(*scales, delta);
    ModelParams p = make_params(model.k, model.l_c, model.eps, model.beta, delta, model.N_F);
    p.validate();
    return p;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s, int line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (s.empty() || r.ec != std::errc() || r.ptr != end) throw ConfigError("expected a number, got '" + s + "'", line);
    return v;
}

std::uint64_t to_u64(const std::string& s, int line) {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (s.empty() || r.ec != std::errc() || r.ptr != end)
        throw ConfigError("expected a non-negative integer, got '" + s + "'", line);
    return v;
}

bool to_bool(const std::string& s, int line) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("expected true or false, got '" + s + "'", line);
}

std::vector<double> to_list(const std::string& s, int line) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), line));
    return out;
}

std::string list_str(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

struct Field {
    std::string section;
    std::string key;
    std::function<void(const std::string&, int)> set;
    std::function<std::string()> get;
};

Field dbl(const char* sec, const char* key, double& ref) {
    return {sec, key, [&ref](const std::string& v, int l) { ref = to_double(v, l); }, [&ref] { return fmt(ref); }};
}
Field size(const char* sec, const char* key, std::size_t& ref) {
    return {sec, key, [&ref](const std::string& v, int l) { ref = static_cast<std::size_t>(to_u64(v, l)); },
            [&ref] { return std::to_string(ref); }};
}
Field u64(const char* sec, const char* key, std::uint64_t& ref) {
    return {sec, key, [&ref](const std::string& v, int l) { ref = to_u64(v, l); },
            [&ref] { return std::to_string(ref); }};
}
Field flag(const char* sec, const char* key, bool& ref) {
    return {sec, key, [&ref](const std::string& v, int l) { ref = to_bool(v, l); },
            [&ref] { return std::string(ref ? "true" : "false"); }};
}
Field list(const char* sec, const char* key, std::vector<double>& ref) {
    return {sec, key, [&ref](const std::string& v, int l) { ref = to_list(v, l); }, [&ref] { return list_str(ref); }};
}
Field text(const char* sec, const char* key, std::string& ref) {
    return {sec, key, [&ref](const std::string& v, int) { ref = v; }, [&ref] { return ref; }};
}

// [scales] and [model] are handled separately (mutually exclusive, optional).
std::vector<Field> fields(RunConfig& c) {
    return {
        size("grid", "n", c.grid.n),
        dbl("grid", "extent", c.grid.extent),
        dbl("grid", "beam_width", c.grid.beam_width),
        dbl("grid", "amplitude", c.grid.amplitude),
        dbl("run", "z_end", c.run.z_end),
        dbl("run", "dz", c.run.dz),
        list("run", "snapshots", c.run.snapshots),
        size("run", "n_snapshots", c.run.n_snapshots),
        size("run", "n_paths", c.run.n_paths),
        dbl("run", "c_stab", c.run.c_stab),
        dbl("run", "v0_scale", c.run.v0_scale),
        {"run", "master_seed", [&c](const std::string& v, int l) { c.run.master_seed = to_u64(v, l); },
         [&c] { return c.run.master_seed ? std::to_string(*c.run.master_seed) : std::string(); }},
        dbl("regime", "eps_max", c.regime.eps_max),
        dbl("regime", "nf_min", c.regime.nf_min),
        dbl("regime", "nf_max", c.regime.nf_max),
        dbl("regime", "mu_high_frequency", c.regime.mu_high_frequency),
        dbl("regime", "mu_low_frequency", c.regime.mu_low_frequency),
        size("noise", "n_steps", c.noise.n_steps),
        dbl("noise", "dz_factor", c.noise.dz_factor),
        dbl("noise", "max_corr_lengths", c.noise.max_corr_lengths),
        dbl("noise", "sigmas", c.noise.sigmas),
        flag("noise", "dump_path", c.noise.dump_path),
        size("covariance", "n_tuples", c.covariance.n_tuples),
        u64("covariance", "grid_seed", c.covariance.grid_seed),
        dbl("covariance", "tolerance", c.covariance.tolerance),
        dbl("covariance", "uR", c.covariance.uR),
        dbl("covariance", "uI", c.covariance.uI),
        list("covariance", "deltas", c.covariance.deltas),
        dbl("decay", "tolerance", c.decay.tolerance),
        dbl("decay", "noise_sigmas", c.decay.noise_sigmas),
        list("converge", "eps_list", c.converge.eps_list),
        text("converge", "coupling", c.converge.coupling),
        dbl("converge", "beta0_tolerance", c.converge.beta0_tolerance),
        list("expand", "mus", c.expand.mus),
        text("experiment", "name", c.experiment),
    };
}

std::vector<Field> scale_fields(PhysicalScales& s, double& delta) {
    return {dbl("scales", "L", s.L),         dbl("scales", "L_x", s.L_x),   dbl("scales", "ell", s.ell),
            dbl("scales", "k0", s.k0),       dbl("scales", "ell_c", s.ell_c), dbl("scales", "sigma", s.sigma),
            dbl("scales", "delta", delta)};
}

std::vector<Field> model_fields(ModelSection& m, double& delta) {
    return {dbl("model", "k", m.k),     dbl("model", "l_c", m.l_c),   dbl("model", "eps", m.eps),
            dbl("model", "beta", m.beta), dbl("model", "N_F", m.N_F), dbl("model", "delta", delta)};
}

std::vector<Field> all_fields(RunConfig& c, PhysicalScales& s) {
    auto f = scale_fields(s, c.delta);
    for (auto& x : model_fields(c.model, c.delta)) f.push_back(std::move(x));
    for (auto& x : fields(c)) f.push_back(std::move(x));
    return f;
}

const std::set<std::string> kSections{"scales", "model", "grid", "run", "regime", "noise",
                                      "covariance", "decay", "converge", "expand", "experiment"};

}  // namespace

RunConfig parse_config(const std::string& txt) {
    RunConfig c;
    PhysicalScales s;
    auto table = all_fields(c, s);
    std::map<std::pair<std::string, std::string>, Field*> index;
    for (auto& f : table) index[{f.section, f.key}] = &f;

    std::istringstream in(txt);
    std::string raw, section;
    std::set<std::pair<std::string, std::string>> seen;
    int line_no = 0, scales_line = 0, model_line = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (!kSections.count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
            if (section == "scales" && !scales_line) scales_line = line_no;
            if (section == "model" && !model_line) model_line = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        if (section.empty()) throw ConfigError("key outside of any section", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = index.find({section, key});
        if (it == index.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
        if (!seen.insert({section, key}).second) throw ConfigError("duplicate key '" + key + "'", line_no);
        it->second->set(value, line_no);
    }
    if (scales_line && model_line)
        throw ConfigError("[scales] and [model] are alternatives; give only one", std::max(scales_line, model_line));
    if (scales_line) {
        try {
            s.validate();
        } catch (const DomainError& e) {
            throw ConfigError(std::string("[scales]: ") + e.what(), scales_line);
        }
        c.scales = s;
    }
    if (c.converge.coupling != "shared" && c.converge.coupling != "independent")
        throw ConfigError("converge.coupling must be 'shared' or 'independent'", 0);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path, 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    RunConfig c = cfg;
    PhysicalScales s = cfg.scales.value_or(PhysicalScales{});
    const auto table = all_fields(c, s);
    std::ostringstream out;
    std::string current;
    for (const auto& f : table) {
        if (f.section == "scales" && !cfg.scales) continue;
        if (f.section == "model" && cfg.scales) continue;
        const std::string v = f.get();
        if (f.key == "master_seed" && v.empty()) continue;
        if (f.section == "experiment" && v.empty()) continue;
        if (f.section != current) {
            out << (current.empty() ? "" : "\n") << '[' << f.section << "]\n";
            current = f.section;
        }
        out << f.key << " = " << v << '\n';
    }
    return out.str();
}

}  // namespace parax
