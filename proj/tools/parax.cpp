#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "parax/commands.hpp"
#include "parax/errors.hpp"
#include "parax/version.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paraxial white-noise limit simulator and verification toolkit"};
    app.set_version_flag("--version", std::string(parax::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_dir = "out";
    bool oracle = false;
    double delta = 0.0;
    std::string eps_list;
    bool synthetic = false;
    std::string ou_path;

    const std::vector<std::pair<std::string, std::string>> subs{
        {"validate-noise", "OU autocovariance against theory (CSV + SVG)"},
        {"verify-covariance", "closed-form stationary covariance against the Lyapunov solve"},
        {"run-spde", "ensemble of the limiting SPDE"},
        {"run-full", "ensemble of the regularized full model"},
        {"decay-fit", "fit the coherent-field decay rate"},
        {"converge", "full model against the limit for decreasing eps"},
        {"expand-mu", "two-term mu expansion of the limiting coefficient"},
    };
    for (const auto& [name, help] : subs) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--workers", workers, "worker threads (0: default)");
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_flag("--oracle-check", oracle, "run-spde: compare against the closed-form solution");
        sub->add_option("--delta", delta, "override delta");
        sub->add_option("--eps-list", eps_list, "converge: comma-separated decreasing eps values");
        if (name == "decay-fit") sub->add_flag("--synthetic", synthetic, "fit exact coherent-field data");
        if (name == "validate-noise") sub->add_option("--ou-path", ou_path, "OUP1 file to check instead of sampling");
    }
    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        parax::CommandOptions opt;
        if (!config_path.empty()) opt.config = parax::load_config(config_path);
        if (sub->count("--seed")) opt.seed = seed;
        if (sub->count("--delta")) opt.delta = delta;
        if (sub->count("--eps-list")) opt.eps_list = parse_list(eps_list);
        opt.workers = workers;
        opt.out_dir = out_dir;
        opt.oracle_check = oracle;
        opt.synthetic = synthetic;
        opt.ou_path_file = ou_path;

        const parax::CommandResult r = parax::run_command(name, opt);
        for (const auto& c : r.checks)
            std::printf("%s %s value=%.6g tolerance=%.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                        c.tolerance);
        std::printf("manifest: %s/manifest.json\n", out_dir.c_str());
        return r.exit_code();
    } catch (const parax::StabilityError& e) {
        std::fprintf(stderr, "error: %s (step %.6g, bound %.6g)\n", e.what(), e.step(), e.bound());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
    }
    return 2;
}
