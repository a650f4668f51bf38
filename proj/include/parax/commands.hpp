#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parax/config.hpp"

namespace parax {

struct CommandOptions {
    RunConfig config;
    std::optional<std::uint64_t> seed;           ///< overrides [run] master_seed
    int workers = 0;                             ///< 0: OpenMP default
    std::string out_dir = "out";
    bool oracle_check = false;
    std::optional<double> delta;                 ///< overrides the config delta
    std::optional<std::vector<double>> eps_list; ///< overrides [converge] eps_list
    bool synthetic = false;                      ///< decay-fit on exact coherent-field data
    std::string ou_path_file;                    ///< validate-noise: check this OUP1 dump instead of sampling
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

struct CommandResult {
    std::vector<CheckResult> checks;
    nlohmann::json manifest;

    bool all_pass() const;
    std::vector<std::string> failures() const;
    /// 0 iff every check passed.
    int exit_code() const { return all_pass() ? 0 : 1; }
};

const std::vector<std::string>& command_names();

/// Run one subcommand, writing its artifacts and manifest.json into out_dir.
/// Domain, stability and configuration problems propagate as exceptions.
CommandResult run_command(const std::string& name, const CommandOptions& opt);

}  // namespace parax
