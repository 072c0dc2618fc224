#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kakeya/settings.hpp"

namespace kakeya {

// Parsed experiment configuration. The raw JSON is kept for the report echo.
struct ExperimentConfig {
    std::vector<Setting> settings;
    std::vector<double> delta_list; // strictly decreasing
    std::uint64_t seed = 0;         // explicit, no wall-clock defaults
    int workers = 1;
    std::string out_dir = "out";
    long long mc_samples = 200000;
    double exponent_tolerance = 0.15;
    std::string raw_json;
};

ExperimentConfig load_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// JSON (de)serialization of a Setting under the `setting` schema.
std::string setting_to_json_text(const Setting& setting);
Setting setting_from_json_text(const std::string& json_text);

struct RunReport {
    std::string subcommand;
    bool pass = false;
    std::string json_text;              // pretty, sorted keys, deterministic
    std::vector<std::string> artifacts; // every file the run wrote
    double wall_ms = 0;                 // reported separately, never in json_text
};

// Subcommands: axioms | maximal | dimension | bush | arith.
RunReport run(const ExperimentConfig& config, const std::string& subcommand);

// GridField persistence: flat binary array plus a JSON sidecar.
struct GridField;
void save_grid_field(const GridField& field, const std::string& bin_path,
                     const std::string& json_path);
GridField load_grid_field(const std::string& bin_path, const std::string& json_path);

} // namespace kakeya
