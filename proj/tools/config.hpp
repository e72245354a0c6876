#pragma once

#include "grushin/control.hpp"
#include "grushin/geometry.hpp"
#include "grushin/profiles.hpp"

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace grushin::cli {

struct ExperimentConfig {
    nlohmann::json raw;
    std::string text;

    ProfileSpec profile;
    std::optional<nlohmann::json> region_json;

    std::optional<double> T, dt, epsilon;
    double theta = 0.0;
    std::vector<double> nus;
    std::vector<int> k_list;
    int M = 10;
    int n_grid = 4000;
    std::vector<int> modes;
    std::string initial = "sine";
    int probe_count = 64;
    int N = 5;
    double margin = 0.01;
    double z0_offset = 0.01;
    int degree_factor = 2;
    bool richardson = true;
    std::vector<std::complex<double>> betas;
    int k_max = 8;
    double line_X = 8.0;
    int line_n = 4001;
    int ny = 256;
    int frames = 8;
    std::optional<std::pair<double, double>> strip;
};

// parse and validate; unknown keys raise ConfigError
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

DegeneracyProfile build_profile(const ExperimentConfig& c);
ControlRegion build_region(const ExperimentConfig& c, const DegeneracyProfile& p);

// initial mode profiles on the interior nodes of n_grid
std::map<int, std::vector<std::complex<double>>> initial_modes(const ExperimentConfig& c,
                                                               const DegeneracyProfile& p);

} // namespace grushin::cli
