#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace grushin::cli {

// header row, then %.17g values
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string sha256_hex(const std::string& bytes);

struct Manifest {
    std::string command;
    std::string config_hash;
    unsigned long long seed = 0;
    int threads = 1;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    std::vector<std::string> outputs;
    void write(const std::filesystem::path& dir) const;
};

} // namespace grushin::cli
