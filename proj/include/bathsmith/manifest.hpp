// manifest.hpp - Per-run record of inputs, seeds, timing and outputs

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace bathsmith {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
    std::string tool_version;
    std::vector<std::string> command_line;
    std::vector<std::pair<std::string, std::string>> inputs; // path, sha256
    std::vector<std::uint64_t> seeds;
    double wall_time_s = 0.0;
    std::vector<std::string> outputs;

    void add_input(const std::filesystem::path& path);
    std::string to_json() const;
};

} // namespace bathsmith
