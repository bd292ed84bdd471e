// manifest.cpp - run manifests and SHA-256 hashing

#include "bathsmith/manifest.hpp"

#include <cstdio>

#include <json.hpp>
#include <openssl/evp.h>

#include "bathsmith/error.hpp"
#include "bathsmith/model_io.hpp"

namespace bathsmith {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericError("SHA-256 computation failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

void RunManifest::add_input(const std::filesystem::path& path) {
    for (const auto& [p, h] : inputs)
        if (p == path.string()) return;
    inputs.emplace_back(path.string(), sha256_file(path));
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["command_line"] = command_line;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [p, h] : inputs) in.push_back({{"path", p}, {"sha256", h}});
    j["seeds"] = seeds;
    j["wall_time_s"] = wall_time_s;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

} // namespace bathsmith
