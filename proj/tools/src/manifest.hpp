#pragma once

// Report plumbing for the CLI: every emitted artifact embeds a manifest
// describing the subcommand, effective configuration, seed, and digests of
// the inputs, so equal manifests imply byte-identical reports.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace salca::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::string file_digest(const std::string& path);  // hex fnv1a64, throws IoError

struct RunManifest {
    std::string subcommand;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, std::string>> input_digests;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
};

// Serializes a report with its manifest and writes it to path (or stdout
// when path is "-").
void write_report(const std::string& path, const RunManifest& manifest, nlohmann::json body);

}  // namespace salca::cli
