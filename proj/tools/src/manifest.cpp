#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "salca/errors.hpp"

namespace salca::cli {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open input for digest: " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failure while digesting: " + path);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string(buf);
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : config) {
        cfg[k] = v;
    }
    j["config"] = cfg;
    nlohmann::json digests = nlohmann::json::object();
    for (const auto& [k, v] : input_digests) {
        digests[k] = v;
    }
    j["input_digests"] = digests;
    j["outputs"] = outputs;
    return j;
}

void write_report(const std::string& path, const RunManifest& manifest, nlohmann::json body) {
    body["manifest"] = manifest.to_json();
    const std::string text = body.dump(2) + "\n";
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open report for writing: " + path);
    }
    out << text;
    if (!out) {
        throw IoError("write failure on report: " + path);
    }
}

}  // namespace salca::cli
