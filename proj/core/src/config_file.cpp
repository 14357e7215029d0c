#include "salca/config_file.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "salca/errors.hpp"

namespace salca {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failure on config file: " + path);
    }
    try {
        return parse_text(buf.str());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

ConfigFile ConfigFile::parse_text(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw FormatError("line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw FormatError("line " + std::to_string(lineno) + ": empty key");
        }
        bool replaced = false;
        for (auto& entry : cfg.entries_) {
            if (entry.first == key) {
                entry.second = value;
                replaced = true;
                break;
            }
        }
        if (!replaced) {
            cfg.entries_.emplace_back(key, value);
        }
    }
    return cfg;
}

const std::string* ConfigFile::find(const std::string& key) const {
    for (const auto& entry : entries_) {
        if (entry.first == key) {
            return &entry.second;
        }
    }
    return nullptr;
}

bool ConfigFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigFile::get_string(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) {
        throw FormatError("missing config key: " + key);
    }
    return *v;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) {
            throw FormatError("");
        }
        return v;
    } catch (const std::exception&) {
        throw FormatError("config key " + key + " is not a number: " + raw);
    }
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(raw, &used);
        if (used != raw.size()) {
            throw FormatError("");
        }
        return v;
    } catch (const std::exception&) {
        throw FormatError("config key " + key + " is not an integer: " + raw);
    }
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigFile::get_uint(const std::string& key) const {
    const std::int64_t v = get_int(key);
    if (v < 0) {
        throw FormatError("config key " + key + " must be non-negative");
    }
    return static_cast<std::uint64_t>(v);
}

std::uint64_t ConfigFile::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const std::string raw = get_string(key);
    if (raw == "true" || raw == "1" || raw == "on" || raw == "yes") {
        return true;
    }
    if (raw == "false" || raw == "0" || raw == "off" || raw == "no") {
        return false;
    }
    throw FormatError("config key " + key + " is not a boolean: " + raw);
}

}  // namespace salca
