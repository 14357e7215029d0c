#pragma once

// Flat key=value configuration text, one entry per line, # starts a comment.
// Kept deliberately schema-free; each consumer validates the values it reads.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace salca {

class ConfigFile {
  public:
    ConfigFile() = default;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Effective entries in first-appearance order (a repeated key keeps its
    // position but takes the last value). Used for manifest snapshots.
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  private:
    const std::string* find(const std::string& key) const;

    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace salca
