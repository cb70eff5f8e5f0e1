#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace recloss {

// Flat key-value experiment configuration. Keys carry a section prefix
// ("train.lr", "loss.family", ...), values are plain strings. The on-disk
// format is one "key = value" pair per line, '#' starts a comment. Emission
// is sorted by key, so parse -> emit -> parse is the identity.
class Config {
public:
    Config() = default;

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    std::string emit() const;
    void save(const std::string& path) const;

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::int64_t get_int(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

    // Throws if any key is outside `allowed`. Used by commands to reject
    // misspelled keys before any compute happens.
    void require_known_keys(const std::vector<std::string>& allowed) const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace recloss
