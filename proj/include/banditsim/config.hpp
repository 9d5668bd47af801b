#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace banditsim {

// Flat `key = value` configuration file. `#` starts a comment, blank lines
// are skipped. Typed getters mark keys as consumed; finish() rejects any key
// that was never consumed so misspelled options fail loudly instead of being
// silently ignored.
class ConfigMap {
public:
    static ConfigMap from_file(const std::string& path);
    static ConfigMap from_string(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback);
    std::string require_string(const std::string& key);
    long get_long(const std::string& key, long fallback);
    double get_double(const std::string& key, double fallback);
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback);

    // Throws listing every key that no getter touched.
    void finish() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

}  // namespace banditsim
