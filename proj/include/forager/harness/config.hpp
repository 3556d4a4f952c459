#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace forager::harness {

// Flat key=value configuration. '#' starts a comment; blank lines are
// ignored; anything else without '=' is rejected with its line number.
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_str(const std::string& key, const std::string& fallback) const;
    long get_int(const std::string& key, long fallback) const;
    double get_real(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

} // namespace forager::harness
