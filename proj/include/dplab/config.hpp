#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dplab {

/// Flat key = value file. `[section]` headers prefix the following keys as
/// "section.key". Values are numbers, true/false, "strings" or [lists].
class Config {
public:
    struct Entry {
        std::string raw;  ///< value text as written (trimmed)
        int line = 0;
    };

    static Config parse(const std::string& text, const std::string& source = "<config>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::string source() const { return source_; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::int64_t> get_ints(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& raw) { entries_[key] = {raw, 0}; }

    /// Keys sorted, one "key = value" per line.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    const Entry& find(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    std::string source_;
    std::map<std::string, Entry> entries_;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t x);

}  // namespace dplab
