#include "dplab/config.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dplab/errors.hpp"

namespace dplab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Drops a trailing # comment that is not inside quotes.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"') quoted = !quoted;
        if (s[k] == '#' && !quoted) return s.substr(0, k);
    }
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
    }
    return true;
}

std::vector<std::string> split_list(const std::string& raw, bool& ok) {
    ok = raw.size() >= 2 && raw.front() == '[' && raw.back() == ']';
    std::vector<std::string> out;
    if (!ok) return out;
    const std::string body = trim(raw.substr(1, raw.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

bool parse_double(const std::string& s, double& x) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (*b == '+') ++b;
    const auto r = std::from_chars(b, e, x);
    return r.ec == std::errc() && r.ptr == e;
}

bool parse_int(const std::string& s, std::int64_t& x) {
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

Config Config::parse(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.source_ = source;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int no = 0;
    while (std::getline(ss, line)) {
        ++no;
        const std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        const std::string where = source + ":" + std::to_string(no) + ": ";
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(where + "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!valid_key(section)) throw ConfigError(where + "invalid section name '" + section + "'");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where + "invalid key '" + key + "'");
        if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(full)) throw ConfigError(where + "duplicate key '" + full + "'");
        if (value.front() == '"' && (value.size() < 2 || value.back() != '"')) {
            throw ConfigError(where + "unterminated string for '" + full + "'");
        }
        cfg.entries_[full] = {value, no};
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const Config::Entry& Config::find(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(source_ + ": missing required field '" + key + "'");
    return it->second;
}

void Config::fail(const std::string& key, const std::string& what) const {
    const Entry& e = find(key);
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": field '" + key + "' " + what + " (got " + e.raw + ")");
}

std::string Config::get_string(const std::string& key) const {
    const std::string& raw = find(key).raw;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return raw.substr(1, raw.size() - 2);
    return raw;
}

double Config::get_double(const std::string& key) const {
    double x = 0.0;
    if (!parse_double(find(key).raw, x)) fail(key, "must be a number");
    return x;
}

std::int64_t Config::get_int(const std::string& key) const {
    std::int64_t x = 0;
    if (!parse_int(find(key).raw, x)) fail(key, "must be an integer");
    return x;
}

std::uint64_t Config::get_uint(const std::string& key) const {
    const std::string& raw = find(key).raw;
    std::uint64_t x = 0;
    const auto r = std::from_chars(raw.data(), raw.data() + raw.size(), x);
    if (r.ec != std::errc() || r.ptr != raw.data() + raw.size()) fail(key, "must be a non-negative integer");
    return x;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& raw = find(key).raw;
    if (raw == "true") return true;
    if (raw == "false") return false;
    fail(key, "must be true or false");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    bool ok = false;
    const auto items = split_list(find(key).raw, ok);
    if (!ok) fail(key, "must be a list [a, b, ...]");
    std::vector<double> out;
    for (const auto& s : items) {
        double x = 0.0;
        // Allow exact reciprocals such as 1/16.
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            double a = 0.0;
            double b = 0.0;
            if (!parse_double(trim(s.substr(0, slash)), a) || !parse_double(trim(s.substr(slash + 1)), b) || b == 0.0) {
                fail(key, "has a malformed list entry '" + s + "'");
            }
            x = a / b;
        } else if (!parse_double(s, x)) {
            fail(key, "has a malformed list entry '" + s + "'");
        }
        out.push_back(x);
    }
    return out;
}

std::vector<std::int64_t> Config::get_ints(const std::string& key) const {
    bool ok = false;
    const auto items = split_list(find(key).raw, ok);
    if (!ok) fail(key, "must be a list [a, b, ...]");
    std::vector<std::int64_t> out;
    for (const auto& s : items) {
        std::int64_t x = 0;
        if (!parse_int(s, x)) fail(key, "has a malformed list entry '" + s + "'");
        out.push_back(x);
    }
    return out;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}
double Config::get_double(const std::string& key, double fallback) const { return has(key) ? get_double(key) : fallback; }
std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}
std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}
bool Config::get_bool(const std::string& key, bool fallback) const { return has(key) ? get_bool(key) : fallback; }

std::string Config::canonical() const {
    std::string s;
    for (const auto& [k, e] : entries_) s += k + " = " + e.raw + "\n";
    return s;
}

std::string Config::hash() const { return hex64(fnv1a64(canonical())); }

}  // namespace dplab
