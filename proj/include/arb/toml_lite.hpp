#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "arb/errors.hpp"

namespace arb {

// Reader for the TOML subset the run configs use: [section] headers (dotted
// names allowed), `key = value` pairs, # comments, and single-line arrays.
// Values: quoted strings, integers, floats, booleans.
class TomlLite {
public:
    using Value = std::variant<std::string, std::int64_t, double, bool,
                               std::vector<std::string>, std::vector<double>>;

    static TomlLite parse_file(const std::string& path);
    static TomlLite parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& key) const;
    std::vector<double> get_double_array(const std::string& key) const;

    std::string require_string(const std::string& key) const;

    const std::map<std::string, Value>& entries() const { return values_; }

private:
    std::map<std::string, Value> values_;
};

// FNV-1a 64-bit of the raw bytes, as a 16-hex-digit string.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace arb
