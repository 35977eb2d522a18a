#include "arb/toml_lite.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace arb {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Removes a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        else if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool looks_like_int(const std::string& s) {
    size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

TomlLite::Value parse_scalar(const std::string& raw, const std::string& where) {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
        return raw.substr(1, raw.size() - 2);
    if (raw == "true") return true;
    if (raw == "false") return false;
    if (looks_like_int(raw)) {
        try {
            return static_cast<std::int64_t>(std::stoll(raw));
        } catch (const std::exception&) {
            throw ConfigError(where + ": bad integer '" + raw + "'");
        }
    }
    try {
        size_t used = 0;
        double v = std::stod(raw, &used);
        if (used == raw.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(where + ": cannot parse value '" + raw + "'");
}

std::vector<std::string> split_array_items(const std::string& body, const std::string& where) {
    std::vector<std::string> items;
    std::string cur;
    bool in_string = false;
    for (char c : body) {
        if (c == '"') {
            in_string = !in_string;
            cur += c;
        } else if (c == ',' && !in_string) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_string) throw ConfigError(where + ": unterminated string in array");
    std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    return items;
}

}  // namespace

TomlLite TomlLite::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

TomlLite TomlLite::parse(const std::string& text, const std::string& origin) {
    TomlLite doc;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string raw = trim(line.substr(eq + 1));
        if (key.empty() || raw.empty()) throw ConfigError(where + ": expected key = value");
        if (!section.empty()) key = section + "." + key;
        if (doc.values_.count(key)) throw ConfigError(where + ": duplicate key " + key);

        if (raw.front() == '[') {
            if (raw.back() != ']') throw ConfigError(where + ": arrays must be single-line");
            auto items = split_array_items(raw.substr(1, raw.size() - 2), where);
            bool all_strings = !items.empty();
            for (const auto& it : items)
                if (it.empty() || it.front() != '"') all_strings = false;
            if (all_strings) {
                std::vector<std::string> vals;
                for (const auto& it : items)
                    vals.push_back(std::get<std::string>(parse_scalar(it, where)));
                doc.values_[key] = std::move(vals);
            } else {
                std::vector<double> vals;
                for (const auto& it : items) {
                    Value v = parse_scalar(it, where);
                    if (std::holds_alternative<double>(v)) vals.push_back(std::get<double>(v));
                    else if (std::holds_alternative<std::int64_t>(v))
                        vals.push_back(static_cast<double>(std::get<std::int64_t>(v)));
                    else throw ConfigError(where + ": mixed array types");
                }
                doc.values_[key] = std::move(vals);
            }
        } else {
            doc.values_[key] = parse_scalar(raw, where);
        }
    }
    return doc;
}

std::string TomlLite::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (!std::holds_alternative<std::string>(it->second))
        throw ConfigError(key + " must be a string");
    return std::get<std::string>(it->second);
}

std::string TomlLite::require_string(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing required config key: " + key);
    return get_string(key, "");
}

std::int64_t TomlLite::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (!std::holds_alternative<std::int64_t>(it->second))
        throw ConfigError(key + " must be an integer");
    return std::get<std::int64_t>(it->second);
}

double TomlLite::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (std::holds_alternative<std::int64_t>(it->second))
        return static_cast<double>(std::get<std::int64_t>(it->second));
    if (!std::holds_alternative<double>(it->second))
        throw ConfigError(key + " must be a number");
    return std::get<double>(it->second);
}

bool TomlLite::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (!std::holds_alternative<bool>(it->second))
        throw ConfigError(key + " must be a boolean");
    return std::get<bool>(it->second);
}

std::vector<std::string> TomlLite::get_string_array(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    if (!std::holds_alternative<std::vector<std::string>>(it->second))
        throw ConfigError(key + " must be an array of strings");
    return std::get<std::vector<std::string>>(it->second);
}

std::vector<double> TomlLite::get_double_array(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    if (!std::holds_alternative<std::vector<double>>(it->second))
        throw ConfigError(key + " must be an array of numbers");
    return std::get<std::vector<double>>(it->second);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace arb
