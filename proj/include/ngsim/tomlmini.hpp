#pragma once

#include <cctype>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ngsim/errors.hpp"

namespace ngsim::tomlmini {

// Minimal TOML-subset reader: [tables], key = value with strings,
// numbers, booleans, and flat arrays. Enough for declarative experiment
// configs while staying diff-friendly and golden-testable.

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<bool, long long, double, std::string, Array> data;

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }

    bool as_bool() const {
        if (auto* b = std::get_if<bool>(&data)) return *b;
        throw ConfigError("config: expected a boolean");
    }
    long long as_int() const {
        if (auto* i = std::get_if<long long>(&data)) return *i;
        throw ConfigError("config: expected an integer");
    }
    double as_double() const {
        if (auto* d = std::get_if<double>(&data)) return *d;
        if (auto* i = std::get_if<long long>(&data)) return static_cast<double>(*i);
        throw ConfigError("config: expected a number");
    }
    const std::string& as_string() const {
        if (auto* s = std::get_if<std::string>(&data)) return *s;
        throw ConfigError("config: expected a string");
    }
    const Array& as_array() const {
        if (auto* a = std::get_if<Array>(&data)) return *a;
        throw ConfigError("config: expected an array");
    }
};

using Table = std::map<std::string, Value>;
using Document = std::map<std::string, Table>;  // "" = top-level table

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return s.substr(lo, hi - lo);
}

inline std::string drop_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

Value parse_value(const std::string& raw, int line_no);

inline Array parse_array(const std::string& raw, int line_no) {
    Array items;
    std::string current;
    bool in_string = false;
    int depth = 0;
    for (char c : raw) {
        if (c == '"') in_string = !in_string;
        if (!in_string) {
            if (c == '[') {
                if (depth++ == 0) continue;
            } else if (c == ']') {
                if (--depth == 0) break;
            } else if (c == ',' && depth == 1) {
                if (!strip(current).empty()) items.push_back(parse_value(strip(current), line_no));
                current.clear();
                continue;
            }
        }
        if (depth >= 1) current += c;
    }
    if (!strip(current).empty()) items.push_back(parse_value(strip(current), line_no));
    return items;
}

inline Value parse_value(const std::string& raw, int line_no) {
    if (raw.empty()) throw ConfigError("config: empty value at line " + std::to_string(line_no));
    if (raw.front() == '[') return Value{parse_array(raw, line_no)};
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            throw ConfigError("config: unterminated string at line " + std::to_string(line_no));
        std::string out;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            if (raw[i] == '\\' && i + 2 < raw.size()) {
                ++i;
                switch (raw[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: out += raw[i];
                }
            } else {
                out += raw[i];
            }
        }
        return Value{out};
    }
    if (raw == "true") return Value{true};
    if (raw == "false") return Value{false};
    try {
        std::size_t used = 0;
        if (raw.find('.') == std::string::npos && raw.find('e') == std::string::npos &&
            raw.find('E') == std::string::npos) {
            const long long i = std::stoll(raw, &used);
            if (used == raw.size()) return Value{i};
        }
        const double d = std::stod(raw, &used);
        if (used == raw.size()) return Value{d};
    } catch (const std::exception&) {
    }
    throw ConfigError("config: cannot parse value '" + raw + "' at line " +
                      std::to_string(line_no));
}

} // namespace detail

inline Document parse(const std::string& text) {
    Document doc;
    std::string table;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = detail::strip(detail::drop_comment(
            text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos)));
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: bad table header at line " + std::to_string(line_no));
            table = detail::strip(line.substr(1, line.size() - 2));
            doc[table];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(line_no));
        const std::string key = detail::strip(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config: empty key at line " + std::to_string(line_no));
        if (doc[table].count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        doc[table][key] = detail::parse_value(detail::strip(line.substr(eq + 1)), line_no);
    }
    return doc;
}

} // namespace ngsim::tomlmini
