#pragma once

/// Flat `key = value` configuration files (UTF-8, '#' comments). Parse errors
/// carry the file name and line number.

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qtm {

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        KeyValueConfig cfg;
        cfg.source_ = path;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string stripped = strip(strip_comment(line));
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
            const std::string key = strip(stripped.substr(0, eq));
            const std::string value = strip(stripped.substr(eq + 1));
            if (key.empty())
                throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
            if (cfg.values_.count(key))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            cfg.values_[key] = {value, lineno};
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    void set(const std::string& key, const std::string& value) { values_[key] = {value, 0}; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        touch(key);
        return it->second.text;
    }

    std::string require_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
        touch(key);
        return it->second.text;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        touch(key);
        return parse_double(it->first, it->second);
    }

    double require_double(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
        touch(key);
        return parse_double(it->first, it->second);
    }

    long get_long(const std::string& key, long fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        touch(key);
        try {
            std::size_t pos = 0;
            const long v = std::stol(it->second.text, &pos);
            if (pos != it->second.text.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError(located(it->first, it->second) + ": expected an integer, got '" +
                              it->second.text + "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        touch(key);
        const std::string& v = it->second.text;
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ConfigError(located(it->first, it->second) + ": expected a boolean, got '" + v + "'");
    }

    /// Keys never read back; used to reject typos after a mode has consumed
    /// its parameters.
    std::vector<std::string> unused_keys() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

    void reject_unused() const {
        const auto keys = unused_keys();
        if (keys.empty()) return;
        std::ostringstream msg;
        msg << source_ << ": unknown key";
        if (keys.size() > 1) msg << "s";
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto it = values_.find(keys[i]);
            msg << (i ? ", '" : " '") << keys[i] << "' (line " << it->second.line << ")";
        }
        throw ConfigError(msg.str());
    }

    const std::string& source() const { return source_; }

private:
    struct Entry {
        std::string text;
        int line = 0;
    };

    static std::string strip_comment(const std::string& s) {
        const auto pos = s.find('#');
        return pos == std::string::npos ? s : s.substr(0, pos);
    }

    static std::string strip(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    std::string located(const std::string& key, const Entry& e) const {
        return source_ + ":" + std::to_string(e.line) + ": key '" + key + "'";
    }

    double parse_double(const std::string& key, const Entry& e) const {
        try {
            std::size_t pos = 0;
            const double v = std::stod(e.text, &pos);
            if (pos != e.text.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            if (e.text == "-inf") return -std::numeric_limits<double>::infinity();
            throw ConfigError(located(key, e) + ": expected a number, got '" + e.text + "'");
        }
    }

    void touch(const std::string& key) const { used_.insert(key); }

    std::string source_ = "<config>";
    std::map<std::string, Entry> values_;
    mutable std::set<std::string> used_;
};

} // namespace qtm
