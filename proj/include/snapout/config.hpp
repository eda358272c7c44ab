#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "snapout/error.hpp"

namespace snapout {

// INI-style experiment configuration: [section] headers, key = value lines,
// '#' comments, repeated keys allowed. Section and key lookup is
// case-sensitive; order is preserved.
class Config {
public:
    static Config parse(std::istream& in, std::string source_name = "<stream>") {
        Config cfg;
        cfg.source_ = std::move(source_name);
        std::string line, section;
        std::ostringstream raw;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            raw << line << '\n';
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) +
                                      ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                cfg.touch_section(section);
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            cfg.entries_.push_back(
                {section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
        }
        cfg.raw_ = raw.str();
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path);
        return parse(in, path);
    }

    static Config parse_string(const std::string& text, std::string source_name = "<string>") {
        std::istringstream in(text);
        return parse(in, std::move(source_name));
    }

    const std::string& raw_text() const { return raw_; }

    bool has(const std::string& section, const std::string& key) const {
        return find(section, key) != nullptr;
    }

    bool has_section(const std::string& section) const {
        return std::find(sections_.begin(), sections_.end(), section) != sections_.end();
    }

    std::vector<std::string> section_names() const { return sections_; }

    std::string get(const std::string& section, const std::string& key) const {
        const std::string* v = find(section, key);
        if (!v) throw ConfigError("missing config key [" + section + "] " + key);
        return *v;
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        const std::string* v = find(section, key);
        return v ? *v : fallback;
    }

    std::vector<std::string> get_all(const std::string& section, const std::string& key) const {
        std::vector<std::string> out;
        for (const Entry& e : entries_)
            if (e.section == section && e.key == key) out.push_back(e.value);
        return out;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(get(section, key), section, key);
    }

    double get_double_or(const std::string& section, const std::string& key, double fallback) const {
        const std::string* v = find(section, key);
        if (!v || *v == "auto") return fallback;
        return to_double(*v, section, key);
    }

    long get_long_or(const std::string& section, const std::string& key, long fallback) const {
        const std::string* v = find(section, key);
        if (!v || *v == "auto") return fallback;
        return static_cast<long>(to_double(*v, section, key));
    }

    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        const std::string* v = find(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError("config key [" + section + "] " + key + " is not a boolean: " + *v);
    }

    std::optional<double> get_optional_double(const std::string& section,
                                              const std::string& key) const {
        const std::string* v = find(section, key);
        if (!v || *v == "auto" || v->empty()) return std::nullopt;
        return to_double(*v, section, key);
    }

    // Whitespace-separated list of numbers.
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const {
        std::istringstream in(get(section, key));
        std::vector<double> out;
        double v;
        while (in >> v) out.push_back(v);
        return out;
    }

private:
    struct Entry {
        std::string section, key, value;
    };

    static std::string trim(std::string s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        return s;
    }

    double to_double(const std::string& s, const std::string& section, const std::string& key) const {
        if (s == "inf") return std::numeric_limits<double>::infinity();
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ConfigError("config key [" + section + "] " + key + " is not a number: " + s);
        return v;
    }

    const std::string* find(const std::string& section, const std::string& key) const {
        for (const Entry& e : entries_)
            if (e.section == section && e.key == key) return &e.value;
        return nullptr;
    }

    void touch_section(const std::string& s) {
        if (!has_section(s)) sections_.push_back(s);
    }

    std::vector<Entry> entries_;
    std::vector<std::string> sections_;
    std::string raw_;
    std::string source_;
};

}  // namespace snapout
