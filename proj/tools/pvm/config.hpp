#pragma once

// Scenario configuration: a flat `key = value` text format, one key per line,
// `#` starting a comment. Command-line `--set key=value` overrides win over
// the file. Every error message is anchored to the line or override that
// caused it.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pvm::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::string_view, 35> kKnownKeys = {
    "c",         "p",          "n",           "R",           "discounting", "k",
    "model",     "A",          "L",           "alpha_L",     "b",           "K0",
    "horizon",   "dt_out",     "gain",        "gamma",       "rate_f0",     "rate_f1",
    "share_speed", "sweep.variable", "sweep.from", "sweep.to", "sweep.steps", "sweep.mode",
    "seed",      "perturbation", "wealth",    "horizons",    "threshold",   "share_lo",
    "share_hi",  "dp_dt",      "dR_dt",       "dt",          "rate_step"};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool known_key(std::string_view key) {
    return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

}  // namespace detail

class ScenarioConfig {
public:
    struct Entry {
        std::string value;
        std::string origin;  // "path:line" or "--set[i]"
    };

    /// Parses config text. `source` names the file in error messages.
    static ScenarioConfig parse(std::string_view text, const std::string& source) {
        ScenarioConfig cfg;
        cfg.source_ = source;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t end = std::min(text.find('\n', pos), text.size());
            std::string_view line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = detail::trim(line);
            if (line.empty()) {
                if (end == text.size()) break;
                continue;
            }
            const std::string origin = source + ":" + std::to_string(line_no);
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigError(origin + ": expected 'key = value'");
            cfg.assign(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), origin, false);
            if (end == text.size()) break;
        }
        return cfg;
    }

    static ScenarioConfig load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError(path + ": cannot open config file");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    /// Applies a `key=value` override; the override wins over any file value.
    void apply_override(std::string_view assignment, std::size_t index) {
        const std::string origin = "--set[" + std::to_string(index) + "]";
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos) throw ConfigError(origin + ": expected key=value, got '" + std::string(assignment) + "'");
        assign(detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)), origin, true);
    }

    bool has(std::string_view key) const { return entries_.count(std::string(key)) != 0; }

    const std::string& source() const { return source_; }

    std::string origin(std::string_view key) const {
        const auto it = entries_.find(std::string(key));
        return it == entries_.end() ? source_ : it->second.origin;
    }

    std::optional<std::string> text(std::string_view key) const {
        const auto it = entries_.find(std::string(key));
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    std::optional<double> number(std::string_view key) const {
        const auto it = entries_.find(std::string(key));
        if (it == entries_.end()) return std::nullopt;
        return parse_double(it->second.value, it->second.origin, key);
    }

    double number_or(std::string_view key, double fallback) const { return number(key).value_or(fallback); }

    /// `why` explains the requirement, e.g. "required when discounting = hyperbolic".
    double require_number(std::string_view key, std::string_view why = {}) const {
        if (auto v = number(key)) return *v;
        throw missing(key, why);
    }

    std::string require_text(std::string_view key, std::string_view why = {}) const {
        if (auto v = text(key)) return *v;
        throw missing(key, why);
    }

    std::optional<std::int64_t> integer(std::string_view key) const {
        const auto it = entries_.find(std::string(key));
        if (it == entries_.end()) return std::nullopt;
        const std::string& s = it->second.value;
        std::int64_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw ConfigError(it->second.origin + ": key '" + std::string(key) + "' expects an integer, got '" + s + "'");
        return v;
    }

    std::vector<double> number_list(std::string_view key) const {
        std::vector<double> out;
        const auto it = entries_.find(std::string(key));
        if (it == entries_.end()) return out;
        std::string_view rest = it->second.value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string item(detail::trim(rest.substr(0, comma)));
            out.push_back(parse_double(item, it->second.origin, key));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    /// ConfigError anchored at `key`'s origin.
    ConfigError error_at(std::string_view key, const std::string& message) const {
        return ConfigError(origin(key) + ": " + std::string(key) + ": " + message);
    }

private:
    void assign(std::string_view key, std::string_view value, const std::string& origin, bool overriding) {
        if (key.empty()) throw ConfigError(origin + ": empty key");
        if (!detail::known_key(key)) throw ConfigError(origin + ": unknown key '" + std::string(key) + "'");
        const std::string k(key);
        if (!overriding) {
            if (auto it = entries_.find(k); it != entries_.end())
                throw ConfigError(origin + ": duplicate key '" + k + "' (first set at " + it->second.origin + ")");
        }
        entries_[k] = Entry{std::string(value), origin};
    }

    static double parse_double(const std::string& s, const std::string& origin, std::string_view key) {
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
            throw ConfigError(origin + ": key '" + std::string(key) + "' expects a number, got '" + s + "'");
        return v;
    }

    ConfigError missing(std::string_view key, std::string_view why) const {
        std::string msg = source_ + ": missing required key '" + std::string(key) + "'";
        if (!why.empty()) msg += " (" + std::string(why) + ")";
        return ConfigError(msg);
    }

    std::string source_ = "<config>";
    std::map<std::string, Entry> entries_;
};

}  // namespace pvm::cli
