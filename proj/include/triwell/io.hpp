#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "triwell/types.hpp"

namespace triwell::io {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(a, b - a + 1));
}

inline double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument(what + ": not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw InvalidArgument(what + ": not a number: '" + s + "'");
    return v;
}

} // namespace detail

/// "start:stop:step" (stop included when within half a step) or a single value.
inline std::vector<double> parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(detail::trim(item));
    if (!text.empty() && text.back() == ':') parts.emplace_back();
    if (parts.size() == 1) return {detail::parse_double(parts[0], "range")};
    if (parts.size() != 3) throw InvalidArgument("range: expected start:stop:step, got '" + text + "'");

    const double start = detail::parse_double(parts[0], "range start");
    const double stop = detail::parse_double(parts[1], "range stop");
    const double step = detail::parse_double(parts[2], "range step");
    if (!(step > 0.0)) throw InvalidArgument("range: step must be positive");
    if (stop < start) throw InvalidArgument("range: stop precedes start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5));
    std::vector<double> out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

/// Round-trip-safe formatting (17 significant digits).
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw InvalidArgument("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt(values[i]);
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::size_t columns_;
    std::ostringstream out_;
};

/// Writes to a sibling temporary and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InvalidArgument("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw InvalidArgument("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InvalidArgument("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

/// key=value lines; '#' starts a comment. Keys are the long flag names.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = detail::trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(key, detail::trim(t.substr(eq + 1)));
    }
    return out;
}

inline std::vector<std::pair<std::string, std::string>> parse_config_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot read config file " + path.string());
    return parse_config(f);
}

} // namespace triwell::io
