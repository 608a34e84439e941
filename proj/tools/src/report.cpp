#include "boresight/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "boresight/errors.hpp"

namespace boresight::cli {

bool valid_key(const std::string& key) {
    if (key.empty() || !(key[0] >= 'a' && key[0] <= 'z')) return false;
    return std::all_of(key.begin(), key.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
    });
}

std::string format_fixed(double v, int decimals) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : v < 0 ? "-inf" : "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
    return s;
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : v < 0 ? "-inf" : "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

void Report::set(const std::string& key, std::string value) {
    if (!valid_key(key)) throw InvalidArgument("invalid report key '" + key + "'");
    std::replace(value.begin(), value.end(), '\n', ' ');
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(key, std::move(value));
}

void Report::set(const std::string& key, double value, int decimals) { set(key, format_fixed(value, decimals)); }
void Report::set_number(const std::string& key, double value) { set(key, format_number(value)); }
void Report::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Report::set(const std::string& key, unsigned long long value) { set(key, std::to_string(value)); }
void Report::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void Report::add_row(std::string label, std::string value) { rows_.emplace_back(std::move(label), std::move(value)); }

void Report::write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
    if (rows_.empty()) return;
    std::size_t w = 0;
    for (const auto& r : rows_) w = std::max(w, r.first.size());
    out << "#\n";
    for (const auto& [label, value] : rows_) {
        out << "# " << label << std::string(w - label.size() + 2, ' ') << value << '\n';
    }
}

std::map<std::string, std::string> parse_report(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", n);
        std::string key = line.substr(0, eq);
        if (!valid_key(key)) throw ParseError("invalid key '" + key + "'", n);
        if (!out.emplace(std::move(key), line.substr(eq + 1)).second) throw ParseError("duplicate key", n);
    }
    return out;
}

std::map<std::string, std::string> parse_report(const std::string& text) {
    std::istringstream is(text);
    return parse_report(is);
}

}  // namespace boresight::cli
