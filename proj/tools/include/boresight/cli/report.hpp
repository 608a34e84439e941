#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace boresight::cli {

/// Flat run report. Serialized as `key=value` lines followed by a human table
/// whose lines start with '#'. Keys match [a-z][a-z0-9_.]*; values run to the
/// end of the line.
class Report {
public:
    void set(const std::string& key, std::string value);
    void set(const std::string& key, double value, int decimals);
    void set_number(const std::string& key, double value);  ///< shortest round-trip form
    void set(const std::string& key, long long value);
    void set(const std::string& key, unsigned long long value);
    void set(const std::string& key, bool value);

    void add_row(std::string label, std::string value);

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
    void write(std::ostream& out) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::pair<std::string, std::string>> rows_;
};

/// Parses the report grammar. Blank and '#' lines are skipped; anything else
/// must be `key=value` with a valid, unique key. Throws ParseError.
std::map<std::string, std::string> parse_report(std::istream& in);
std::map<std::string, std::string> parse_report(const std::string& text);

bool valid_key(const std::string& key);
std::string format_fixed(double v, int decimals);
std::string format_number(double v);

}  // namespace boresight::cli
