#ifndef CUMFOLIO_CSV_HPP
#define CUMFOLIO_CSV_HPP

#include <string>
#include <vector>

namespace cumfolio::csv {

std::vector<std::string> split(const std::string& line, char delim = ',');

std::string trim(const std::string& s);

/// Parse a decimal number; throws MalformedRowError naming `context`.
double parse_double(const std::string& field, const std::string& context);

/// Shortest-round-trip style formatting ("%.17g"); reruns of the same
/// pipeline therefore produce byte-identical files.
std::string format_double(double v);

/// True for strings shaped like an ISO-8601 calendar date (YYYY-MM-DD).
bool looks_like_iso_date(const std::string& s);

}  // namespace cumfolio::csv

#endif  // CUMFOLIO_CSV_HPP
