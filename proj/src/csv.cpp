#include "cumfolio/csv.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "cumfolio/errors.hpp"

namespace cumfolio::csv {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string token;
    for (char ch : line) {
        if (ch == delim) {
            fields.push_back(token);
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    fields.push_back(token);
    return fields;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, const std::string& context) {
    const std::string t = trim(field);
    if (t.empty()) {
        throw MalformedRowError("empty numeric field in " + context);
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') {
        throw MalformedRowError("unparseable number '" + t + "' in " + context);
    }
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool looks_like_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace cumfolio::csv
