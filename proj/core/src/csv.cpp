#include "gengsp/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "gengsp/error.hpp"

namespace gengsp::csv {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

Row split(const std::string& line) {
    Row fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

std::vector<Record> read(std::istream& in, const std::vector<std::string>& expected) {
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::vector<Record> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        Row fields = split(line);
        if (!have_header) {
            if (fields != expected) {
                std::string want;
                for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
                throw Error(ErrorCode::ParseError,
                            "line " + std::to_string(lineno) + ": expected header `" + want + "`");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != expected.size())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                                   std::to_string(expected.size()) + " fields");
        rows.push_back(Record{std::move(fields), lineno});
    }
    if (!have_header) throw Error(ErrorCode::ParseError, "empty file, missing header");
    return rows;
}

double to_double(const std::string& field, std::size_t line) {
    // strtod accepts the full range of formats we emit, including exponents.
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v))
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ": not a finite number `" + field + "`");
    return v;
}

long long to_integer(const std::string& field, std::size_t line) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ": not an integer `" + field + "`");
    return v;
}

std::string format(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_header(std::ostream& out, const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
}

}  // namespace gengsp::csv
