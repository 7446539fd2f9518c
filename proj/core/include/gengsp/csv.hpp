#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gengsp::csv {

using Row = std::vector<std::string>;

struct Record {
    Row fields;
    std::size_t line = 0;

    const std::string& operator[](std::size_t i) const { return fields[i]; }
};

/// Reads a header-led CSV. The header must equal `expected` exactly (after
/// trimming). Blank lines are skipped; every data row must have the header's
/// column count. Throws ParseError with the line number on violation.
std::vector<Record> read(std::istream& in, const std::vector<std::string>& expected);

double to_double(const std::string& field, std::size_t line);
long long to_integer(const std::string& field, std::size_t line);

/// 17 significant digits, enough for a lossless double round trip.
std::string format(double value);

void write_header(std::ostream& out, const std::vector<std::string>& columns);

}  // namespace gengsp::csv
