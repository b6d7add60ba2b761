// csv.hpp — deterministic CSV formatting and a small reader for round-trips.
//
// Numbers are written as %.17g-free fixed-format scientific with 12
// significant digits so identical configs produce byte-identical files.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qchain {

// Scientific notation with 12 significant digits, e.g. -2.50000000000e-01.
std::string format_double(double value);

double parse_double(const std::string& text);

struct CsvTable {
    std::vector<std::string> comments;               // '#'-prefixed lines, in order
    std::vector<std::string> header;                 // column names
    std::vector<std::vector<std::string>> rows;      // raw cells

    int column(const std::string& name) const;       // -1 when absent
    double value(size_t row, const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace qchain
