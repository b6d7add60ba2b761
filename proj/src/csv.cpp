#include "qchain/csv.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace qchain {

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.11e", value);
    return buffer;
}

double parse_double(const std::string& text) {
    size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    while (consumed < text.size() && std::isspace(static_cast<unsigned char>(text[consumed]))) {
        ++consumed;
    }
    if (consumed != text.size()) throw std::invalid_argument("malformed number: " + text);
    return value;
}

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

double CsvTable::value(size_t row, const std::string& name) const {
    const int col = column(name);
    if (col < 0) throw std::invalid_argument("no such column: " + name);
    if (row >= rows.size()) throw std::invalid_argument("row index out of range");
    return parse_double(rows[row][static_cast<size_t>(col)]);
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            table.comments.push_back(line);
            continue;
        }
        if (!have_header) {
            table.header = split_cells(line);
            have_header = true;
            continue;
        }
        std::vector<std::string> cells = split_cells(line);
        if (cells.size() != table.header.size()) {
            throw std::invalid_argument("row width does not match header");
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::invalid_argument("cannot open CSV file: " + path);
    return read_csv(file);
}

}  // namespace qchain
