#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fqlems/errors.hpp"

namespace fqlems::detail {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
    return value;
}

}  // namespace

NumericCsv read_numeric_csv(const std::string& path, const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);

    NumericCsv csv;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(trim(line));
        if (!have_header) {
            if (cells != expected_header) {
                std::string want;
                for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
                throw ParseError(path + ": expected header '" + want + "'");
            }
            csv.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != expected_header.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(expected_header.size()) + " columns");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_number(c, path, line_no));
        csv.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(path + ": empty file");
    if (csv.rows.empty()) throw ParseError(path + ": no data rows");
    return csv;
}

}  // namespace fqlems::detail
