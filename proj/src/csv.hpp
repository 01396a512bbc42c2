#pragma once

// Minimal numeric CSV reader shared by the table and cycle loaders.

#include <string>
#include <vector>

namespace fqlems::detail {

struct NumericCsv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a comma separated file whose first line is a header and whose
/// remaining non-blank lines are numbers. Throws ParseError naming the path.
NumericCsv read_numeric_csv(const std::string& path, const std::vector<std::string>& expected_header);

std::string trim(std::string_view text);

}  // namespace fqlems::detail
