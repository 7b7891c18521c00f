#pragma once

#include <string>
#include <vector>

namespace nsmc {

// A rendered result table: all cells are preformatted strings so every
// output format prints the same digits.
struct ReportTable {
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180 CSV: fields containing a comma, quote, CR or LF are quoted and
// embedded quotes doubled; rows end with '\n'.  The title is not emitted
// (it belongs in the file name or surrounding document).
std::string to_csv(const ReportTable& table);

// GitHub-style pipe table preceded by the title as a heading.
std::string to_markdown(const ReportTable& table);

// One JSON object per row, keys taken from the header in order.
std::string to_json_lines(const ReportTable& table);

// Fixed-point decimal rendering, locale-independent.
std::string format_fixed(double value, int precision = 4);

}  // namespace nsmc
