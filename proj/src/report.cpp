#include "nsmc/report.hpp"

#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace nsmc {

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

void append_csv_field(std::string& out, const std::string& field) {
    if (!needs_quoting(field)) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void append_csv_row(std::string& out, const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out += ',';
        append_csv_field(out, row[i]);
    }
    out += '\n';
}

}  // namespace

std::string to_csv(const ReportTable& table) {
    std::string out;
    append_csv_row(out, table.header);
    for (const auto& row : table.rows) append_csv_row(out, row);
    return out;
}

std::string to_markdown(const ReportTable& table) {
    std::string out;
    if (!table.title.empty()) {
        out += "### ";
        out += table.title;
        out += "\n\n";
    }
    auto pipe_row = [&](const std::vector<std::string>& cells) {
        out += '|';
        for (const auto& c : cells) {
            out += ' ';
            out += c;
            out += " |";
        }
        out += '\n';
    };
    pipe_row(table.header);
    out += '|';
    for (size_t i = 0; i < table.header.size(); ++i) out += " --- |";
    out += '\n';
    for (const auto& row : table.rows) pipe_row(row);
    return out;
}

std::string to_json_lines(const ReportTable& table) {
    std::string out;
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (size_t i = 0; i < table.header.size() && i < row.size(); ++i)
            obj[table.header[i]] = row[i];
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::string format_fixed(double value, int precision) {
    if (precision < 0 || precision > 18)
        throw std::invalid_argument("format_fixed: precision out of range");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

}  // namespace nsmc
