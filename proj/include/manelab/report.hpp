#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace manelab {

// Shortest text that survives a double round trip is not needed; reports pin
// 17 significant digits so reruns are byte-comparable.
std::string format_double(double v);

// In-memory CSV, written in one shot so a failed run leaves no partial file.
struct CsvTable {
    std::string header; // comma-joined column names
    std::vector<std::string> rows;

    explicit CsvTable(std::string header_line) : header(std::move(header_line)) {}
    void add(std::initializer_list<std::string> cells);
    std::string text() const;
};

void write_text_file(const std::string& path, const std::string& text);

// Companion gnuplot script for a CSV; plain text, no plotting dependency.
std::string plot_script(const std::string& csv_name, const std::string& using_spec,
                        const std::string& xlabel, const std::string& ylabel);

} // namespace manelab
