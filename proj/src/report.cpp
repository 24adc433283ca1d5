#include "manelab/report.hpp"

#include <cstdio>
#include <fstream>

#include "manelab/errors.hpp"

namespace manelab {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add(std::initializer_list<std::string> cells) {
    std::string line;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) line += ',';
        line += c;
        first = false;
    }
    rows.push_back(std::move(line));
}

std::string CsvTable::text() const {
    std::string out = header + "\n";
    for (const auto& r : rows) {
        out += r;
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

std::string plot_script(const std::string& csv_name, const std::string& using_spec,
                        const std::string& xlabel, const std::string& ylabel) {
    std::string s;
    s += "# gnuplot script for " + csv_name + "\n";
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set xlabel '" + xlabel + "'\n";
    s += "set ylabel '" + ylabel + "'\n";
    s += "plot '" + csv_name + "' using " + using_spec + " with linespoints\n";
    return s;
}

} // namespace manelab
