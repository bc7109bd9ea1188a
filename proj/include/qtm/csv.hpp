#pragma once

/// Minimal CSV support: comma separators, '.' decimals, one header row, LF
/// line endings, '#' comment lines. Numeric formatting is fixed so identical
/// runs produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qtm {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              bool timestamp_header, const std::string& timestamp = "")
        : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open output file: " + path);
        if (timestamp_header) out_ << "# generated " << timestamp << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
        width_ = columns.size();
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw Error("CsvWriter: wrong cell count");
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t width_ = 0;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ColumnError("no column named '" + name + "'");
    }

    std::vector<double> numeric_column(const std::string& name) const {
        const std::size_t idx = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) {
            try {
                out.push_back(std::stod(r.at(idx)));
            } catch (...) {
                throw ColumnError("column '" + name + "' has a non-numeric cell");
            }
        }
        return out;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input file: " + path);
    CsvTable table;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (!header_done) {
            table.columns = std::move(cells);
            header_done = true;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    if (!header_done) throw Error("empty CSV: " + path);
    return table;
}

} // namespace qtm
