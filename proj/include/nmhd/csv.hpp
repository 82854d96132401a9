/// @file csv.hpp
/// @brief Minimal CSV writer with round-trip float formatting.
#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "nmhd/error.hpp"

namespace nmhd {

/// Formats with 17 significant digits so reparsing is lossless.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::trunc), ncol_(columns.size()) {
        if (!out_) throw Error("cannot open " + path + " for writing");
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != ncol_) throw ArgumentError("CSV row has wrong column count");
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
        out_ << '\n';
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::size_t ncol_;
};

/// Reads a numeric CSV with a header line.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ArgumentError("no CSV column " + name);
    }
    std::vector<double> column(const std::string& name) const {
        const std::size_t i = index(name);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r[i]);
        return out;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : s) {
            if (ch == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        parts.push_back(cur);
        return parts;
    };
    if (!std::getline(in, line)) return t;
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> r;
        for (const auto& p : split(line)) {
            // from_chars, unlike stod, accepts subnormals.
            double v = 0.0;
            const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
            if (ec != std::errc() || end != p.data() + p.size()) throw Error("bad CSV number '" + p + "' in " + path);
            r.push_back(v);
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

}  // namespace nmhd
