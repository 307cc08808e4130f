#pragma once

// Square zone x zone matrices on disk: header "zone,<name...>", then one row
// per zone "<name>,<values...>", values with 9 significant digits.

#include <filesystem>
#include <string>
#include <vector>

#include "langsim/error.hpp"
#include "langsim/grid.hpp"
#include "langsim/text.hpp"

namespace langsim {

struct ZoneMatrix {
    std::vector<std::string> zones;
    Matrix values;
};

inline std::string zone_matrix_csv(const std::vector<std::string>& zones, const Matrix& m) {
    std::string out = "zone," + join_csv(zones) + "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out += zones.at(i);
        for (double v : m.row(i)) out += "," + format_exact(v);
        out += '\n';
    }
    return out;
}

inline void write_zone_matrix(const std::filesystem::path& path, const std::vector<std::string>& zones, const Matrix& m) {
    write_text_file(path, zone_matrix_csv(zones, m));
}

inline ZoneMatrix read_zone_matrix(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    if (csv.header.size() < 2 || csv.header[0] != "zone")
        throw Error(Errc::SchemaMismatch, path.string() + ": first column must be 'zone'");
    ZoneMatrix out;
    out.zones.assign(csv.header.begin() + 1, csv.header.end());
    const std::size_t n = out.zones.size();
    if (csv.rows.size() != n)
        throw Error(Errc::SchemaMismatch, path.string() + ": expected " + std::to_string(n) + " rows, got " +
                                              std::to_string(csv.rows.size()));
    out.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = csv.rows[i];
        if (row.size() != n + 1 || row[0] != out.zones[i])
            throw Error(Errc::SchemaMismatch, path.string() + ":" + std::to_string(csv.line_of(i)) +
                                                  ": row must be '" + out.zones[i] + "' followed by " + std::to_string(n) + " values");
        for (std::size_t j = 0; j < n; ++j) {
            auto v = parse_double(row[j + 1]);
            if (!v) throw Error(Errc::ValueError, path.string() + ":" + std::to_string(csv.line_of(i)) + ": non-numeric '" + row[j + 1] + "'");
            out.values(i, j) = *v;
        }
    }
    return out;
}

}  // namespace langsim
