#pragma once

// Typed fixture tables (population schedule, migrant stock, soft power,
// initial L1/L2 distribution, language families, export shares, FDI
// outflows, known transition entries), their CSV loaders/writers, and the
// cross-table bundle validation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "langsim/error.hpp"
#include "langsim/grid.hpp"
#include "langsim/text.hpp"

namespace langsim {

struct Zone {
    int id = 0;
    std::string name;
    bool operator==(const Zone&) const = default;
};

struct ZoneCatalog {
    std::vector<Zone> zones;

    std::size_t size() const noexcept { return zones.size(); }
    const std::string& name(std::size_t z) const { return zones.at(z).name; }

    std::optional<int> find(std::string_view name) const {
        for (const auto& z : zones)
            if (z.name == name) return z.id;
        return std::nullopt;
    }

    bool operator==(const ZoneCatalog&) const = default;
};

/// Population target per zone and term (persons).
struct PopulationSchedule {
    std::vector<Zone> zones;
    std::vector<int> terms;  // year labels, ascending
    Grid<std::int64_t> persons;  // zone x term

    std::optional<std::size_t> term_index(int year) const {
        auto it = std::find(terms.begin(), terms.end(), year);
        if (it == terms.end()) return std::nullopt;
        return static_cast<std::size_t>(it - terms.begin());
    }

    std::int64_t world_total(std::size_t term) const {
        std::int64_t sum = 0;
        for (std::size_t z = 0; z < persons.rows(); ++z) sum += persons(z, term);
        return sum;
    }

    bool operator==(const PopulationSchedule&) const = default;
};

/// stock(i, j): people originating in zone i residing in zone j.
struct MigrantStockTable {
    std::vector<Zone> zones;
    std::vector<std::string> column_names;
    Grid<std::int64_t> stock;
    bool operator==(const MigrantStockTable&) const = default;
};

struct SoftPowerTable {
    std::vector<Zone> zones;
    std::vector<double> score;
    bool operator==(const SoftPowerTable&) const = default;
};

/// Native-language shares, second-language shares and the probability
/// alpha that an initial agent carries a second language.
struct InitialDistribution {
    std::vector<Zone> zones;
    std::vector<double> l1_share;
    std::vector<double> l2_share;
    double alpha = 0.0;
    bool operator==(const InitialDistribution&) const = default;
};

struct FamilyEncodingTable {
    std::vector<Zone> zones;
    std::vector<std::string> families;
    Grid<int> vec;  // zone x family, 0/1 with at most one 1 per row
    bool operator==(const FamilyEncodingTable&) const = default;
};

/// share(i, j): fraction of zone i's exports going to zone j.
struct ExportShareTable {
    std::vector<Zone> zones;
    std::vector<std::string> column_names;
    Matrix share;
    bool operator==(const ExportShareTable&) const = default;
};

struct FdiTable {
    std::vector<Zone> zones;
    std::vector<double> fdi;
    bool operator==(const FdiTable&) const = default;
};

struct KnownTransition {
    int i = 0;
    int j = 0;
    double t = 0.0;
    bool operator==(const KnownTransition&) const = default;
};

struct SparseTransitionInput {
    std::vector<KnownTransition> entries;
    bool operator==(const SparseTransitionInput&) const = default;
};

enum class TableKind {
    Population,
    MigrantStock,
    SoftPower,
    InitialDistribution,
    Family,
    ExportShare,
    Fdi,
    KnownTransitions,
};

inline constexpr TableKind kAllTableKinds[] = {
    TableKind::Population,  TableKind::MigrantStock, TableKind::SoftPower, TableKind::InitialDistribution,
    TableKind::Family,      TableKind::ExportShare,  TableKind::Fdi,       TableKind::KnownTransitions,
};

inline std::string_view to_string(TableKind kind) {
    switch (kind) {
        case TableKind::Population: return "population";
        case TableKind::MigrantStock: return "migrant_stock";
        case TableKind::SoftPower: return "soft_power";
        case TableKind::InitialDistribution: return "initial_distribution";
        case TableKind::Family: return "family";
        case TableKind::ExportShare: return "export_share";
        case TableKind::Fdi: return "fdi";
        case TableKind::KnownTransitions: return "known_t";
    }
    return "unknown";
}

inline std::optional<TableKind> table_kind_from_string(std::string_view s) {
    for (TableKind k : kAllTableKinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

enum class Severity { Note, Warning, Error };

inline std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Note: return "note";
        case Severity::Warning: return "warning";
        case Severity::Error: return "error";
    }
    return "?";
}

struct Diagnostic {
    Severity severity = Severity::Note;
    std::string kind;    // e.g. PlausibilityWarning, Normalization, ZoneOrderMismatch
    std::string table;
    std::string row;     // zone name or line reference
    std::string column;  // term / column label, may be empty
    std::string message;
};

template <typename Table>
struct Loaded {
    Table table;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

[[noreturn]] inline void schema_error(const CsvTable& csv, const std::string& msg) {
    throw Error(Errc::SchemaMismatch, csv.source.string() + ": " + msg);
}

[[noreturn]] inline void value_error(const CsvTable& csv, std::size_t r, const std::string& msg) {
    throw Error(Errc::ValueError, csv.source.string() + ":" + std::to_string(csv.line_of(r)) + ": " + msg);
}

inline void expect_columns(const CsvTable& csv, const std::vector<std::string>& expected, bool prefix_only) {
    if (prefix_only ? csv.header.size() < expected.size() : csv.header.size() != expected.size())
        schema_error(csv, "expected header starting with '" + join_csv(expected) + "', got '" + join_csv(csv.header) + "'");
    for (std::size_t k = 0; k < expected.size(); ++k)
        if (csv.header[k] != expected[k])
            schema_error(csv, "column " + std::to_string(k + 1) + " should be '" + expected[k] + "', got '" + csv.header[k] + "'");
    for (std::size_t r = 0; r < csv.rows.size(); ++r)
        if (csv.rows[r].size() != csv.header.size())
            schema_error(csv, "line " + std::to_string(csv.line_of(r)) + " has " + std::to_string(csv.rows[r].size()) +
                                  " fields, header has " + std::to_string(csv.header.size()));
}

inline double cell_double(const CsvTable& csv, std::size_t r, std::size_t c) {
    auto v = parse_double(csv.rows[r][c]);
    if (!v || !std::isfinite(*v)) value_error(csv, r, "non-numeric value '" + csv.rows[r][c] + "' in column " + csv.header[c]);
    return *v;
}

inline std::int64_t cell_int(const CsvTable& csv, std::size_t r, std::size_t c) {
    auto v = parse_int(csv.rows[r][c]);
    if (!v) value_error(csv, r, "non-integer value '" + csv.rows[r][c] + "' in column " + csv.header[c]);
    return *v;
}

inline Zone zone_cell(const CsvTable& csv, std::size_t r) {
    return Zone{static_cast<int>(cell_int(csv, r, 0)), csv.rows[r][1]};
}

/// Zones of a square origin x destination table: row r is zone id r.
inline std::vector<Zone> square_zones(const CsvTable& csv) {
    if (csv.header.size() < 2 || csv.header[0] != "origin") schema_error(csv, "first column must be 'origin'");
    const std::size_t n = csv.header.size() - 1;
    if (csv.rows.size() != n)
        schema_error(csv, "expected " + std::to_string(n) + " origin rows (one per destination column), got " +
                              std::to_string(csv.rows.size()));
    std::vector<Zone> zones;
    for (std::size_t r = 0; r < n; ++r) {
        if (csv.rows[r].size() != n + 1)
            schema_error(csv, "line " + std::to_string(csv.line_of(r)) + " has " + std::to_string(csv.rows[r].size()) +
                                  " fields, expected " + std::to_string(n + 1));
        zones.push_back(Zone{static_cast<int>(r), csv.rows[r][0]});
    }
    return zones;
}

inline std::string zone_prefix(const Zone& z) { return std::to_string(z.id) + "," + z.name; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Plausibility checks (non-fatal)

/// Flags schedule entries more than 10x away from the geometric mean of their
/// row neighbours, which catches transcription typos with a surplus digit.
inline std::vector<Diagnostic> population_plausibility(const PopulationSchedule& s) {
    std::vector<Diagnostic> out;
    const std::size_t nt = s.terms.size();
    for (std::size_t z = 0; z < s.persons.rows(); ++z) {
        for (std::size_t k = 0; k < nt; ++k) {
            double log_sum = 0.0;
            int count = 0;
            for (std::size_t nb : {k - 1, k + 1}) {
                if (nb >= nt || s.persons(z, nb) <= 0) continue;
                log_sum += std::log(static_cast<double>(s.persons(z, nb)));
                ++count;
            }
            if (count == 0 || s.persons(z, k) <= 0) continue;
            const double ratio = std::log(static_cast<double>(s.persons(z, k))) - log_sum / count;
            if (std::abs(ratio) > std::log(10.0)) {
                out.push_back({Severity::Warning, "PlausibilityWarning", "population", s.zones[z].name,
                               std::to_string(s.terms[k]),
                               "value " + std::to_string(s.persons(z, k)) + " is more than 10x away from its row neighbours (" +
                                   std::to_string(std::to_string(s.persons(z, k)).size()) + " digits)"});
            }
        }
    }
    return out;
}

inline constexpr double kExportRowSumSlack = 1e-3;

inline std::vector<Diagnostic> export_plausibility(const ExportShareTable& t) {
    std::vector<Diagnostic> out;
    for (std::size_t i = 0; i < t.share.rows(); ++i) {
        double sum = 0.0;
        for (double v : t.share.row(i)) sum += v;
        if (sum > 1.0 + kExportRowSumSlack)
            out.push_back({Severity::Warning, "PlausibilityWarning", "export_share", t.zones[i].name, "",
                           "row sums to " + format_number(sum) + " (> 1 + 1e-3)"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Loaders

inline Loaded<PopulationSchedule> load_population(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    detail::expect_columns(csv, {"zone_id", "zone"}, true);
    if (csv.header.size() < 3) detail::schema_error(csv, "no term columns");
    PopulationSchedule s;
    for (std::size_t c = 2; c < csv.header.size(); ++c) {
        auto year = parse_int(csv.header[c]);
        if (!year) detail::schema_error(csv, "term column '" + csv.header[c] + "' is not a year");
        if (!s.terms.empty() && *year <= s.terms.back()) detail::schema_error(csv, "term years must be ascending");
        s.terms.push_back(static_cast<int>(*year));
    }
    s.persons = Grid<std::int64_t>(csv.rows.size(), s.terms.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        s.zones.push_back(detail::zone_cell(csv, r));
        for (std::size_t k = 0; k < s.terms.size(); ++k) {
            const auto v = detail::cell_int(csv, r, k + 2);
            if (v <= 0) detail::value_error(csv, r, "population must be positive");
            s.persons(r, k) = v;
        }
    }
    if (s.zones.empty()) detail::schema_error(csv, "no zone rows");
    return {s, population_plausibility(s)};
}

inline Loaded<MigrantStockTable> load_migrant_stock(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    MigrantStockTable t;
    t.zones = detail::square_zones(csv);
    t.column_names.assign(csv.header.begin() + 1, csv.header.end());
    const std::size_t n = t.zones.size();
    t.stock = Grid<std::int64_t>(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        std::int64_t sum = 0;
        for (std::size_t c = 0; c < n; ++c) {
            const auto v = detail::cell_int(csv, r, c + 1);
            if (v < 0) detail::value_error(csv, r, "negative migrant stock");
            t.stock(r, c) = v;
            sum += v;
        }
        if (sum <= 0) detail::value_error(csv, r, "migrant stock row sums to zero");
    }
    return {t, {}};
}

inline Loaded<SoftPowerTable> load_soft_power(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    detail::expect_columns(csv, {"zone_id", "zone", "soft_power"}, false);
    SoftPowerTable t;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        t.zones.push_back(detail::zone_cell(csv, r));
        const double v = detail::cell_double(csv, r, 2);
        if (v < 0) detail::value_error(csv, r, "soft power must be >= 0");
        t.score.push_back(v);
    }
    return {t, {}};
}

inline Loaded<InitialDistribution> load_initial_distribution(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    detail::expect_columns(csv, {"zone_id", "zone", "l1_share", "l2_share"}, false);
    InitialDistribution d;
    std::optional<double> alpha;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        if (csv.rows[r][0] == "alpha") {
            const double a = detail::cell_double(csv, r, 2);
            if (a < 0 || a > 1) detail::value_error(csv, r, "alpha must lie in [0,1]");
            alpha = a;
            continue;
        }
        d.zones.push_back(detail::zone_cell(csv, r));
        const double l1 = detail::cell_double(csv, r, 2);
        const double l2 = detail::cell_double(csv, r, 3);
        if (l1 < 0 || l1 > 1 || l2 < 0 || l2 > 1) detail::value_error(csv, r, "shares must lie in [0,1]");
        d.l1_share.push_back(l1);
        d.l2_share.push_back(l2);
    }
    if (!alpha) detail::schema_error(csv, "missing 'alpha' row");
    d.alpha = *alpha;

    std::vector<Diagnostic> notes;
    auto renormalize = [&](std::vector<double>& v, const char* column) {
        double sum = 0.0;
        for (double x : v) sum += x;
        if (!(sum > 0.0)) throw Error(Errc::ValueError, path.string() + ": column " + column + " sums to zero");
        if (std::abs(sum - 1.0) > 1e-12) {
            for (double& x : v) x /= sum;
            notes.push_back({Severity::Note, "Normalization", "initial_distribution", "", column,
                             std::string("renormalized; pre-normalization sum = ") + format_number(sum, 12)});
        }
    };
    renormalize(d.l1_share, "l1_share");
    renormalize(d.l2_share, "l2_share");
    return {d, notes};
}

inline Loaded<FamilyEncodingTable> load_family(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    detail::expect_columns(csv, {"zone_id", "zone"}, true);
    if (csv.header.size() < 3) detail::schema_error(csv, "no language-family columns");
    FamilyEncodingTable t;
    t.families.assign(csv.header.begin() + 2, csv.header.end());
    t.vec = Grid<int>(csv.rows.size(), t.families.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        t.zones.push_back(detail::zone_cell(csv, r));
        int ones = 0;
        for (std::size_t f = 0; f < t.families.size(); ++f) {
            const auto v = detail::cell_int(csv, r, f + 2);
            if (v != 0 && v != 1) detail::value_error(csv, r, "family entries must be 0 or 1");
            t.vec(r, f) = static_cast<int>(v);
            ones += static_cast<int>(v);
        }
        if (ones > 1) detail::value_error(csv, r, "a zone belongs to at most one family");
    }
    return {t, {}};
}

inline Loaded<ExportShareTable> load_export_share(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    ExportShareTable t;
    t.zones = detail::square_zones(csv);
    t.column_names.assign(csv.header.begin() + 1, csv.header.end());
    const std::size_t n = t.zones.size();
    t.share = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double v = detail::cell_double(csv, r, c + 1);
            if (v < 0 || v > 1) detail::value_error(csv, r, "export share must lie in [0,1]");
            t.share(r, c) = v;
        }
    return {t, export_plausibility(t)};
}

inline Loaded<FdiTable> load_fdi(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    detail::expect_columns(csv, {"zone_id", "zone", "fdi_outflow_pct_gdp"}, false);
    FdiTable t;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        t.zones.push_back(detail::zone_cell(csv, r));
        t.fdi.push_back(detail::cell_double(csv, r, 2));
    }
    return {t, {}};
}

inline Loaded<SparseTransitionInput> load_known_transitions(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    detail::expect_columns(csv, {"i", "j", "t"}, false);
    SparseTransitionInput in;
    std::set<std::pair<int, int>> seen;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        KnownTransition e{static_cast<int>(detail::cell_int(csv, r, 0)), static_cast<int>(detail::cell_int(csv, r, 1)),
                          detail::cell_double(csv, r, 2)};
        if (e.i < 0 || e.j < 0) detail::value_error(csv, r, "zone ids must be non-negative");
        if (e.t < 0 || e.t > 1) detail::value_error(csv, r, "t must lie in [0,1]");
        if (!seen.insert({e.i, e.j}).second)
            detail::value_error(csv, r, "duplicate entry (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")");
        in.entries.push_back(e);
    }
    return {in, {}};
}

using AnyTable = std::variant<PopulationSchedule, MigrantStockTable, SoftPowerTable, InitialDistribution,
                              FamilyEncodingTable, ExportShareTable, FdiTable, SparseTransitionInput>;

inline Loaded<AnyTable> load_table(TableKind kind, const std::filesystem::path& path) {
    auto wrap = [](auto loaded) { return Loaded<AnyTable>{AnyTable(std::move(loaded.table)), std::move(loaded.diagnostics)}; };
    switch (kind) {
        case TableKind::Population: return wrap(load_population(path));
        case TableKind::MigrantStock: return wrap(load_migrant_stock(path));
        case TableKind::SoftPower: return wrap(load_soft_power(path));
        case TableKind::InitialDistribution: return wrap(load_initial_distribution(path));
        case TableKind::Family: return wrap(load_family(path));
        case TableKind::ExportShare: return wrap(load_export_share(path));
        case TableKind::Fdi: return wrap(load_fdi(path));
        case TableKind::KnownTransitions: return wrap(load_known_transitions(path));
    }
    throw Error(Errc::ConfigError, "unknown table kind");
}

// ---------------------------------------------------------------------------
// Writers (exact round-trip formatting)

inline std::string to_csv(const PopulationSchedule& s) {
    std::string out = "zone_id,zone";
    for (int y : s.terms) out += "," + std::to_string(y);
    out += '\n';
    for (std::size_t z = 0; z < s.zones.size(); ++z) {
        out += detail::zone_prefix(s.zones[z]);
        for (std::size_t k = 0; k < s.terms.size(); ++k) out += "," + std::to_string(s.persons(z, k));
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const MigrantStockTable& t) {
    std::string out = "origin," + join_csv(t.column_names) + "\n";
    for (std::size_t i = 0; i < t.zones.size(); ++i) {
        out += t.zones[i].name;
        for (std::int64_t v : t.stock.row(i)) out += "," + std::to_string(v);
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const SoftPowerTable& t) {
    std::string out = "zone_id,zone,soft_power\n";
    for (std::size_t z = 0; z < t.zones.size(); ++z) out += detail::zone_prefix(t.zones[z]) + "," + format_exact(t.score[z]) + "\n";
    return out;
}

inline std::string to_csv(const InitialDistribution& d) {
    std::string out = "zone_id,zone,l1_share,l2_share\n";
    for (std::size_t z = 0; z < d.zones.size(); ++z)
        out += detail::zone_prefix(d.zones[z]) + "," + format_exact(d.l1_share[z]) + "," + format_exact(d.l2_share[z]) + "\n";
    out += "alpha,," + format_exact(d.alpha) + ",\n";
    return out;
}

inline std::string to_csv(const FamilyEncodingTable& t) {
    std::string out = "zone_id,zone," + join_csv(t.families) + "\n";
    for (std::size_t z = 0; z < t.zones.size(); ++z) {
        out += detail::zone_prefix(t.zones[z]);
        for (int v : t.vec.row(z)) out += "," + std::to_string(v);
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const ExportShareTable& t) {
    std::string out = "origin," + join_csv(t.column_names) + "\n";
    for (std::size_t i = 0; i < t.zones.size(); ++i) {
        out += t.zones[i].name;
        for (double v : t.share.row(i)) out += "," + format_exact(v);
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const FdiTable& t) {
    std::string out = "zone_id,zone,fdi_outflow_pct_gdp\n";
    for (std::size_t z = 0; z < t.zones.size(); ++z) out += detail::zone_prefix(t.zones[z]) + "," + format_exact(t.fdi[z]) + "\n";
    return out;
}

inline std::string to_csv(const SparseTransitionInput& in) {
    std::string out = "i,j,t\n";
    for (const auto& e : in.entries) out += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_exact(e.t) + "\n";
    return out;
}

inline std::string to_csv(const AnyTable& table) {
    return std::visit([](const auto& t) { return to_csv(t); }, table);
}

// ---------------------------------------------------------------------------
// Bundle

/// Locations of the eight fixture files.
struct FixturePaths {
    std::filesystem::path population;
    std::filesystem::path migrant_stock;
    std::filesystem::path soft_power;
    std::filesystem::path initial_distribution;
    std::filesystem::path family;
    std::filesystem::path export_share;
    std::filesystem::path fdi;
    std::filesystem::path known_transitions;

    static FixturePaths in_directory(const std::filesystem::path& dir) {
        return {dir / "population.csv", dir / "migrant_stock.csv", dir / "soft_power.csv",
                dir / "initial_distribution.csv", dir / "family.csv", dir / "export_share.csv",
                dir / "fdi.csv", dir / "known_t.csv"};
    }

    std::filesystem::path& operator[](TableKind kind) {
        switch (kind) {
            case TableKind::Population: return population;
            case TableKind::MigrantStock: return migrant_stock;
            case TableKind::SoftPower: return soft_power;
            case TableKind::InitialDistribution: return initial_distribution;
            case TableKind::Family: return family;
            case TableKind::ExportShare: return export_share;
            case TableKind::Fdi: return fdi;
            case TableKind::KnownTransitions: return known_transitions;
        }
        return population;
    }
    const std::filesystem::path& operator[](TableKind kind) const { return const_cast<FixturePaths&>(*this)[kind]; }
};

struct DataBundle {
    PopulationSchedule population;
    MigrantStockTable migrant_stock;
    SoftPowerTable soft_power;
    InitialDistribution initial;
    FamilyEncodingTable family;
    ExportShareTable export_share;
    FdiTable fdi;
    SparseTransitionInput known;
    std::vector<Diagnostic> notes;  // non-warning loader output (normalizations)

    /// The zone catalog is the (id, name) column of the population schedule.
    ZoneCatalog catalog() const { return ZoneCatalog{population.zones}; }
};

inline DataBundle load_bundle(const FixturePaths& paths) {
    DataBundle b;
    auto take = [&b](auto loaded) {
        for (auto& d : loaded.diagnostics)
            if (d.severity == Severity::Note) b.notes.push_back(std::move(d));
        return std::move(loaded.table);
    };
    b.population = take(load_population(paths.population));
    b.migrant_stock = take(load_migrant_stock(paths.migrant_stock));
    b.soft_power = take(load_soft_power(paths.soft_power));
    b.initial = take(load_initial_distribution(paths.initial_distribution));
    b.family = take(load_family(paths.family));
    b.export_share = take(load_export_share(paths.export_share));
    b.fdi = take(load_fdi(paths.fdi));
    b.known = take(load_known_transitions(paths.known_transitions));
    return b;
}

struct ValidationReport {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;
    std::vector<Diagnostic> notes;

    bool ok() const noexcept { return errors.empty(); }
    /// 0 = clean, 1 = warnings only, 2 = fatal.
    int exit_code() const noexcept { return !errors.empty() ? 2 : (!warnings.empty() ? 1 : 0); }
};

/// Minimum number of known entries needed to train on an n-zone world.
inline std::size_t min_known_entries(std::size_t n_zones) {
    return std::min<std::size_t>(20, n_zones * (n_zones > 0 ? n_zones - 1 : 0));
}

inline ValidationReport validate_bundle(const DataBundle& b) {
    ValidationReport report;
    report.notes = b.notes;
    const ZoneCatalog catalog = b.catalog();

    auto mismatch = [&](std::string table, std::string message) {
        report.errors.push_back({Severity::Error, "ZoneOrderMismatch", std::move(table), "", "", std::move(message)});
    };
    for (std::size_t z = 0; z < catalog.size(); ++z)
        if (catalog.zones[z].id != static_cast<int>(z))
            mismatch("population", "zone '" + catalog.zones[z].name + "' at row " + std::to_string(z) + " has id " +
                                       std::to_string(catalog.zones[z].id));

    auto check_zones = [&](const char* table, const std::vector<Zone>& zones) {
        if (zones.size() != catalog.size()) {
            mismatch(table, std::to_string(zones.size()) + " zones, catalog has " + std::to_string(catalog.size()));
            return;
        }
        for (std::size_t z = 0; z < zones.size(); ++z)
            if (zones[z] != catalog.zones[z]) {
                mismatch(table, "row " + std::to_string(z) + " is " + std::to_string(zones[z].id) + "/" + zones[z].name +
                                    ", catalog expects " + std::to_string(catalog.zones[z].id) + "/" + catalog.zones[z].name);
                return;
            }
    };
    auto check_columns = [&](const char* table, const std::vector<std::string>& names) {
        for (std::size_t z = 0; z < names.size() && z < catalog.size(); ++z)
            if (names[z] != catalog.zones[z].name) {
                mismatch(table, "column " + std::to_string(z) + " is '" + names[z] + "', catalog expects '" +
                                    catalog.zones[z].name + "'");
                return;
            }
    };
    check_zones("migrant_stock", b.migrant_stock.zones);
    check_columns("migrant_stock", b.migrant_stock.column_names);
    check_zones("soft_power", b.soft_power.zones);
    check_zones("initial_distribution", b.initial.zones);
    check_zones("family", b.family.zones);
    check_zones("export_share", b.export_share.zones);
    check_columns("export_share", b.export_share.column_names);
    check_zones("fdi", b.fdi.zones);

    const int n = static_cast<int>(catalog.size());
    for (const auto& e : b.known.entries)
        if (e.i >= n || e.j >= n)
            report.errors.push_back({Severity::Error, "ValueError", "known_t", std::to_string(e.i), std::to_string(e.j),
                                     "zone id out of range for a " + std::to_string(n) + "-zone catalog"});
    if (b.known.entries.size() < min_known_entries(catalog.size()))
        report.errors.push_back({Severity::Error, "ValueError", "known_t", "", "",
                                 "only " + std::to_string(b.known.entries.size()) + " known entries; need at least " +
                                     std::to_string(min_known_entries(catalog.size()))});

    for (auto& w : population_plausibility(b.population)) report.warnings.push_back(std::move(w));
    for (auto& w : export_plausibility(b.export_share)) report.warnings.push_back(std::move(w));
    return report;
}

/// Throws ZoneOrderMismatch / ValueError if the bundle has fatal problems.
inline void require_valid(const ValidationReport& report) {
    if (report.ok()) return;
    const auto& first = report.errors.front();
    const Errc code = first.kind == "ZoneOrderMismatch" ? Errc::ZoneOrderMismatch : Errc::ValueError;
    throw Error(code, first.table + ": " + first.message);
}

}  // namespace langsim
