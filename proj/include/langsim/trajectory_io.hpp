#pragma once

// On-disk form of simulation trajectories. Tallies are stored as integer
// agent counts (plus the scale), so reports can be regenerated exactly.
//
//   traj_r<NNN>.csv  step,year,zone_id,zone,natives,residents,total,first,second,scale
//   geo_r<NNN>.csv   step,year,residence_id,language_id,speakers
//   replications.csv replication,seed,trajectory,geo

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "langsim/error.hpp"
#include "langsim/stats.hpp"
#include "langsim/text.hpp"

namespace langsim {

inline std::string replication_tag(int r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "r%03d", r);
    return buf;
}

inline std::string trajectory_filename(int r) { return "traj_" + replication_tag(r) + ".csv"; }
inline std::string geo_filename(int r) { return "geo_" + replication_tag(r) + ".csv"; }
inline constexpr std::string_view kReplicationIndexFile = "replications.csv";

inline std::string trajectory_csv(const Trajectory& t, const std::vector<std::string>& zones) {
    std::string out = "step,year,zone_id,zone,natives,residents,total,first,second,scale\n";
    for (const auto& s : t.snapshots) {
        const Tally& y = s.tally;
        for (int z = 0; z < y.zones; ++z)
            out += join_csv({std::to_string(s.step), std::to_string(s.year), std::to_string(z), zones.at(z),
                             std::to_string(y.natives[z]), std::to_string(y.residents[z]), std::to_string(y.total[z]),
                             std::to_string(y.first[z]), std::to_string(y.second[z]), format_exact(y.scale)}) +
                   "\n";
    }
    return out;
}

inline std::string geo_counts_csv(const Trajectory& t) {
    std::string out = "step,year,residence_id,language_id,speakers\n";
    for (const auto& s : t.snapshots)
        for (int i = 0; i < s.tally.zones; ++i)
            for (int j = 0; j < s.tally.zones; ++j)
                out += std::to_string(s.step) + "," + std::to_string(s.year) + "," + std::to_string(i) + "," +
                       std::to_string(j) + "," + std::to_string(s.tally.geo(i, j)) + "\n";
    return out;
}

struct TrajectorySet {
    std::vector<std::string> zones;
    std::vector<Trajectory> runs;
};

/// Writes every replication plus the index; returns the written paths.
inline std::vector<std::filesystem::path> write_trajectories(const std::filesystem::path& dir, const TrajectorySet& set) {
    std::vector<std::filesystem::path> written;
    std::string index = "replication,seed,trajectory,geo\n";
    for (const auto& t : set.runs) {
        const auto traj = dir / trajectory_filename(t.replication);
        const auto geo = dir / geo_filename(t.replication);
        write_text_file(traj, trajectory_csv(t, set.zones));
        write_text_file(geo, geo_counts_csv(t));
        written.push_back(traj);
        written.push_back(geo);
        index += std::to_string(t.replication) + "," + std::to_string(t.seed) + "," + trajectory_filename(t.replication) +
                 "," + geo_filename(t.replication) + "\n";
    }
    write_text_file(dir / kReplicationIndexFile, index);
    written.push_back(dir / kReplicationIndexFile);
    return written;
}

namespace detail {

inline std::int64_t count_cell(const CsvTable& csv, std::size_t r, std::size_t c) {
    auto v = parse_int(csv.rows[r][c]);
    if (!v || *v < 0)
        throw Error(Errc::ValueError, csv.source.string() + ":" + std::to_string(csv.line_of(r)) + ": expected a count, got '" +
                                          csv.rows[r][c] + "'");
    return *v;
}

inline void expect_header(const CsvTable& csv, const std::vector<std::string>& expected) {
    if (csv.header != expected) throw Error(Errc::SchemaMismatch, csv.source.string() + ": unexpected header");
    for (std::size_t r = 0; r < csv.rows.size(); ++r)
        if (csv.rows[r].size() != expected.size())
            throw Error(Errc::SchemaMismatch, csv.source.string() + ":" + std::to_string(csv.line_of(r)) + ": wrong column count");
}

}  // namespace detail

inline Trajectory read_trajectory(const std::filesystem::path& traj_path, const std::filesystem::path& geo_path,
                                  std::vector<std::string>* zones_out = nullptr) {
    const CsvTable csv = read_csv(traj_path);
    detail::expect_header(csv, {"step", "year", "zone_id", "zone", "natives", "residents", "total", "first", "second", "scale"});
    std::map<int, Snapshot> by_step;
    std::vector<std::string> zones;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto step = static_cast<int>(detail::count_cell(csv, r, 0));
        const auto z = static_cast<std::size_t>(detail::count_cell(csv, r, 2));
        if (zones.size() <= z) zones.resize(z + 1);
        zones[z] = csv.rows[r][3];
        auto scale = parse_double(csv.rows[r][9]);
        if (!scale || *scale <= 0) throw Error(Errc::ValueError, csv.source.string() + ": bad scale");
        Snapshot& s = by_step[step];
        s.step = step;
        s.year = static_cast<int>(detail::count_cell(csv, r, 1));
        s.tally.scale = *scale;
        auto grow = [&](std::vector<std::int64_t>& v, std::int64_t x) {
            if (v.size() <= z) v.resize(z + 1, 0);
            v[z] = x;
        };
        grow(s.tally.natives, detail::count_cell(csv, r, 4));
        grow(s.tally.residents, detail::count_cell(csv, r, 5));
        grow(s.tally.total, detail::count_cell(csv, r, 6));
        grow(s.tally.first, detail::count_cell(csv, r, 7));
        grow(s.tally.second, detail::count_cell(csv, r, 8));
    }
    const int n = static_cast<int>(zones.size());
    Trajectory t;
    for (auto& [step, s] : by_step) {
        if (static_cast<int>(s.tally.natives.size()) != n) throw Error(Errc::SchemaMismatch, csv.source.string() + ": incomplete step");
        s.tally.zones = n;
        s.tally.geo = Grid<std::int64_t>(n, n, 0);
        for (auto v : s.tally.natives) s.tally.agents += v;
        t.snapshots.push_back(std::move(s));
    }

    const CsvTable geo = read_csv(geo_path);
    detail::expect_header(geo, {"step", "year", "residence_id", "language_id", "speakers"});
    for (std::size_t r = 0; r < geo.rows.size(); ++r) {
        const auto step = static_cast<std::size_t>(detail::count_cell(geo, r, 0));
        const auto i = static_cast<std::size_t>(detail::count_cell(geo, r, 2));
        const auto j = static_cast<std::size_t>(detail::count_cell(geo, r, 3));
        if (step >= t.snapshots.size() || t.snapshots[step].step != static_cast<int>(step) || i >= zones.size() ||
            j >= zones.size())
            throw Error(Errc::SchemaMismatch, geo.source.string() + ":" + std::to_string(geo.line_of(r)) + ": index out of range");
        t.snapshots[step].tally.geo(i, j) = detail::count_cell(geo, r, 4);
    }
    if (zones_out) *zones_out = zones;
    return t;
}

/// Reads a simulate output directory through its replication index.
inline TrajectorySet read_trajectories(const std::filesystem::path& dir) {
    const CsvTable index = read_csv(dir / kReplicationIndexFile);
    detail::expect_header(index, {"replication", "seed", "trajectory", "geo"});
    if (index.rows.empty()) throw Error(Errc::EmptyInput, index.source.string() + ": no replications listed");
    TrajectorySet set;
    for (std::size_t r = 0; r < index.rows.size(); ++r) {
        std::vector<std::string> zones;
        Trajectory t = read_trajectory(dir / index.rows[r][2], dir / index.rows[r][3], &zones);
        t.replication = static_cast<int>(detail::count_cell(index, r, 0));
        auto seed = std::stoull(index.rows[r][1]);
        t.seed = seed;
        if (r == 0)
            set.zones = zones;
        else if (zones != set.zones)
            throw Error(Errc::ZoneOrderMismatch, index.rows[r][2] + ": zone list differs from the first replication");
        set.runs.push_back(std::move(t));
    }
    return set;
}

}  // namespace langsim
