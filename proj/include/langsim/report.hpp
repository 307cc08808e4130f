#pragma once

// Report tables derived from stored trajectories.
//
//   speaker_counts.csv   replication,step,year,zone_id,zone,total,first,second   (persons)
//   rankings.csv         replication,step,year,key,rank,zone_id,zone,value
//   geo_matrices.csv     replication,step,year,residence_id,residence,language_id,language,share,empty_row
//   ensemble_summary.csv quantity,zone_id,zone,step,year,mean,std_error,replications   (needs >= 2 replications)
//   *.svg                ranking bars and geo heatmaps for the first and last step of the first replication

#include <filesystem>
#include <string>
#include <vector>

#include "langsim/stats.hpp"
#include "langsim/svg.hpp"
#include "langsim/text.hpp"
#include "langsim/trajectory_io.hpp"

namespace langsim {

inline constexpr std::string_view to_string(RankKey k) {
    switch (k) {
        case RankKey::Total: return "total";
        case RankKey::First: return "first";
        case RankKey::Second: return "second";
    }
    return "?";
}

inline constexpr RankKey kRankKeys[] = {RankKey::Total, RankKey::First, RankKey::Second};

namespace detail {

inline const std::vector<double>& by_key(const SpeakerCounts& c, RankKey k) {
    return k == RankKey::Total ? c.total : (k == RankKey::First ? c.first : c.second);
}

inline std::string prefix(const Trajectory& t, const Snapshot& s) {
    return std::to_string(t.replication) + "," + std::to_string(s.step) + "," + std::to_string(s.year) + ",";
}

}  // namespace detail

inline std::string speaker_counts_csv(const TrajectorySet& set) {
    std::string out = "replication,step,year,zone_id,zone,total,first,second\n";
    for (const auto& t : set.runs)
        for (const auto& s : t.snapshots) {
            const SpeakerCounts c = speaker_counts(s.tally);
            for (std::size_t z = 0; z < set.zones.size(); ++z)
                out += detail::prefix(t, s) + std::to_string(z) + "," + set.zones[z] + "," + format_number(c.total[z]) + "," +
                       format_number(c.first[z]) + "," + format_number(c.second[z]) + "\n";
        }
    return out;
}

inline std::string rankings_csv(const TrajectorySet& set) {
    std::string out = "replication,step,year,key,rank,zone_id,zone,value\n";
    for (const auto& t : set.runs)
        for (const auto& s : t.snapshots) {
            const SpeakerCounts c = speaker_counts(s.tally);
            for (RankKey key : kRankKeys) {
                const auto& values = detail::by_key(c, key);
                const auto order = rank_languages(c, key);
                for (std::size_t r = 0; r < order.size(); ++r)
                    out += detail::prefix(t, s) + std::string(to_string(key)) + "," + std::to_string(r + 1) + "," +
                           std::to_string(order[r]) + "," + set.zones[order[r]] + "," + format_number(values[order[r]]) + "\n";
            }
        }
    return out;
}

inline std::string geo_matrices_csv(const TrajectorySet& set) {
    std::string out = "replication,step,year,residence_id,residence,language_id,language,share,empty_row\n";
    for (const auto& t : set.runs)
        for (const auto& s : t.snapshots) {
            const GeoMatrix g = geo_distribution(s.tally);
            for (std::size_t i = 0; i < set.zones.size(); ++i)
                for (std::size_t j = 0; j < set.zones.size(); ++j)
                    out += detail::prefix(t, s) + std::to_string(i) + "," + set.zones[i] + "," + std::to_string(j) + "," +
                           set.zones[j] + "," + format_number(g.g(i, j)) + "," + (g.empty_row[i] ? "1" : "0") + "\n";
        }
    return out;
}

inline std::string ensemble_summary_csv(const TrajectorySet& set) {
    std::string out = "quantity,zone_id,zone,step,year,mean,std_error,replications\n";
    auto emit = [&](std::string_view quantity, int zone, const SnapshotSelector& select) {
        const EnsembleSummary es = ensemble_summary(set.runs, select);
        const std::string zid = zone >= 0 ? std::to_string(zone) : "";
        const std::string zname = zone >= 0 ? set.zones[zone] : "";
        for (const auto& p : es.points)
            out += std::string(quantity) + "," + zid + "," + zname + "," + std::to_string(p.step) + "," + std::to_string(p.year) +
                   "," + format_number(p.mean) + "," + format_number(p.std_error) + "," + std::to_string(p.replications) + "\n";
    };
    auto share = [](const std::vector<std::int64_t>& v, const Tally& t, int z) {
        return t.agents ? static_cast<double>(v[z]) / static_cast<double>(t.agents) : 0.0;
    };
    for (int z = 0; z < static_cast<int>(set.zones.size()); ++z) {
        emit("total_share", z, [&, z](const Snapshot& s) { return share(s.tally.total, s.tally, z); });
        emit("first_share", z, [&, z](const Snapshot& s) { return share(s.tally.first, s.tally, z); });
        emit("second_share", z, [&, z](const Snapshot& s) { return share(s.tally.second, s.tally, z); });
    }
    emit("off_diagonal_mass", -1, [](const Snapshot& s) { return off_diagonal_mass(geo_distribution(s.tally)); });
    emit("population", -1, [](const Snapshot& s) { return static_cast<double>(s.tally.agents) * s.tally.scale; });
    return out;
}

/// Writes the report tables (and SVGs when asked); returns the written paths.
inline std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const TrajectorySet& set, bool svg) {
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& content) {
        write_text_file(dir / name, content);
        written.push_back(dir / name);
    };
    put("speaker_counts.csv", speaker_counts_csv(set));
    put("rankings.csv", rankings_csv(set));
    put("geo_matrices.csv", geo_matrices_csv(set));
    if (set.runs.size() >= 2) put("ensemble_summary.csv", ensemble_summary_csv(set));

    if (svg && !set.runs.empty() && !set.runs.front().snapshots.empty()) {
        const Trajectory& t = set.runs.front();
        std::vector<const Snapshot*> picks{&t.snapshots.front()};
        if (t.snapshots.size() > 1) picks.push_back(&t.snapshots.back());
        for (const Snapshot* s : picks) {
            const std::string year = std::to_string(s->year);
            const SpeakerCounts c = speaker_counts(s->tally);
            for (RankKey key : kRankKeys) {
                const auto order = rank_languages(c, key);
                std::vector<std::string> labels;
                std::vector<double> values;
                for (int z : order) {
                    labels.push_back(set.zones[z]);
                    values.push_back(detail::by_key(c, key)[z]);
                }
                put("ranking_" + std::string(to_string(key)) + "_" + year + ".svg",
                    bar_chart_svg(std::string(to_string(key)) + " speakers, " + year + " (replication " +
                                      std::to_string(t.replication) + ")",
                                  labels, values));
            }
            const GeoMatrix g = geo_distribution(s->tally);
            put("geo_" + year + ".svg",
                heatmap_svg("share of residents speaking each language, " + year, set.zones, set.zones, g.g, g.empty_row));
        }
    }
    return written;
}

}  // namespace langsim
