#pragma once

// Reductions of a society to the reported quantities: speaker counts,
// rankings, geographic distribution, and cross-replication summaries.
//
// "Second language" means stack position 1 only; later acquisitions count
// toward the total. Counts are reported in persons (agents x scale).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "langsim/error.hpp"
#include "langsim/grid.hpp"
#include "langsim/society.hpp"

namespace langsim {

/// Integer agent tallies for one society state.
struct Tally {
    int zones = 0;
    double scale = 1.0;
    std::int64_t agents = 0;
    std::vector<std::int64_t> natives;    // by native zone
    std::vector<std::int64_t> residents;  // by residence zone
    std::vector<std::int64_t> total;      // speakers of language j anywhere in the stack
    std::vector<std::int64_t> first;
    std::vector<std::int64_t> second;
    Grid<std::int64_t> geo;  // residence i x language j -> speakers

    explicit Tally(int n = 0, double s = 1.0)
        : zones(n), scale(s), natives(n), residents(n), total(n), first(n), second(n), geo(n, n, 0) {}

    bool operator==(const Tally&) const = default;
};

inline Tally tally(const Society& society) {
    Tally t(society.zones, society.scale);
    for (const Agent& a : society.agents) {
        ++t.agents;
        ++t.natives[a.native()];
        ++t.residents[a.residence];
        ++t.first[a.order[0]];
        if (a.size >= 2) ++t.second[a.order[1]];
        for (int k = 0; k < a.size; ++k) {
            ++t.total[a.order[k]];
            ++t.geo(a.residence, a.order[k]);
        }
    }
    return t;
}

struct SpeakerCounts {
    std::vector<double> total;
    std::vector<double> first;
    std::vector<double> second;
};

inline SpeakerCounts speaker_counts(const Tally& t) {
    SpeakerCounts c;
    auto persons = [&](const std::vector<std::int64_t>& v) {
        std::vector<double> out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = static_cast<double>(v[k]) * t.scale;
        return out;
    };
    c.total = persons(t.total);
    c.first = persons(t.first);
    c.second = persons(t.second);
    return c;
}

inline SpeakerCounts speaker_counts(const Society& society) { return speaker_counts(tally(society)); }

enum class RankKey { Total, First, Second };

/// Zone ids ordered by descending value; equal values keep ascending id order.
inline std::vector<int> rank_by_value(std::span<const double> values) {
    std::vector<int> ids(values.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return values[a] > values[b]; });
    return ids;
}

inline std::vector<int> rank_languages(const SpeakerCounts& c, RankKey key) {
    switch (key) {
        case RankKey::Total: return rank_by_value(c.total);
        case RankKey::First: return rank_by_value(c.first);
        case RankKey::Second: return rank_by_value(c.second);
    }
    return {};
}

/// g(i, j) = share of residents of zone i who speak language j. Rows of
/// zones without residents are 0 and flagged in `empty_row`.
struct GeoMatrix {
    Matrix g;
    std::vector<bool> empty_row;
};

inline GeoMatrix geo_distribution(const Tally& t) {
    const auto n = static_cast<std::size_t>(t.zones);
    GeoMatrix out{Matrix(n, n, 0.0), std::vector<bool>(n, false)};
    for (std::size_t i = 0; i < n; ++i) {
        if (t.residents[i] == 0) {
            out.empty_row[i] = true;
            continue;
        }
        const auto residents = static_cast<double>(t.residents[i]);
        for (std::size_t j = 0; j < n; ++j) out.g(i, j) = static_cast<double>(t.geo(i, j)) / residents;
    }
    return out;
}

inline GeoMatrix geo_distribution(const Society& society) { return geo_distribution(tally(society)); }

/// Mean over populated rows of the off-diagonal row mass sum_{j != i} g(i, j).
inline double off_diagonal_mass(const GeoMatrix& geo) {
    double sum = 0.0;
    int rows = 0;
    for (std::size_t i = 0; i < geo.g.rows(); ++i) {
        if (geo.empty_row[i]) continue;
        for (std::size_t j = 0; j < geo.g.cols(); ++j)
            if (j != i) sum += geo.g(i, j);
        ++rows;
    }
    return rows ? sum / rows : 0.0;
}

/// Share of the population (by native count) that speaks `language`.
inline double total_speaker_share(const Tally& t, int language) {
    return t.agents ? static_cast<double>(t.total[language]) / static_cast<double>(t.agents) : 0.0;
}

struct Snapshot {
    int step = 0;
    int year = 0;
    Tally tally;
    bool operator==(const Snapshot&) const = default;
};

/// One replication: the initial state plus one snapshot per step.
struct Trajectory {
    int replication = 0;
    std::uint64_t seed = 0;
    std::vector<Snapshot> snapshots;
    bool operator==(const Trajectory&) const = default;
};

struct SummaryPoint {
    int step = 0;
    int year = 0;
    double mean = 0.0;
    double std_error = 0.0;  // sample stdev / sqrt(R)
    int replications = 0;
};

struct EnsembleSummary {
    std::vector<SummaryPoint> points;
};

using SnapshotSelector = std::function<double(const Snapshot&)>;

inline EnsembleSummary ensemble_summary(std::span<const Trajectory> runs, const SnapshotSelector& select) {
    if (runs.size() < 2)
        throw Error(Errc::InsufficientReplications, "a standard error needs >= 2 replications, got " + std::to_string(runs.size()));
    const std::size_t steps = runs.front().snapshots.size();
    for (const auto& r : runs)
        if (r.snapshots.size() != steps) throw Error(Errc::ValueError, "replications have different lengths");
    EnsembleSummary out;
    const double count = static_cast<double>(runs.size());
    for (std::size_t s = 0; s < steps; ++s) {
        double mean = 0.0;
        for (const auto& r : runs) mean += select(r.snapshots[s]);
        mean /= count;
        double ss = 0.0;
        for (const auto& r : runs) {
            const double d = select(r.snapshots[s]) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / (count - 1.0));
        out.points.push_back({runs.front().snapshots[s].step, runs.front().snapshots[s].year, mean, sd / std::sqrt(count),
                              static_cast<int>(runs.size())});
    }
    return out;
}

}  // namespace langsim
