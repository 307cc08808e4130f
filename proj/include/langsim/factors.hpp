#pragma once

// Pairwise learning factors and the zone x zone x 5 factor tensor.
//
// Slice order is fixed: 0 similarity, 1 extroversion (FDI outflow of the
// target zone), 2 export share, 3 soft power of the target zone,
// 4 migration preference m_ij. Values are raw; no scaling is applied.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "langsim/data.hpp"
#include "langsim/error.hpp"
#include "langsim/grid.hpp"
#include "langsim/zone_matrix.hpp"

namespace langsim {

inline constexpr std::size_t kFactorCount = 5;

inline constexpr std::array<std::string_view, kFactorCount> kFactorNames = {
    "similarity", "extroversion", "export_share", "soft_power", "migration",
};

/// Row-stochastic residence-change probabilities.
struct MigrationMatrix {
    Matrix m;
    std::size_t size() const noexcept { return m.rows(); }
};

inline double similarity(std::size_t i, std::size_t j, const FamilyEncodingTable& fam) {
    double dot = 0.0;
    for (std::size_t f = 0; f < fam.vec.cols(); ++f) dot += fam.vec(i, f) * fam.vec(j, f);
    return dot;
}

/// Openness of the target zone; independent of the learner's zone i.
inline double extroversion(std::size_t /*i*/, std::size_t j, const FdiTable& fdi) { return fdi.fdi.at(j); }

inline double export_share(std::size_t i, std::size_t j, const ExportShareTable& t) { return t.share(i, j); }

inline double soft_power(std::size_t /*i*/, std::size_t j, const SoftPowerTable& s) { return s.score.at(j); }

/// m_ij = e_ij / sum_k e_ik.
inline MigrationMatrix migration_matrix(const MigrantStockTable& stock) {
    const std::size_t n = stock.stock.rows();
    MigrationMatrix out{Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t sum = 0;
        for (std::int64_t v : stock.stock.row(i)) sum += v;
        if (sum <= 0) throw Error(Errc::ZeroRowSum, "migrant stock row " + std::to_string(i) + " sums to zero");
        const auto total = static_cast<double>(sum);
        for (std::size_t j = 0; j < n; ++j) out.m(i, j) = static_cast<double>(stock.stock(i, j)) / total;
    }
    return out;
}

/// Zone-level value from country-level values weighted by each country's GDP share.
inline double gdp_weighted_aggregate(std::span<const double> values, std::span<const double> gdp) {
    if (values.empty() || values.size() != gdp.size())
        throw Error(Errc::EmptyInput, "need equally many values and GDP entries (>= 1)");
    double total_gdp = 0.0;
    for (double g : gdp) {
        if (!(g > 0.0)) throw Error(Errc::NonPositiveGdp, "GDP must be positive");
        total_gdp += g;
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a) acc += values[a] * (gdp[a] / total_gdp);
    return acc;
}

class FactorTensor {
public:
    FactorTensor() = default;
    explicit FactorTensor(std::size_t zones) : n_(zones), data_(zones * zones * kFactorCount, 0.0) {}

    std::size_t zones() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * n_ + j) * kFactorCount + k]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[(i * n_ + j) * kFactorCount + k]; }

    /// The 5-vector describing pair (i, j).
    std::span<const double, kFactorCount> features(std::size_t i, std::size_t j) const {
        return std::span<const double, kFactorCount>(data_.data() + (i * n_ + j) * kFactorCount, kFactorCount);
    }

    Matrix slice(std::size_t k) const {
        Matrix m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j, k);
        return m;
    }

    bool operator==(const FactorTensor&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline FactorTensor build_factor_tensor(const FamilyEncodingTable& fam, const FdiTable& fdi, const ExportShareTable& exp,
                                        const SoftPowerTable& soft, const MigrationMatrix& mig) {
    const std::size_t n = fam.zones.size();
    if (fdi.fdi.size() != n || exp.share.rows() != n || soft.score.size() != n || mig.size() != n)
        throw Error(Errc::SchemaMismatch, "factor inputs disagree on the number of zones");
    FactorTensor x(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            x(i, j, 0) = similarity(i, j, fam);
            x(i, j, 1) = extroversion(i, j, fdi);
            x(i, j, 2) = export_share(i, j, exp);
            x(i, j, 3) = soft_power(i, j, soft);
            x(i, j, 4) = mig.m(i, j);
        }
    return x;
}

inline FactorTensor build_factor_tensor(const DataBundle& b) {
    return build_factor_tensor(b.family, b.fdi, b.export_share, b.soft_power, migration_matrix(b.migrant_stock));
}

// On-disk layout: factor_<k>_<name>.csv per slice (k = 1..5) plus migration_matrix.csv.

inline std::string factor_slice_filename(std::size_t k) {
    return "factor_" + std::to_string(k + 1) + "_" + std::string(kFactorNames[k]) + ".csv";
}

inline constexpr std::string_view kMigrationMatrixFile = "migration_matrix.csv";

/// Writes the slices and migration matrix; returns the paths written, in order.
inline std::vector<std::filesystem::path> write_factors(const std::filesystem::path& dir, const std::vector<std::string>& zones,
                                                        const FactorTensor& x, const MigrationMatrix& mig) {
    std::vector<std::filesystem::path> written;
    for (std::size_t k = 0; k < kFactorCount; ++k) {
        written.push_back(dir / factor_slice_filename(k));
        write_zone_matrix(written.back(), zones, x.slice(k));
    }
    written.push_back(dir / kMigrationMatrixFile);
    write_zone_matrix(written.back(), zones, mig.m);
    return written;
}

struct FactorFiles {
    std::vector<std::string> zones;
    FactorTensor tensor;
};

inline FactorFiles read_factor_tensor(const std::filesystem::path& dir) {
    FactorFiles out;
    for (std::size_t k = 0; k < kFactorCount; ++k) {
        const ZoneMatrix slice = read_zone_matrix(dir / factor_slice_filename(k));
        if (k == 0) {
            out.zones = slice.zones;
            out.tensor = FactorTensor(slice.zones.size());
        } else if (slice.zones != out.zones) {
            throw Error(Errc::ZoneOrderMismatch, (dir / factor_slice_filename(k)).string() + ": zone order differs from slice 1");
        }
        for (std::size_t i = 0; i < out.zones.size(); ++i)
            for (std::size_t j = 0; j < out.zones.size(); ++j) out.tensor(i, j, k) = slice.values(i, j);
    }
    return out;
}

/// Reads a migration matrix file, checks it is row-stochastic to 1e-6 (the
/// file carries 9 significant digits) and renormalizes each row.
inline MigrationMatrix read_migration_matrix(const std::filesystem::path& path, std::vector<std::string>* zones = nullptr) {
    ZoneMatrix zm = read_zone_matrix(path);
    for (std::size_t i = 0; i < zm.values.rows(); ++i) {
        double sum = 0.0;
        for (double v : zm.values.row(i)) {
            if (v < 0.0) throw Error(Errc::ValueError, path.string() + ": negative migration probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw Error(Errc::ValueError, path.string() + ": row " + zm.zones[i] + " sums to " + format_number(sum));
        for (double& v : zm.values.row(i)) v /= sum;
    }
    if (zones) *zones = zm.zones;
    return MigrationMatrix{std::move(zm.values)};
}

}  // namespace langsim
