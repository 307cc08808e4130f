#include <gtest/gtest.h>

#include <numeric>

#include "langsim/factors.hpp"
#include "langsim/rng.hpp"
#include "support.hpp"

using namespace langsim;
namespace ts = testing_support;

TEST(Factors, Similarity) {
    const auto& fam = ts::shipped_bundle().family;
    EXPECT_EQ(similarity(ts::zone("English"), ts::zone("German"), fam), 1.0);
    EXPECT_EQ(similarity(ts::zone("Japanese"), ts::zone("Korean"), fam), 0.0);
    EXPECT_EQ(similarity(ts::zone("French"), ts::zone("French"), fam), 1.0);
    EXPECT_EQ(similarity(ts::zone("Chinese"), ts::zone("English"), fam), 0.0);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(similarity(i, j, fam), similarity(j, i, fam));
}

TEST(Factors, Extroversion) {
    const auto& fdi = ts::shipped_bundle().fdi;
    EXPECT_DOUBLE_EQ(extroversion(ts::zone("Chinese"), ts::zone("Japanese"), fdi), 3.434178695);
    EXPECT_DOUBLE_EQ(extroversion(ts::zone("English"), ts::zone("Javanese"), fdi), -1.265879213);
    for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(extroversion(0, j, fdi), extroversion(13, j, fdi));
}

TEST(Factors, ExportShare) {
    const auto& ex = ts::shipped_bundle().export_share;
    EXPECT_DOUBLE_EQ(export_share(ts::zone("Hindustani"), ts::zone("English"), ex), 0.603279);
    EXPECT_EQ(export_share(ts::zone("Japanese"), ts::zone("Swahili"), ex), 0.0);
    for (double v : ex.share.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Factors, SoftPower) {
    const auto& sp = ts::shipped_bundle().soft_power;
    EXPECT_DOUBLE_EQ(soft_power(3, ts::zone("English"), sp), 293.79);
    EXPECT_DOUBLE_EQ(soft_power(9, ts::zone("German"), sp), 144.12);
    for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(soft_power(0, j, sp), soft_power(19, j, sp));
}

TEST(Factors, MigrationRowsAreStochastic) {
    const MigrationMatrix m = migration_matrix(ts::shipped_bundle().migrant_stock);
    ASSERT_EQ(m.size(), 20u);
    for (std::size_t i = 0; i < 20; ++i) {
        double s = 0;
        for (double v : m.m.row(i)) {
            EXPECT_GE(v, 0.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Factors, MigrationTurkishToGermanByHand) {
    // Turkish origin row as printed in the migrant stock table
    const double row[] = {0, 524224, 103, 4329, 843, 0, 10244, 0, 744, 301950, 1896, 0, 1749222, 2422, 0, 0, 0, 77800698, 0, 20851};
    const double total = std::accumulate(std::begin(row), std::end(row), 0.0);
    const MigrationMatrix m = migration_matrix(ts::shipped_bundle().migrant_stock);
    EXPECT_NEAR(m.m(ts::zone("Turkish"), ts::zone("German")), 1749222.0 / total, 1e-15);
    EXPECT_NEAR(m.m(ts::zone("Turkish"), ts::zone("Turkish")), 77800698.0 / total, 1e-15);
}

TEST(Factors, MigrationDegenerateRows) {
    MigrantStockTable t;
    t.stock = Grid<std::int64_t>(2, 2, 0);
    t.stock(0, 0) = 5;
    t.stock(1, 0) = 1;
    t.stock(1, 1) = 3;
    const MigrationMatrix m = migration_matrix(t);
    EXPECT_EQ(m.m(0, 0), 1.0);
    EXPECT_EQ(m.m(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(m.m(1, 1), 0.75);
    t.stock(0, 0) = 0;
    try {
        migration_matrix(t);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ZeroRowSum);
    }
}

TEST(Factors, GdpWeightedAggregate) {
    const std::vector<double> one{7.5}, g1{3.0};
    EXPECT_DOUBLE_EQ(gdp_weighted_aggregate(one, g1), 7.5);
    const std::vector<double> v2{2, 4}, g2{5, 5};
    EXPECT_DOUBLE_EQ(gdp_weighted_aggregate(v2, g2), 3.0);
    const std::vector<double> v3{6, 3, 1}, g3{1, 2, 3};
    EXPECT_NEAR(gdp_weighted_aggregate(v3, g3), 2.5, 1e-15);

    const std::vector<double> empty;
    try {
        gdp_weighted_aggregate(empty, empty);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyInput);
    }
    const std::vector<double> bad{1, 0};
    try {
        gdp_weighted_aggregate(v2, bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonPositiveGdp);
    }
}

TEST(Factors, GdpAggregateScaleInvariant) {
    Xoshiro256 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(5), g(5), g_scaled(5);
        const double c = 0.001 + 1000 * uniform01(rng);
        for (int k = 0; k < 5; ++k) {
            v[k] = standard_normal(rng);
            g[k] = 0.1 + uniform01(rng);
            g_scaled[k] = g[k] * c;
        }
        EXPECT_NEAR(gdp_weighted_aggregate(v, g), gdp_weighted_aggregate(v, g_scaled), 1e-12);
    }
}

TEST(Factors, TensorMatchesFactorOps) {
    const auto& b = ts::shipped_bundle();
    const FactorTensor& x = ts::shipped_tensor();
    const MigrationMatrix m = migration_matrix(b.migrant_stock);
    ASSERT_EQ(x.zones(), 20u);
    EXPECT_EQ(x(ts::zone("English"), ts::zone("German"), 0), 1.0);
    Xoshiro256 rng(2024);
    for (int k = 0; k < 5; ++k) {
        const auto i = uniform_below(rng, 20), j = uniform_below(rng, 20);
        EXPECT_EQ(x(i, j, 0), similarity(i, j, b.family));
        EXPECT_EQ(x(i, j, 1), extroversion(i, j, b.fdi));
        EXPECT_EQ(x(i, j, 2), export_share(i, j, b.export_share));
        EXPECT_EQ(x(i, j, 3), soft_power(i, j, b.soft_power));
        EXPECT_EQ(x(i, j, 4), m.m(i, j));
    }
}

TEST(Factors, TensorSliceInvariants) {
    const FactorTensor& x = ts::shipped_tensor();
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j) {
            EXPECT_TRUE(x(i, j, 0) == 0.0 || x(i, j, 0) == 1.0);
            EXPECT_EQ(x(i, j, 1), x(0, j, 1));
            EXPECT_EQ(x(i, j, 3), x(0, j, 3));
            EXPECT_GE(x(i, j, 2), 0.0);
            EXPECT_LE(x(i, j, 2), 1.0);
            EXPECT_GE(x(i, j, 4), 0.0);
            EXPECT_LE(x(i, j, 4), 1.0);
        }
}

TEST(Factors, FilesRoundTripAndAreStable) {
    const auto& b = ts::shipped_bundle();
    std::vector<std::string> names;
    for (const auto& z : b.catalog().zones) names.push_back(z.name);
    const MigrationMatrix m = migration_matrix(b.migrant_stock);
    const auto d1 = ts::scratch_dir("factors_a"), d2 = ts::scratch_dir("factors_b");
    const auto files = write_factors(d1, names, ts::shipped_tensor(), m);
    write_factors(d2, names, ts::shipped_tensor(), m);
    ASSERT_EQ(files.size(), 6u);
    for (const auto& f : files) EXPECT_EQ(read_text_file(f), read_text_file(d2 / f.filename()));

    const FactorFiles back = read_factor_tensor(d1);
    EXPECT_EQ(back.zones, names);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j)
            for (std::size_t k = 0; k < 5; ++k) {
                const double a = ts::shipped_tensor()(i, j, k);
                EXPECT_NEAR(back.tensor(i, j, k), a, 1e-8 * std::max(1.0, std::abs(a)));
            }
    const MigrationMatrix mb = read_migration_matrix(d1 / std::string(kMigrationMatrixFile));
    for (std::size_t i = 0; i < 20; ++i) {
        double s = 0;
        for (double v : mb.m.row(i)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}
