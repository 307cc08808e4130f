#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "langsim/rng.hpp"
#include "langsim/shapiro_wilk.hpp"
#include "langsim/text.hpp"
#include "support.hpp"

using namespace langsim;
namespace ts = testing_support;

namespace {

const nlohmann::json& reference() {
    static const nlohmann::json j =
        nlohmann::json::parse(read_text_file(ts::source_dir() / "tests" / "fixtures" / "shapiro_reference.json"));
    return j;
}

}  // namespace

TEST(Shapiro, MatchesReferenceImplementation) {
    ASSERT_GE(reference().at("samples").size(), 5u);
    for (const auto& s : reference().at("samples")) {
        const auto values = s.at("values").get<std::vector<double>>();
        const ShapiroResult r = shapiro_wilk(values);
        EXPECT_NEAR(r.w, s.at("w").get<double>(), 1e-4) << s.at("name");
        EXPECT_NEAR(r.p, s.at("p").get<double>(), 1e-4) << s.at("name");
    }
}

TEST(Shapiro, ExponentialSampleRejected) {
    for (const auto& s : reference().at("samples"))
        if (s.at("name") == "exponential_20") {
            const ShapiroResult r = shapiro_wilk(s.at("values").get<std::vector<double>>());
            EXPECT_LT(r.p, 0.05);
            return;
        }
    FAIL() << "no exponential_20 sample";
}

TEST(Shapiro, NormalTwentyNotRejected) {
    for (const auto& s : reference().at("samples"))
        if (s.at("name") == "normal_20") {
            const ShapiroResult r = shapiro_wilk(s.at("values").get<std::vector<double>>());
            EXPECT_GT(r.p, 0.05);
            return;
        }
    FAIL() << "no normal_20 sample";
}

TEST(Shapiro, Errors) {
    const std::vector<double> same{1, 1, 1};
    try {
        shapiro_wilk(same);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DegenerateSample);
    }
    const std::vector<double> two{1, 2};
    try {
        shapiro_wilk(two);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SampleTooSmall);
    }
    const std::vector<double> big(5001, 0.0);
    try {
        shapiro_wilk(big);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SampleTooLarge);
    }
}

TEST(Shapiro, AffineInvariance) {
    Xoshiro256 rng(12);
    for (int n : {3, 7, 12, 50, 150}) {
        std::vector<double> x(n), y(n);
        for (int k = 0; k < n; ++k) {
            x[k] = standard_normal(rng) + 0.3 * uniform01(rng);
            y[k] = 2.5 * x[k] - 7.0;
        }
        const ShapiroResult a = shapiro_wilk(x), b = shapiro_wilk(y);
        EXPECT_NEAR(a.w, b.w, 1e-10) << n;
        EXPECT_NEAR(a.p, b.p, 1e-10) << n;
        EXPECT_GT(a.w, 0.0);
        EXPECT_LE(a.w, 1.0);
        EXPECT_GE(a.p, 0.0);
        EXPECT_LE(a.p, 1.0);
    }
}

TEST(Shapiro, OrderDoesNotMatter) {
    std::vector<double> x{3.1, -0.2, 0.7, 1.9, 2.2, -1.4, 0.05, 0.9};
    const ShapiroResult a = shapiro_wilk(x);
    std::reverse(x.begin(), x.end());
    const ShapiroResult b = shapiro_wilk(x);
    EXPECT_EQ(a.w, b.w);
    EXPECT_EQ(a.p, b.p);
}
