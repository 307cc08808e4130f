#include <gtest/gtest.h>

#include "langsim/forest.hpp"
#include "langsim/regress.hpp"
#include "support.hpp"

using namespace langsim;
namespace ts = testing_support;

namespace {

struct Toy {
    std::vector<Features> x;
    std::vector<double> y;
};

Toy toy(int n, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Toy t;
    for (int k = 0; k < n; ++k) {
        Features f;
        for (auto& v : f) v = uniform01(rng);
        t.x.push_back(f);
        t.y.push_back(0.5 * f[0] + 0.2 * f[3] * f[3] + 0.05 * standard_normal(rng));
    }
    return t;
}

}  // namespace

TEST(Forest, SingleTreeWithoutBootstrapEqualsCart) {
    const Toy d = toy(80, 1);
    ForestParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    p.max_depth = 4;
    const Forest f = fit_forest(d.x, d.y, p);
    const RegressionTree t = fit_cart(d.x, d.y, TreeParams{4, 1, 0});
    ASSERT_EQ(f.size(), 1u);
    EXPECT_TRUE(f.trees()[0] == t);
    for (const auto& x : d.x) EXPECT_EQ(f.predict(x), t.predict(x));
}

TEST(Forest, ConstantTargets) {
    Toy d = toy(40, 2);
    std::fill(d.y.begin(), d.y.end(), 0.125);
    const Forest f = fit_forest(d.x, d.y, ForestParams{});
    for (int k = 0; k < 20; ++k) EXPECT_DOUBLE_EQ(f.predict({k * 0.1, 0, 1, 2, -3}), 0.125);
}

TEST(Forest, SameSeedSameModel) {
    const Toy d = toy(100, 3);
    ForestParams p;
    p.seed = 77;
    const Forest a = fit_forest(d.x, d.y, p);
    const Forest b = fit_forest(d.x, d.y, p);
    EXPECT_TRUE(a == b);
    EXPECT_EQ(serialize_model(Model{a}), serialize_model(Model{b}));
    p.threads = 4;
    EXPECT_TRUE(fit_forest(d.x, d.y, p) == a);
    p.seed = 78;
    EXPECT_FALSE(fit_forest(d.x, d.y, p) == a);
}

TEST(Forest, PredictionsStayInTargetRange) {
    const Toy d = toy(120, 4);
    const Forest f = fit_forest(d.x, d.y, ForestParams{});
    const double lo = *std::min_element(d.y.begin(), d.y.end());
    const double hi = *std::max_element(d.y.begin(), d.y.end());
    Xoshiro256 rng(5);
    for (int k = 0; k < 500; ++k) {
        Features x;
        for (auto& v : x) v = 3 * uniform01(rng) - 1;
        const double p = f.predict(x);
        EXPECT_GE(p, lo);
        EXPECT_LE(p, hi);
    }
}

TEST(Forest, TreeSeedsFollowMasterSeed) {
    const Toy d = toy(30, 6);
    ForestParams p;
    p.n_trees = 5;
    p.seed = 11;
    const Forest f = fit_forest(d.x, d.y, p);
    for (std::uint64_t t = 0; t < 5; ++t) EXPECT_EQ(f.tree_seeds()[t], mix_seed({11, t}));
    for (const auto& tree : f.trees()) EXPECT_LE(tree.depth(), 4);
}

TEST(Forest, FixtureProbeIsMeanOfTrees) {
    const TrainingSet train = make_training_set(ts::shipped_bundle().known, ts::shipped_tensor());
    ForestParams p;
    p.seed = 1;
    const Forest f = fit_forest(train, p);
    ASSERT_EQ(f.size(), 100u);
    const Features probe{1, 1.73, 0.3, 293.79, 0.2};
    double sum = 0;
    for (const auto& t : f.trees()) sum += t.predict(probe);
    EXPECT_DOUBLE_EQ(f.predict(probe), sum / 100);
    EXPECT_GE(f.predict(probe), 0.0);
    EXPECT_LE(f.predict(probe), 1.0);
}
