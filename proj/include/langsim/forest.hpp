#pragma once

// Random forest regressor: bagged CART trees, prediction = mean over trees.
// Tree t is grown from its own stream seeded by mix_seed({seed, t}), so a
// forest is a pure function of (training data, params) regardless of how
// many threads fit it.

#include <cstdint>
#include <span>
#include <vector>

#include "langsim/cart.hpp"
#include "langsim/error.hpp"
#include "langsim/parallel.hpp"
#include "langsim/rng.hpp"

namespace langsim {

struct ForestParams {
    int n_trees = 100;
    int max_depth = 4;
    int min_leaf = 1;
    int max_features = 0;  // 0 = all features at every split
    bool bootstrap = true;
    std::uint64_t seed = 0;
    int threads = 1;  // does not affect the result
};

class Forest {
public:
    Forest() = default;
    Forest(std::vector<RegressionTree> trees, std::vector<std::uint64_t> tree_seeds)
        : trees_(std::move(trees)), seeds_(std::move(tree_seeds)) {}

    double predict(const Features& x) const {
        double sum = 0.0;
        for (const auto& t : trees_) sum += t.predict(x);
        return sum / static_cast<double>(trees_.size());
    }

    std::size_t size() const noexcept { return trees_.size(); }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    const std::vector<std::uint64_t>& tree_seeds() const noexcept { return seeds_; }

    bool operator==(const Forest&) const = default;

private:
    std::vector<RegressionTree> trees_;
    std::vector<std::uint64_t> seeds_;
};

inline Forest fit_forest(std::span<const Features> x, std::span<const double> y, const ForestParams& params) {
    if (x.empty()) throw Error(Errc::EmptyTrainingSet, "cannot fit a forest on zero samples");
    if (params.n_trees < 1) throw Error(Errc::ConfigError, "n_trees must be >= 1");
    const TreeParams tree_params{params.max_depth, params.min_leaf, params.max_features};
    const auto n_trees = static_cast<std::size_t>(params.n_trees);
    std::vector<RegressionTree> trees(n_trees);
    std::vector<std::uint64_t> seeds(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) seeds[t] = mix_seed({params.seed, t});

    parallel_for(n_trees, params.threads, [&](std::size_t t) {
        Xoshiro256 rng(seeds[t]);
        if (!params.bootstrap) {
            trees[t] = fit_cart(x, y, tree_params, &rng);
            return;
        }
        std::vector<Features> bx(x.size());
        std::vector<double> by(x.size());
        for (std::size_t s = 0; s < x.size(); ++s) {
            const auto k = uniform_below(rng, x.size());
            bx[s] = x[k];
            by[s] = y[k];
        }
        trees[t] = fit_cart(bx, by, tree_params, &rng);
    });
    return Forest(std::move(trees), std::move(seeds));
}

}  // namespace langsim
