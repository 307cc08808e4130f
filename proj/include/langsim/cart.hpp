#pragma once

// CART regression tree with exhaustive variance-reduction split search.
//
// Split candidates are midpoints between consecutive distinct sorted values of
// a feature. The best split maximises the SSE reduction; ties go to the lowest
// feature index, then the lowest threshold. Prediction routes left when
// x[feature] <= threshold.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "langsim/error.hpp"
#include "langsim/factors.hpp"
#include "langsim/rng.hpp"

namespace langsim {

using Features = std::array<double, kFactorCount>;

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

struct TreeParams {
    int max_depth = kUnlimitedDepth;
    int min_leaf = 1;
    int max_features = 0;  // features examined per split; 0 or >= kFactorCount means all
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // mean target of the samples routed here
    std::uint32_t samples = 0;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
public:
    RegressionTree() = default;
    RegressionTree(std::vector<TreeNode> nodes, TreeParams params) : nodes_(std::move(nodes)), params_(params) {}

    double predict(const Features& x) const {
        int k = 0;
        while (!nodes_[k].is_leaf()) {
            const TreeNode& n = nodes_[k];
            k = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes_[k].value;
    }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const TreeParams& params() const noexcept { return params_; }

    int depth() const { return nodes_.empty() ? 0 : depth_from(0); }

    std::size_t leaf_count() const {
        return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
    }

    bool operator==(const RegressionTree& o) const {
        return nodes_ == o.nodes_ && params_.max_depth == o.params_.max_depth && params_.min_leaf == o.params_.min_leaf &&
               params_.max_features == o.params_.max_features;
    }

private:
    int depth_from(int k) const {
        const TreeNode& n = nodes_[k];
        if (n.is_leaf()) return 0;
        return 1 + std::max(depth_from(n.left), depth_from(n.right));
    }

    std::vector<TreeNode> nodes_;
    TreeParams params_;
};

namespace detail {

class CartBuilder {
public:
    CartBuilder(std::span<const Features> x, std::span<const double> y, TreeParams params, Xoshiro256* feature_rng)
        : x_(x), y_(y), params_(params), rng_(feature_rng) {}

    std::vector<TreeNode> build() {
        std::vector<std::uint32_t> idx(x_.size());
        std::iota(idx.begin(), idx.end(), 0u);
        grow(idx, 0);
        return std::move(nodes_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    int grow(std::vector<std::uint32_t>& idx, int depth) {
        const int self = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        double sum = 0.0;
        bool constant = true;
        for (auto k : idx) {
            sum += y_[k];
            constant = constant && y_[k] == y_[idx.front()];
        }
        nodes_[self].value = sum / static_cast<double>(idx.size());
        nodes_[self].samples = static_cast<std::uint32_t>(idx.size());

        if (constant || depth >= params_.max_depth || idx.size() < 2 * static_cast<std::size_t>(params_.min_leaf))
            return self;
        const Split best = find_split(idx, sum);
        if (best.feature < 0) return self;

        std::vector<std::uint32_t> left, right;
        for (auto k : idx) (x_[k][best.feature] <= best.threshold ? left : right).push_back(k);
        idx.clear();
        idx.shrink_to_fit();

        nodes_[self].feature = best.feature;
        nodes_[self].threshold = best.threshold;
        const int l = grow(left, depth + 1);
        nodes_[self].left = l;
        const int r = grow(right, depth + 1);
        nodes_[self].right = r;
        return self;
    }

    std::vector<int> candidate_features() {
        std::vector<int> features(kFactorCount);
        std::iota(features.begin(), features.end(), 0);
        const auto m = static_cast<std::size_t>(params_.max_features);
        if (rng_ == nullptr || m == 0 || m >= kFactorCount) return features;
        for (std::size_t k = 0; k < m; ++k) {
            const auto pick = k + uniform_below(*rng_, kFactorCount - k);
            std::swap(features[k], features[pick]);
        }
        features.resize(m);
        std::sort(features.begin(), features.end());
        return features;
    }

    Split find_split(const std::vector<std::uint32_t>& idx, double total) {
        Split best;
        const std::size_t n = idx.size();
        const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
        std::vector<std::uint32_t> order;
        for (int f : candidate_features()) {
            order = idx;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return x_[a][f] < x_[b][f]; });
            double left_sum = 0.0;
            for (std::size_t p = 1; p < n; ++p) {
                left_sum += y_[order[p - 1]];
                const double lo = x_[order[p - 1]][f];
                const double hi = x_[order[p]][f];
                if (!(lo < hi) || p < min_leaf || n - p < min_leaf) continue;
                const double nl = static_cast<double>(p);
                const double nr = static_cast<double>(n - p);
                const double diff = left_sum / nl - (total - left_sum) / nr;
                const double gain = nl * nr / static_cast<double>(n) * diff * diff;
                // same partition via another feature can differ in the last ulp; keep the earlier one
                if (gain > best.gain * (1.0 + 1e-10)) {
                    double mid = lo + (hi - lo) / 2.0;
                    if (!(mid < hi)) mid = lo;
                    best = Split{f, mid, gain};
                }
            }
        }
        return best;
    }

    std::span<const Features> x_;
    std::span<const double> y_;
    TreeParams params_;
    Xoshiro256* rng_;
    std::vector<TreeNode> nodes_;
};

}  // namespace detail

/// Fits a tree on (x, y). `feature_rng` is only consulted when
/// params.max_features restricts the features examined per split.
inline RegressionTree fit_cart(std::span<const Features> x, std::span<const double> y, TreeParams params,
                               Xoshiro256* feature_rng = nullptr) {
    if (x.empty()) throw Error(Errc::EmptyTrainingSet, "cannot fit a tree on zero samples");
    if (x.size() != y.size()) throw Error(Errc::ValueError, "feature and target counts differ");
    if (params.max_depth < 1 || params.min_leaf < 1)
        throw Error(Errc::ConfigError, "max_depth and min_leaf must be >= 1");
    return RegressionTree(detail::CartBuilder(x, y, params, feature_rng).build(), params);
}

}  // namespace langsim
