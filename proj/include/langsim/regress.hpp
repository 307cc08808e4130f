#pragma once

// Supervised completion of the sparse transition matrix: training set
// assembly from the factor tensor, residual analysis, dense completion and
// a portable text format for fitted models.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "langsim/cart.hpp"
#include "langsim/data.hpp"
#include "langsim/error.hpp"
#include "langsim/factors.hpp"
#include "langsim/forest.hpp"
#include "langsim/grid.hpp"
#include "langsim/rng.hpp"
#include "langsim/shapiro_wilk.hpp"
#include "langsim/text.hpp"

namespace langsim {

struct TrainingRow {
    int i = 0;
    int j = 0;
    Features x{};
    double target = 0.0;
};

struct TrainingSet {
    std::vector<TrainingRow> rows;

    std::size_t size() const noexcept { return rows.size(); }

    std::vector<Features> features() const {
        std::vector<Features> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.x);
        return out;
    }
    std::vector<double> targets() const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.target);
        return out;
    }
};

inline Features features_of(const FactorTensor& x, std::size_t i, std::size_t j) {
    Features f;
    const auto v = x.features(i, j);
    std::copy(v.begin(), v.end(), f.begin());
    return f;
}

/// Pairs every known entry with its factor vector. Diagonal entries are
/// rejected: self-transitions are fixed at zero in the completed matrix.
inline TrainingSet make_training_set(const SparseTransitionInput& known, const FactorTensor& x) {
    TrainingSet set;
    std::set<std::pair<int, int>> seen;
    const int n = static_cast<int>(x.zones());
    for (const auto& e : known.entries) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
            throw Error(Errc::ValueError, "known entry (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") is outside the " +
                                              std::to_string(n) + "-zone tensor");
        if (e.i == e.j) throw Error(Errc::ValueError, "known entry on the diagonal (" + std::to_string(e.i) + ")");
        if (e.t < 0.0 || e.t > 1.0) throw Error(Errc::ValueError, "known t outside [0,1]");
        if (!seen.insert({e.i, e.j}).second) throw Error(Errc::ValueError, "duplicate known entry");
        set.rows.push_back({e.i, e.j, features_of(x, e.i, e.j), e.t});
    }
    if (set.rows.empty()) throw Error(Errc::EmptyTrainingSet, "no known transition entries");
    return set;
}

inline RegressionTree fit_cart(const TrainingSet& train, TreeParams params) {
    const auto x = train.features();
    const auto y = train.targets();
    return fit_cart(x, y, params);
}

inline Forest fit_forest(const TrainingSet& train, const ForestParams& params) {
    const auto x = train.features();
    const auto y = train.targets();
    return fit_forest(x, y, params);
}

using Model = std::variant<RegressionTree, Forest>;

inline double predict(const Model& model, const Features& x) {
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

struct Residual {
    int i = 0;
    int j = 0;
    double target = 0.0;
    double prediction = 0.0;
    double epsilon = 0.0;  // target - prediction
};

struct ResidualReport {
    std::vector<Residual> residuals;
    double mse = 0.0;
    double variance = 0.0;  // unbiased sample variance of epsilon
    std::optional<ShapiroResult> shapiro;  // empty when the residuals are degenerate
    bool shapiro_degenerate = false;
};

inline ResidualReport residual_report(const Model& model, const TrainingSet& train) {
    if (train.size() < 3) throw Error(Errc::SampleTooSmall, "residual analysis needs at least 3 training rows");
    ResidualReport report;
    std::vector<double> eps;
    for (const auto& r : train.rows) {
        const double pred = predict(model, r.x);
        report.residuals.push_back({r.i, r.j, r.target, pred, r.target - pred});
        eps.push_back(r.target - pred);
    }
    const double n = static_cast<double>(eps.size());
    double mean = 0.0, sq = 0.0;
    for (double e : eps) {
        mean += e;
        sq += e * e;
    }
    mean /= n;
    report.mse = sq / n;
    double ss = 0.0;
    for (double e : eps) ss += (e - mean) * (e - mean);
    report.variance = ss / (n - 1.0);
    try {
        report.shapiro = shapiro_wilk(eps);
    } catch (const Error& e) {
        if (e.code() != Errc::DegenerateSample) throw;
        report.shapiro_degenerate = true;
    }
    return report;
}

/// Dense transition matrix: known cells verbatim, diagonal 0, every other
/// cell the model prediction clamped to [0, 1].
inline Matrix complete_transition_matrix(const SparseTransitionInput& known, const FactorTensor& x, const Model& model) {
    const std::size_t n = x.zones();
    Grid<int> is_known(n, n, 0);
    Matrix t(n, n, 0.0);
    for (const auto& e : known.entries) {
        if (e.i < 0 || e.j < 0 || static_cast<std::size_t>(e.i) >= n || static_cast<std::size_t>(e.j) >= n)
            throw Error(Errc::ValueError, "known entry outside the tensor");
        if (e.i == e.j) throw Error(Errc::ValueError, "known entry on the diagonal");
        is_known(e.i, e.j) = 1;
        t(e.i, e.j) = e.t;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || is_known(i, j)) continue;
            t(i, j) = std::clamp(predict(model, features_of(x, i, j)), 0.0, 1.0);
        }
    return t;
}

// ---------------------------------------------------------------------------
// Substitute known-T fixture

struct HeuristicKnownOptions {
    int top_k = 8;
    double noise_sigma = 0.005;
    std::uint64_t seed = 2018;
    bool drop_duplicate_features = true;
};

/// For each zone i, t_ij = alpha * beta2(j) for the top_k second-language
/// zones j != i (ties by lower id), plus N(0, sigma^2) measurement noise,
/// clamped to [0, 1]. Pairs whose factor vector repeats an earlier pair are
/// dropped so the training rows have unique features.
inline SparseTransitionInput heuristic_known_transitions(const InitialDistribution& dist, const FactorTensor& x,
                                                         const HeuristicKnownOptions& opts = {}) {
    const std::size_t n = dist.l2_share.size();
    if (x.zones() != n) throw Error(Errc::SchemaMismatch, "distribution and tensor disagree on zone count");
    std::vector<int> ranked(n);
    for (std::size_t k = 0; k < n; ++k) ranked[k] = static_cast<int>(k);
    std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) { return dist.l2_share[a] > dist.l2_share[b]; });

    Xoshiro256 rng(mix_seed({opts.seed}));
    std::set<Features> seen;
    SparseTransitionInput out;
    for (std::size_t i = 0; i < n; ++i) {
        int taken = 0;
        for (int j : ranked) {
            if (taken == opts.top_k) break;
            if (static_cast<std::size_t>(j) == i) continue;
            ++taken;
            if (opts.drop_duplicate_features && !seen.insert(features_of(x, i, j)).second) continue;
            double t = dist.alpha * dist.l2_share[j];
            if (opts.noise_sigma > 0.0) t += opts.noise_sigma * standard_normal(rng);
            out.entries.push_back({static_cast<int>(i), j, std::clamp(t, 0.0, 1.0)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model text format
//
//   langsim-model 1
//   kind <cart|forest>
//   trees <count>
//   tree <index> seed <u64> max_depth <d> min_leaf <m> max_features <f> nodes <k>
//   <feature> <threshold> <left> <right> <value> <samples>     (k lines; feature -1 = leaf)
//
// Doubles use the shortest exact decimal form, so a reloaded model predicts
// bit-identically.

inline std::string serialize_model(const Model& model) {
    std::ostringstream out;
    out << "langsim-model 1\n";
    const Forest* forest = std::get_if<Forest>(&model);
    out << "kind " << (forest ? "forest" : "cart") << "\n";
    std::vector<const RegressionTree*> trees;
    std::vector<std::uint64_t> seeds;
    if (forest) {
        for (const auto& t : forest->trees()) trees.push_back(&t);
        seeds = forest->tree_seeds();
    } else {
        trees.push_back(&std::get<RegressionTree>(model));
        seeds.push_back(0);
    }
    out << "trees " << trees.size() << "\n";
    for (std::size_t k = 0; k < trees.size(); ++k) {
        const auto& p = trees[k]->params();
        out << "tree " << k << " seed " << seeds[k] << " max_depth " << p.max_depth << " min_leaf " << p.min_leaf
            << " max_features " << p.max_features << " nodes " << trees[k]->nodes().size() << "\n";
        for (const auto& n : trees[k]->nodes())
            out << n.feature << ' ' << format_exact(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
                << format_exact(n.value) << ' ' << n.samples << "\n";
    }
    return out.str();
}

inline Model deserialize_model(const std::string& text) {
    std::istringstream in(text);
    auto fail = [](const std::string& what) -> Error { return Error(Errc::SchemaMismatch, "model file: " + what); };
    auto expect = [&](const char* word) {
        std::string tok;
        if (!(in >> tok) || tok != word) throw fail(std::string("expected '") + word + "'");
    };
    auto read_double = [&]() {
        std::string tok;
        if (!(in >> tok)) throw fail("truncated");
        auto v = parse_double(tok);
        if (!v) throw fail("bad number '" + tok + "'");
        return *v;
    };
    expect("langsim-model");
    int version = 0;
    if (!(in >> version) || version != 1) throw fail("unsupported version");
    expect("kind");
    std::string kind;
    in >> kind;
    if (kind != "cart" && kind != "forest") throw fail("unknown kind '" + kind + "'");
    expect("trees");
    std::size_t count = 0;
    if (!(in >> count) || count == 0) throw fail("bad tree count");
    std::vector<RegressionTree> trees;
    std::vector<std::uint64_t> seeds;
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t index = 0, nodes = 0;
        std::uint64_t seed = 0;
        TreeParams p;
        expect("tree");
        in >> index;
        expect("seed");
        in >> seed;
        expect("max_depth");
        in >> p.max_depth;
        expect("min_leaf");
        in >> p.min_leaf;
        expect("max_features");
        in >> p.max_features;
        expect("nodes");
        in >> nodes;
        if (!in || index != k || nodes == 0) throw fail("bad tree header");
        std::vector<TreeNode> list(nodes);
        for (auto& n : list) {
            in >> n.feature;
            n.threshold = read_double();
            in >> n.left >> n.right;
            n.value = read_double();
            in >> n.samples;
            if (!in) throw fail("truncated node");
            const auto limit = static_cast<int>(nodes);
            if (!n.is_leaf() && (n.feature >= static_cast<int>(kFactorCount) || n.left <= 0 || n.right <= 0 ||
                                 n.left >= limit || n.right >= limit))
                throw fail("node references out of range");
        }
        trees.emplace_back(std::move(list), p);
        seeds.push_back(seed);
    }
    if (kind == "cart") {
        if (count != 1) throw fail("a cart model holds exactly one tree");
        return Model(std::move(trees.front()));
    }
    return Model(Forest(std::move(trees), std::move(seeds)));
}

inline std::string residuals_csv(const ResidualReport& r) {
    std::string out = "i,j,target,prediction,residual\n";
    for (const auto& e : r.residuals)
        out += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_number(e.target) + "," +
               format_number(e.prediction) + "," + format_number(e.epsilon) + "\n";
    return out;
}

inline std::string residual_summary_csv(const ResidualReport& r) {
    std::string out = "key,value\n";
    out += "n," + std::to_string(r.residuals.size()) + "\n";
    out += "mse," + format_number(r.mse) + "\n";
    out += "variance," + format_number(r.variance) + "\n";
    out += "shapiro_w," + (r.shapiro ? format_number(r.shapiro->w) : std::string("nan")) + "\n";
    out += "shapiro_p," + (r.shapiro ? format_number(r.shapiro->p) : std::string("nan")) + "\n";
    out += std::string("shapiro_degenerate,") + (r.shapiro_degenerate ? "1" : "0") + "\n";
    return out;
}

}  // namespace langsim
