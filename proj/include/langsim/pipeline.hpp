#pragma once

// Stage runners shared by the CLI: validate -> factors -> estimate ->
// simulate -> report. Stages talk only through files; each output directory
// gets a manifest.json listing every file with its size and SHA-256.
//
// Config file (JSON). Relative paths are resolved against the directory of
// the config file; every key is optional.
//
//   {
//     "data_dir": "data",
//     "fixtures": {"population": "...", "known_t": "...", ...},
//     "regression": {"model": "rf", "n_trees": 100, "max_depth": 4, "min_leaf": 1,
//                    "max_features": 0, "bootstrap": true, "seed": 1},
//     "simulation": {"algorithm": "bmmcsm", "n_agents": 100000, "replications": 10,
//                    "horizon_years": 50, "step_years": 5, "learn_events_per_step": 5,
//                    "alpha0": 0.04, "master_seed": 1, "threads": 1},
//     "report": {"svg": true},
//     "output_dir": "out"
//   }

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "langsim/data.hpp"
#include "langsim/error.hpp"
#include "langsim/factors.hpp"
#include "langsim/regress.hpp"
#include "langsim/report.hpp"
#include "langsim/sim.hpp"
#include "langsim/trajectory_io.hpp"
#include "langsim/zone_matrix.hpp"

namespace langsim {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Hashing and manifests

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[md[k] >> 4];
        out += hex[md[k] & 15];
    }
    return out;
}

struct ManifestEntry {
    std::string path;  // relative to the manifest's directory, '/' separated
    std::uintmax_t bytes = 0;
    std::string sha256;
    std::string stage;
    bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
    json config;
    json runtime;
    json seeds;
    std::vector<ManifestEntry> files;

    void add(const fs::path& root, const fs::path& file, std::string_view stage) {
        const std::string content = read_text_file(file);
        files.push_back({fs::relative(file, root).generic_string(), content.size(), sha256_hex(content), std::string(stage)});
    }
    void add_all(const fs::path& root, const std::vector<fs::path>& paths, std::string_view stage) {
        for (const auto& p : paths) add(root, p, stage);
    }

    /// Entries produced by one stage.
    std::vector<ManifestEntry> stage_files(std::string_view stage) const {
        std::vector<ManifestEntry> out;
        for (const auto& f : files)
            if (f.stage == stage) out.push_back(f);
        return out;
    }

    json to_json() const {
        json files_json = json::array();
        for (const auto& f : files)
            files_json.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}, {"stage", f.stage}});
        return {{"format", "langsim-manifest 1"},
                {"config", config},
                {"config_sha256", sha256_hex(config.dump())},
                {"runtime", runtime},
                {"seeds", seeds},
                {"files", files_json}};
    }

    void write(const fs::path& path) const { write_text_file(path, to_json().dump(2) + "\n"); }

    static Manifest read(const fs::path& path) {
        json j;
        try {
            j = json::parse(read_text_file(path));
        } catch (const json::exception& e) {
            throw Error(Errc::SchemaMismatch, path.string() + ": " + e.what());
        }
        Manifest m;
        m.config = j.value("config", json::object());
        m.runtime = j.value("runtime", json::object());
        m.seeds = j.value("seeds", json::object());
        for (const auto& f : j.at("files"))
            m.files.push_back({f.at("path"), f.at("bytes"), f.at("sha256"), f.at("stage")});
        return m;
    }
};

inline constexpr std::string_view kManifestFile = "manifest.json";

// ---------------------------------------------------------------------------
// Configuration

struct RegressionSettings {
    std::string model = "rf";      // rf | cart
    std::optional<int> max_depth;  // unset: 4 for rf, unlimited for cart; 0 = unlimited
    int n_trees = 100;
    int min_leaf = 1;
    int max_features = 0;  // 0 = all features
    bool bootstrap = true;
    std::uint64_t seed = 1;

    int effective_depth() const {
        const int d = max_depth.value_or(model == "cart" ? 0 : 4);
        return d == 0 ? kUnlimitedDepth : d;
    }

    void validate() const {
        if (model != "rf" && model != "cart") throw Error(Errc::ConfigError, "regression.model must be 'rf' or 'cart'");
        if (max_depth && *max_depth < 0) throw Error(Errc::ConfigError, "regression.max_depth must be >= 0");
        if (n_trees < 1) throw Error(Errc::ConfigError, "regression.n_trees must be >= 1");
        if (min_leaf < 1) throw Error(Errc::ConfigError, "regression.min_leaf must be >= 1");
        if (max_features < 0 || max_features > static_cast<int>(kFactorCount))
            throw Error(Errc::ConfigError, "regression.max_features must lie in 0..5");
    }

    Model fit(const TrainingSet& train, int threads) const {
        validate();
        if (model == "cart") return fit_cart(train, TreeParams{effective_depth(), min_leaf, max_features});
        ForestParams p;
        p.n_trees = n_trees;
        p.max_depth = effective_depth();
        p.min_leaf = min_leaf;
        p.max_features = max_features;
        p.bootstrap = bootstrap;
        p.seed = seed;
        p.threads = threads;
        return fit_forest(train, p);
    }

    json to_json() const {
        return {{"model", model},     {"max_depth", max_depth ? json(*max_depth) : json(nullptr)},
                {"n_trees", n_trees}, {"min_leaf", min_leaf},
                {"max_features", max_features}, {"bootstrap", bootstrap},
                {"seed", seed}};
    }
};

inline Algorithm algorithm_from_string(std::string_view s) {
    if (s == "bmmcs") return Algorithm::Bmmcs;
    if (s == "bmmcsm") return Algorithm::Bmmcsm;
    throw Error(Errc::ConfigError, "algorithm must be 'bmmcs' or 'bmmcsm', got '" + std::string(s) + "'");
}

/// Env var naming the default fixture directory.
inline constexpr const char* kDataDirEnv = "LANGSIM_DATA_DIR";

inline fs::path default_data_dir() {
    if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
    return "data";
}

struct RunConfig {
    fs::path data_dir = default_data_dir();
    std::map<TableKind, fs::path> fixture_overrides;
    RegressionSettings regression;
    SimConfig sim = [] {
        SimConfig c;
        c.migration_enabled = true;
        c.replications = 10;
        return c;
    }();
    bool svg = true;
    fs::path output_dir = "out";

    FixturePaths fixtures() const {
        FixturePaths p = FixturePaths::in_directory(data_dir);
        for (const auto& [kind, path] : fixture_overrides) p[kind] = path;
        return p;
    }

    /// Settings that determine outputs (threads and output_dir excluded).
    json to_json() const {
        json fx = json::object();
        const FixturePaths p = fixtures();
        for (TableKind k : kAllTableKinds) fx[std::string(to_string(k))] = p[k].generic_string();
        return {{"fixtures", fx},
                {"regression", regression.to_json()},
                {"simulation",
                 {{"algorithm", std::string(to_string(sim.migration_enabled ? Algorithm::Bmmcsm : Algorithm::Bmmcs))},
                  {"n_agents", sim.n_agents},
                  {"replications", sim.replications},
                  {"horizon_years", sim.horizon_years},
                  {"step_years", sim.step_years},
                  {"learn_events_per_step", sim.learn_events_per_step},
                  {"alpha0", sim.alpha0},
                  {"master_seed", sim.master_seed}}},
                {"report", {{"svg", svg}}}};
    }

    json runtime_json() const { return {{"threads", sim.threads}, {"output_dir", output_dir.generic_string()}}; }
};

namespace detail {

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(Errc::ConfigError, where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw Error(Errc::ConfigError, "unknown key '" + where + "." + key + "'");
    }
}

template <typename T>
void read_key(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::ConfigError, where + "." + key + " has the wrong type");
    }
}

}  // namespace detail

/// Parses a config document; relative paths are resolved against `base`.
inline RunConfig parse_run_config(const json& j, const fs::path& base) {
    RunConfig c;
    auto resolve = [&](const std::string& s) { return fs::path(s).is_absolute() ? fs::path(s) : base / s; };
    detail::reject_unknown(j, {"data_dir", "fixtures", "regression", "simulation", "report", "output_dir"}, "config");
    if (j.contains("data_dir")) c.data_dir = resolve(j.at("data_dir").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());
    if (j.contains("fixtures")) {
        const json& fx = j.at("fixtures");
        if (!fx.is_object()) throw Error(Errc::ConfigError, "fixtures must be an object");
        for (const auto& [key, value] : fx.items()) {
            auto kind = table_kind_from_string(key);
            if (!kind) throw Error(Errc::ConfigError, "unknown fixture '" + key + "'");
            c.fixture_overrides[*kind] = resolve(value.get<std::string>());
        }
    }
    if (j.contains("regression")) {
        const json& r = j.at("regression");
        detail::reject_unknown(r, {"model", "n_trees", "max_depth", "min_leaf", "max_features", "bootstrap", "seed"}, "regression");
        detail::read_key(r, "model", c.regression.model, "regression");
        detail::read_key(r, "n_trees", c.regression.n_trees, "regression");
        if (r.contains("max_depth") && !r.at("max_depth").is_null()) {
            int d = 0;
            detail::read_key(r, "max_depth", d, "regression");
            c.regression.max_depth = d;
        }
        detail::read_key(r, "min_leaf", c.regression.min_leaf, "regression");
        detail::read_key(r, "max_features", c.regression.max_features, "regression");
        detail::read_key(r, "bootstrap", c.regression.bootstrap, "regression");
        detail::read_key(r, "seed", c.regression.seed, "regression");
    }
    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        detail::reject_unknown(s,
                               {"algorithm", "n_agents", "replications", "horizon_years", "step_years",
                                "learn_events_per_step", "alpha0", "master_seed", "threads"},
                               "simulation");
        if (s.contains("algorithm"))
            c.sim.migration_enabled = algorithm_from_string(s.at("algorithm").get<std::string>()) == Algorithm::Bmmcsm;
        detail::read_key(s, "n_agents", c.sim.n_agents, "simulation");
        detail::read_key(s, "replications", c.sim.replications, "simulation");
        detail::read_key(s, "horizon_years", c.sim.horizon_years, "simulation");
        detail::read_key(s, "step_years", c.sim.step_years, "simulation");
        detail::read_key(s, "learn_events_per_step", c.sim.learn_events_per_step, "simulation");
        detail::read_key(s, "alpha0", c.sim.alpha0, "simulation");
        detail::read_key(s, "master_seed", c.sim.master_seed, "simulation");
        detail::read_key(s, "threads", c.sim.threads, "simulation");
    }
    if (j.contains("report")) {
        detail::reject_unknown(j.at("report"), {"svg"}, "report");
        detail::read_key(j.at("report"), "svg", c.svg, "report");
    }
    return c;
}

inline RunConfig load_run_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw Error(Errc::ConfigError, path.string() + ": " + e.what());
    }
    return parse_run_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Stages

enum class Stage { Validate, Factors, Estimate, Simulate, Report };

inline std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Validate: return "validate";
        case Stage::Factors: return "factors";
        case Stage::Estimate: return "estimate";
        case Stage::Simulate: return "simulate";
        case Stage::Report: return "report";
    }
    return "?";
}

/// 2 = data/config, 3 = estimation, 4 = simulation, 5 = report.
inline int stage_exit_code(Stage s) {
    switch (s) {
        case Stage::Validate:
        case Stage::Factors: return 2;
        case Stage::Estimate: return 3;
        case Stage::Simulate: return 4;
        case Stage::Report: return 5;
    }
    return 1;
}

class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& what)
        : std::runtime_error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const noexcept { return stage_; }
    int exit_code() const noexcept { return stage_exit_code(stage_); }

private:
    Stage stage_;
};

/// Runs `fn`, re-throwing any failure as a StageError tagged with `stage`.
template <typename Fn>
auto in_stage(Stage stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

inline std::string format_diagnostic(const Diagnostic& d) {
    std::string where = d.table;
    if (!d.row.empty()) where += " row " + d.row;
    if (!d.column.empty()) where += " column " + d.column;
    return std::string(to_string(d.severity)) + " " + d.kind + " [" + where + "]: " + d.message;
}

inline ValidationReport run_validate(const FixturePaths& paths) {
    ValidationReport report;
    for (TableKind k : kAllTableKinds) {
        try {
            auto loaded = load_table(k, paths[k]);
            for (auto& d : loaded.diagnostics) {
                if (d.severity == Severity::Note) report.notes.push_back(d);
            }
        } catch (const Error& e) {
            report.errors.push_back({Severity::Error, std::string(to_string(e.code())), std::string(to_string(k)), "", "",
                                     e.what()});
        }
    }
    if (!report.ok()) return report;
    const ValidationReport cross = validate_bundle(load_bundle(paths));
    report.errors = cross.errors;
    report.warnings = cross.warnings;
    return report;
}

/// Writes factor slices and the migration matrix into `dir`.
inline std::vector<fs::path> run_factors(const DataBundle& bundle, const fs::path& dir) {
    const MigrationMatrix mig = migration_matrix(bundle.migrant_stock);
    const FactorTensor x = build_factor_tensor(bundle.family, bundle.fdi, bundle.export_share, bundle.soft_power, mig);
    std::vector<std::string> names;
    for (const auto& z : bundle.catalog().zones) names.push_back(z.name);
    return write_factors(dir, names, x, mig);
}

inline constexpr std::string_view kTransitionFile = "transition_matrix.csv";
inline constexpr std::string_view kResidualsFile = "residuals.csv";
inline constexpr std::string_view kResidualSummaryFile = "residual_summary.csv";
inline constexpr std::string_view kModelFile = "model.txt";

struct EstimateResult {
    Matrix transition;
    ResidualReport residuals;
    std::vector<fs::path> written;
};

/// Fits the model on the known entries and writes the completed T, the
/// residuals and the serialized model into `dir`.
inline EstimateResult run_estimate(const fs::path& factors_dir, const fs::path& known_path, const RegressionSettings& reg,
                                   const fs::path& dir, int threads = 1) {
    const FactorFiles factors = read_factor_tensor(factors_dir);
    const SparseTransitionInput known = load_known_transitions(known_path).table;
    const TrainingSet train = make_training_set(known, factors.tensor);
    const Model model = reg.fit(train, threads);
    EstimateResult out;
    out.residuals = residual_report(model, train);
    out.transition = complete_transition_matrix(known, factors.tensor, model);
    auto put = [&](std::string_view name, const std::string& content) {
        write_text_file(dir / name, content);
        out.written.push_back(dir / name);
    };
    put(kTransitionFile, zone_matrix_csv(factors.zones, out.transition));
    put(kResidualsFile, residuals_csv(out.residuals));
    put(kResidualSummaryFile, residual_summary_csv(out.residuals));
    put(kModelFile, serialize_model(model));
    return out;
}

struct SimulateInputs {
    fs::path transition;
    fs::path migration;  // only read for BMMCSM
    fs::path population;
    fs::path initial;
};

inline TrajectorySet run_simulate(const SimConfig& cfg, const SimulateInputs& in, const fs::path& dir,
                                  std::vector<fs::path>* written = nullptr) {
    cfg.validate();
    const ZoneMatrix t = read_zone_matrix(in.transition);
    const PopulationSchedule sched = load_population(in.population).table;
    const InitialDistribution initial = load_initial_distribution(in.initial).table;
    std::vector<std::string> names;
    for (const auto& z : sched.zones) names.push_back(z.name);
    if (t.zones != names) throw Error(Errc::ZoneOrderMismatch, in.transition.string() + ": zones differ from the population schedule");
    for (std::size_t z = 0; z < initial.zones.size(); ++z)
        if (z >= names.size() || initial.zones[z].name != names[z])
            throw Error(Errc::ZoneOrderMismatch, in.initial.string() + ": zones differ from the population schedule");
    std::optional<MigrationMatrix> mig;
    if (cfg.migration_enabled) {
        std::vector<std::string> mzones;
        mig = read_migration_matrix(in.migration, &mzones);
        if (mzones != names) throw Error(Errc::ZoneOrderMismatch, in.migration.string() + ": zones differ from the population schedule");
    }
    TrajectorySet set;
    set.zones = names;
    set.runs = run_replications(cfg, SimInputs{initial, sched, t.values, mig ? &*mig : nullptr});
    auto paths = write_trajectories(dir, set);
    if (written) *written = std::move(paths);
    return set;
}

inline std::vector<fs::path> run_report(const fs::path& trajectory_dir, const fs::path& dir, bool svg) {
    return write_report(dir, read_trajectories(trajectory_dir), svg);
}

inline json simulation_seeds(const SimConfig& cfg) {
    json reps = json::array();
    for (int r = 0; r < cfg.replications; ++r) reps.push_back(replication_seed(cfg.master_seed, r));
    return {{"master_seed", cfg.master_seed}, {"replication_seeds", reps}};
}

// ---------------------------------------------------------------------------
// Whole pipeline

struct PipelineResult {
    Manifest manifest;
    ValidationReport validation;
};

/// Runs all five stages into cfg.output_dir/{factors,estimate,simulate,report}
/// and writes cfg.output_dir/manifest.json. Throws StageError on failure.
inline PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr) {
    auto say = [&](Stage s, const std::string& msg) {
        if (log) *log << "[" << to_string(s) << "] " << msg << "\n";
    };
    const fs::path root = cfg.output_dir;
    const FixturePaths paths = cfg.fixtures();
    PipelineResult result;
    Manifest& m = result.manifest;
    m.config = cfg.to_json();
    m.runtime = cfg.runtime_json();

    result.validation = in_stage(Stage::Validate, [&] {
        cfg.regression.validate();
        cfg.sim.validate();
        return run_validate(paths);
    });
    for (const auto& d : result.validation.warnings) say(Stage::Validate, format_diagnostic(d));
    if (!result.validation.ok()) {
        for (const auto& d : result.validation.errors) say(Stage::Validate, format_diagnostic(d));
        throw StageError(Stage::Validate, format_diagnostic(result.validation.errors.front()));
    }
    say(Stage::Validate, "ok (" + std::to_string(result.validation.warnings.size()) + " warnings)");

    in_stage(Stage::Factors, [&] {
        const DataBundle bundle = load_bundle(paths);
        m.add_all(root, run_factors(bundle, root / "factors"), "factors");
    });
    say(Stage::Factors, "wrote factor tensor and migration matrix");

    in_stage(Stage::Estimate, [&] {
        EstimateResult est = run_estimate(root / "factors", paths.known_transitions, cfg.regression, root / "estimate", cfg.sim.threads);
        m.add_all(root, est.written, "estimate");
        std::string msg = cfg.regression.model + " fitted on " + std::to_string(est.residuals.residuals.size()) +
                          " entries, training mse " + format_number(est.residuals.mse);
        if (est.residuals.shapiro)
            msg += ", Shapiro-Wilk W " + format_number(est.residuals.shapiro->w, 5) + " p " + format_number(est.residuals.shapiro->p, 5);
        say(Stage::Estimate, msg);
    });
    m.seeds = {{"regression_seed", cfg.regression.seed}};

    in_stage(Stage::Simulate, [&] {
        std::vector<fs::path> written;
        run_simulate(cfg.sim,
                     {root / "estimate" / kTransitionFile, root / "factors" / kMigrationMatrixFile, paths.population,
                      paths.initial_distribution},
                     root / "simulate", &written);
        m.add_all(root, written, "simulate");
        m.seeds.update(simulation_seeds(cfg.sim));
    });
    say(Stage::Simulate, std::to_string(cfg.sim.replications) + " replication(s) of " + std::to_string(cfg.sim.n_agents) +
                             " agents over " + std::to_string(cfg.sim.horizon_years) + " years");

    in_stage(Stage::Report, [&] { m.add_all(root, run_report(root / "simulate", root / "report", cfg.svg), "report"); });
    say(Stage::Report, "wrote report tables" + std::string(cfg.svg ? " and charts" : ""));

    m.write(root / kManifestFile);
    return result;
}

}  // namespace langsim
