// langsim command line: validate | factors build | estimate | simulate | report | run | fixture known-t

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "langsim/pipeline.hpp"

namespace fs = std::filesystem;
using namespace langsim;

namespace {

struct FixtureFlags {
    std::string data_dir;
    std::map<TableKind, std::string> paths;

    void attach(CLI::App* app) {
        app->add_option("--data-dir", data_dir, "fixture directory (default: $LANGSIM_DATA_DIR or ./data)");
        for (TableKind k : kAllTableKinds) {
            const std::string name(to_string(k));
            std::string flag = "--" + name;
            std::replace(flag.begin(), flag.end(), '_', '-');
            app->add_option(flag, paths[k], "path of the " + name + " fixture");
        }
    }

    FixturePaths resolve() const {
        FixturePaths p = FixturePaths::in_directory(data_dir.empty() ? default_data_dir() : fs::path(data_dir));
        for (const auto& [k, v] : paths)
            if (!v.empty()) p[k] = v;
        return p;
    }
};

void write_stage_manifest(const fs::path& dir, const std::vector<fs::path>& files, Stage stage, json config, json seeds = {}) {
    Manifest m;
    m.config = std::move(config);
    m.seeds = seeds.is_null() ? json::object() : std::move(seeds);
    m.runtime = json::object();
    m.add_all(dir, files, to_string(stage));
    m.write(dir / kManifestFile);
}

int fail(Stage stage, const std::exception& e) {
    std::cerr << "langsim " << to_string(stage) << ": " << e.what() << "\n";
    return stage_exit_code(stage);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch-Markov language spread toolkit"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

    // validate
    auto* validate = app.add_subcommand("validate", "load and cross-check the eight fixtures");
    FixtureFlags validate_fx;
    validate_fx.attach(validate);

    // factors build
    auto* factors = app.add_subcommand("factors", "factor tensor");
    factors->require_subcommand(1);
    auto* factors_build = factors->add_subcommand("build", "write the five factor slices and the migration matrix");
    FixtureFlags factors_fx;
    factors_fx.attach(factors_build);
    std::string factors_out = "out/factors";
    factors_build->add_option("--out", factors_out, "output directory");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "fit the regressor and complete the transition matrix");
    std::string est_factors = "out/factors", est_known, est_out = "out/estimate";
    RegressionSettings reg;
    int est_depth = -1;
    bool no_bootstrap = false;
    estimate->add_option("--factors", est_factors, "directory written by 'factors build'");
    estimate->add_option("--known", est_known, "known transitions (default: <data-dir>/known_t.csv)");
    std::string est_data_dir;
    estimate->add_option("--data-dir", est_data_dir, "fixture directory for the default above");
    estimate->add_option("--model", reg.model, "rf or cart")->check(CLI::IsMember({"rf", "cart"}));
    estimate->add_option("--n-trees", reg.n_trees, "forest size");
    estimate->add_option("--max-depth", est_depth, "tree depth; 0 = unlimited (default 4 for rf, unlimited for cart)");
    estimate->add_option("--min-leaf", reg.min_leaf, "minimum samples per leaf");
    estimate->add_option("--max-features", reg.max_features, "features tried per split; 0 = all");
    estimate->add_flag("--no-bootstrap", no_bootstrap, "fit every tree on the full training set");
    estimate->add_option("--seed", reg.seed, "forest seed");
    estimate->add_option("--out", est_out, "output directory");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run BMMCS / BMMCSM replications");
    SimConfig sim;
    sim.replications = 10;
    std::string algorithm = "bmmcsm", sim_out = "out/simulate";
    SimulateInputs sim_in{"out/estimate/transition_matrix.csv", "out/factors/migration_matrix.csv", "", ""};
    simulate->add_option("--algorithm", algorithm, "bmmcs or bmmcsm")->check(CLI::IsMember({"bmmcs", "bmmcsm"}));
    simulate->add_option("--agents", sim.n_agents, "agents per replication");
    simulate->add_option("--replications", sim.replications, "independent replications");
    simulate->add_option("--horizon", sim.horizon_years, "years simulated");
    simulate->add_option("--step-years", sim.step_years, "years per step");
    simulate->add_option("--learn-events", sim.learn_events_per_step, "learning draws per agent per step");
    simulate->add_option("--alpha0", sim.alpha0, "death proportion per step");
    simulate->add_option("--seed", sim.master_seed, "master seed");
    simulate->add_option("--transition", sim_in.transition, "completed transition matrix");
    simulate->add_option("--migration", sim_in.migration, "migration matrix (bmmcsm only)");
    simulate->add_option("--population", sim_in.population, "population schedule (default: <data-dir>/population.csv)");
    simulate->add_option("--initial", sim_in.initial, "initial distribution (default: <data-dir>/initial_distribution.csv)");
    std::string sim_data_dir;
    simulate->add_option("--data-dir", sim_data_dir, "fixture directory for the defaults above");
    simulate->add_option("--out", sim_out, "output directory");

    // report
    auto* report = app.add_subcommand("report", "regenerate report tables from stored trajectories");
    std::string rep_in = "out/simulate", rep_out = "out/report";
    bool no_svg = false;
    report->add_option("--trajectories", rep_in, "directory written by 'simulate'");
    report->add_option("--out", rep_out, "output directory");
    report->add_flag("--no-svg", no_svg, "skip the SVG charts");

    // run
    auto* run = app.add_subcommand("run", "run all five stages from one config file");
    std::string config_path, run_out, run_data_dir, run_algorithm, run_model;
    std::optional<std::uint64_t> run_seed, run_reg_seed;
    std::optional<int> run_agents, run_reps, run_horizon;
    run->add_option("--config", config_path, "JSON config (optional; defaults apply)");
    run->add_option("--out", run_out, "overrides output_dir");
    run->add_option("--data-dir", run_data_dir, "overrides data_dir");
    run->add_option("--seed", run_seed, "overrides simulation.master_seed");
    run->add_option("--regression-seed", run_reg_seed, "overrides regression.seed");
    run->add_option("--agents", run_agents, "overrides simulation.n_agents");
    run->add_option("--replications", run_reps, "overrides simulation.replications");
    run->add_option("--horizon", run_horizon, "overrides simulation.horizon_years");
    run->add_option("--algorithm", run_algorithm, "overrides simulation.algorithm")->check(CLI::IsMember({"bmmcs", "bmmcsm"}));
    run->add_option("--model", run_model, "overrides regression.model")->check(CLI::IsMember({"rf", "cart"}));

    // fixture known-t
    auto* fixture = app.add_subcommand("fixture", "generate substitute fixtures");
    fixture->require_subcommand(1);
    auto* known_t = fixture->add_subcommand("known-t", "heuristic known transitions: alpha * beta2(j) for the top-k second languages");
    FixtureFlags fixture_fx;
    fixture_fx.attach(known_t);
    HeuristicKnownOptions heur;
    bool keep_duplicates = false;
    std::string known_out = "known_t.csv";
    known_t->add_option("--top-k", heur.top_k, "languages per source zone");
    known_t->add_option("--noise", heur.noise_sigma, "standard deviation of the added Gaussian noise; 0 disables");
    known_t->add_option("--seed", heur.seed, "noise seed");
    known_t->add_flag("--keep-duplicates", keep_duplicates, "keep pairs whose factor vector repeats an earlier pair");
    known_t->add_option("--out", known_out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (validate->parsed()) {
        try {
            const ValidationReport r = run_validate(validate_fx.resolve());
            for (const auto& d : r.notes) std::cout << format_diagnostic(d) << "\n";
            for (const auto& d : r.warnings) std::cout << format_diagnostic(d) << "\n";
            for (const auto& d : r.errors) std::cout << format_diagnostic(d) << "\n";
            std::cout << r.errors.size() << " error(s), " << r.warnings.size() << " warning(s)\n";
            return r.exit_code();
        } catch (const std::exception& e) {
            return fail(Stage::Validate, e);
        }
    }

    if (factors_build->parsed()) {
        try {
            const FixturePaths p = factors_fx.resolve();
            const DataBundle bundle = load_bundle(p);
            require_valid(validate_bundle(bundle));
            const auto files = run_factors(bundle, factors_out);
            json cfg = json::object();
            for (TableKind k : kAllTableKinds) cfg[std::string(to_string(k))] = p[k].generic_string();
            write_stage_manifest(factors_out, files, Stage::Factors, {{"fixtures", cfg}});
            std::cout << "wrote " << files.size() << " files to " << factors_out << "\n";
            return 0;
        } catch (const std::exception& e) {
            return fail(Stage::Factors, e);
        }
    }

    if (estimate->parsed()) {
        try {
            if (est_depth >= 0) reg.max_depth = est_depth;
            reg.bootstrap = !no_bootstrap;
            const fs::path known = est_known.empty() ? (est_data_dir.empty() ? default_data_dir() : fs::path(est_data_dir)) / "known_t.csv" : fs::path(est_known);
            const EstimateResult r = run_estimate(est_factors, known, reg, est_out, threads);
            write_stage_manifest(est_out, r.written, Stage::Estimate,
                                 {{"regression", reg.to_json()}, {"factors", est_factors}, {"known", known.generic_string()}},
                                 {{"regression_seed", reg.seed}});
            std::cout << "training mse " << format_number(r.residuals.mse) << ", residual variance "
                      << format_number(r.residuals.variance);
            if (r.residuals.shapiro)
                std::cout << ", Shapiro-Wilk W " << format_number(r.residuals.shapiro->w, 5) << " p "
                          << format_number(r.residuals.shapiro->p, 5);
            else
                std::cout << ", Shapiro-Wilk not defined (zero-variance residuals)";
            std::cout << "\n";
            return 0;
        } catch (const std::exception& e) {
            return fail(Stage::Estimate, e);
        }
    }

    if (simulate->parsed()) {
        try {
            sim.migration_enabled = algorithm_from_string(algorithm) == Algorithm::Bmmcsm;
            sim.threads = threads;
            const fs::path dd = sim_data_dir.empty() ? default_data_dir() : fs::path(sim_data_dir);
            if (sim_in.population.empty()) sim_in.population = dd / "population.csv";
            if (sim_in.initial.empty()) sim_in.initial = dd / "initial_distribution.csv";
            std::vector<fs::path> files;
            run_simulate(sim, sim_in, sim_out, &files);
            json cfg = {{"algorithm", algorithm},
                        {"n_agents", sim.n_agents},
                        {"replications", sim.replications},
                        {"horizon_years", sim.horizon_years},
                        {"step_years", sim.step_years},
                        {"learn_events_per_step", sim.learn_events_per_step},
                        {"alpha0", sim.alpha0},
                        {"master_seed", sim.master_seed},
                        {"transition", sim_in.transition.generic_string()},
                        {"migration", sim.migration_enabled ? json(sim_in.migration.generic_string()) : json(nullptr)},
                        {"population", sim_in.population.generic_string()},
                        {"initial", sim_in.initial.generic_string()}};
            write_stage_manifest(sim_out, files, Stage::Simulate, cfg, simulation_seeds(sim));
            std::cout << "wrote " << sim.replications << " trajectories to " << sim_out << "\n";
            return 0;
        } catch (const std::exception& e) {
            return fail(Stage::Simulate, e);
        }
    }

    if (report->parsed()) {
        try {
            const auto files = run_report(rep_in, rep_out, !no_svg);
            write_stage_manifest(rep_out, files, Stage::Report, {{"trajectories", rep_in}, {"svg", !no_svg}});
            std::cout << "wrote " << files.size() << " files to " << rep_out << "\n";
            return 0;
        } catch (const std::exception& e) {
            return fail(Stage::Report, e);
        }
    }

    if (run->parsed()) {
        RunConfig cfg;
        try {
            if (!config_path.empty()) cfg = load_run_config(config_path);
            if (!run_out.empty()) cfg.output_dir = run_out;
            if (!run_data_dir.empty()) cfg.data_dir = run_data_dir;
            if (run_seed) cfg.sim.master_seed = *run_seed;
            if (run_reg_seed) cfg.regression.seed = *run_reg_seed;
            if (run_agents) cfg.sim.n_agents = *run_agents;
            if (run_reps) cfg.sim.replications = *run_reps;
            if (run_horizon) cfg.sim.horizon_years = *run_horizon;
            if (!run_algorithm.empty()) cfg.sim.migration_enabled = run_algorithm == "bmmcsm";
            if (!run_model.empty()) cfg.regression.model = run_model;
            cfg.sim.threads = threads;
        } catch (const std::exception& e) {
            std::cerr << "langsim run: " << e.what() << "\n";
            return 2;
        }
        try {
            run_pipeline(cfg, &std::cerr);
            std::cout << "manifest: " << (cfg.output_dir / kManifestFile).generic_string() << "\n";
            return 0;
        } catch (const StageError& e) {
            std::cerr << "langsim run: " << e.what() << "\n";
            return e.exit_code();
        }
    }

    if (known_t->parsed()) {
        try {
            heur.drop_duplicate_features = !keep_duplicates;
            const DataBundle partial = [&] {
                const FixturePaths p = fixture_fx.resolve();
                DataBundle b;
                b.population = load_population(p.population).table;
                b.migrant_stock = load_migrant_stock(p.migrant_stock).table;
                b.soft_power = load_soft_power(p.soft_power).table;
                b.initial = load_initial_distribution(p.initial_distribution).table;
                b.family = load_family(p.family).table;
                b.export_share = load_export_share(p.export_share).table;
                b.fdi = load_fdi(p.fdi).table;
                return b;
            }();
            const FactorTensor x = build_factor_tensor(partial);
            const SparseTransitionInput known = heuristic_known_transitions(partial.initial, x, heur);
            write_text_file(known_out, to_csv(known));
            std::cout << "wrote " << known.entries.size() << " entries to " << known_out << "\n";
            return 0;
        } catch (const std::exception& e) {
            return fail(Stage::Validate, e);
        }
    }
    return 0;
}
