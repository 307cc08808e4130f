#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "langsim/pipeline.hpp"
#include "langsim/report.hpp"
#include "support.hpp"

using namespace langsim;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) { return read_text_file(p); }

void put(const fs::path& p, const std::string& s) { write_text_file(p, s); }

std::string cli(const std::string& args) { return "\"" + ts::cli_path().string() + "\" " + args; }

TrajectorySet small_set(int reps) {
    const auto& b = ts::shipped_bundle();
    SimConfig c;
    c.n_agents = 800;
    c.replications = reps;
    c.horizon_years = 10;
    c.migration_enabled = true;
    const MigrationMatrix m = migration_matrix(b.migrant_stock);
    Matrix t(20, 20, 0.0);
    for (int i = 0; i < 20; ++i) t(i, 1) = i == 1 ? 0.0 : 0.05;
    TrajectorySet set;
    for (const auto& z : b.catalog().zones) set.zones.push_back(z.name);
    set.runs = run_replications(c, SimInputs{b.initial, b.population, t, &m});
    return set;
}

/// 3-zone toy fixtures written by hand.
void write_toy(const fs::path& dir) {
    put(dir / "population.csv",
        "zone_id,zone,2000,2005,2010\n0,A,5000,5200,5400\n1,B,3000,3100,3300\n2,C,2000,2000,1900\n");
    put(dir / "initial_distribution.csv",
        "zone_id,zone,l1_share,l2_share\n0,A,0.5,0.2\n1,B,0.3,0.6\n2,C,0.2,0.2\nalpha,,0.3,\n");
    put(dir / "transition.csv", "zone,A,B,C\nA,0,0.2,0.1\nB,0.3,0,0\nC,0,0.4,0\n");
    put(dir / "migration.csv", "zone,A,B,C\nA,0.9,0.08,0.02\nB,0.05,0.9,0.05\nC,0.1,0.1,0.8\n");
}

}  // namespace

TEST(TrajectoryIo, RoundTrip) {
    const TrajectorySet set = small_set(2);
    const fs::path dir = ts::scratch_dir("traj");
    const auto written = write_trajectories(dir, set);
    EXPECT_EQ(written.size(), 5u);
    const TrajectorySet back = read_trajectories(dir);
    EXPECT_EQ(back.zones, set.zones);
    ASSERT_EQ(back.runs.size(), 2u);
    for (int r = 0; r < 2; ++r) {
        EXPECT_EQ(back.runs[r].seed, set.runs[r].seed);
        ASSERT_EQ(back.runs[r].snapshots.size(), set.runs[r].snapshots.size());
        for (std::size_t s = 0; s < set.runs[r].snapshots.size(); ++s) {
            EXPECT_EQ(back.runs[r].snapshots[s].tally, set.runs[r].snapshots[s].tally);
            EXPECT_EQ(back.runs[r].snapshots[s].year, set.runs[r].snapshots[s].year);
        }
    }
}

TEST(TrajectoryIo, BadHeaderIsRejected) {
    const TrajectorySet set = small_set(1);
    const fs::path dir = ts::scratch_dir("traj_bad");
    write_trajectories(dir, set);
    std::string s = slurp(dir / trajectory_filename(0));
    s.replace(0, 4, "stap");
    put(dir / trajectory_filename(0), s);
    EXPECT_THROW(read_trajectories(dir), Error);
}

TEST(Svg, BarValuesReadBack) {
    const std::string svg = bar_chart_svg("t <&>", {"A", "B&C"}, std::vector<double>{3.5, 1e9});
    EXPECT_NE(svg.find("t &lt;&amp;&gt;"), std::string::npos);
    std::regex bar("data-rank=\"(\\d+)\" data-label=\"([^\"]*)\" data-value=\"([^\"]+)\"");
    std::vector<std::tuple<int, std::string, double>> got;
    for (std::sregex_iterator it(svg.begin(), svg.end(), bar), end; it != end; ++it)
        got.emplace_back(std::stoi((*it)[1]), (*it)[2], std::stod((*it)[3]));
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(got[0], std::make_tuple(1, std::string("A"), 3.5));
    EXPECT_EQ(got[1], std::make_tuple(2, std::string("B&amp;C"), 1e9));
}

TEST(Svg, HeatmapCellsCarryValues) {
    Matrix m(2, 2, 0.0);
    m(0, 0) = 1.0;
    m(0, 1) = 0.25;
    const std::string svg = heatmap_svg("geo", {"A", "B"}, {"A", "B"}, m, {false, true});
    std::regex cell("data-row=\"(\\d)\" data-col=\"(\\d)\" data-value=\"([^\"]+)\"( data-empty=\"1\")?");
    int cells = 0, empty = 0;
    for (std::sregex_iterator it(svg.begin(), svg.end(), cell), end; it != end; ++it) {
        ++cells;
        const int i = std::stoi((*it)[1]), j = std::stoi((*it)[2]);
        EXPECT_DOUBLE_EQ(std::stod((*it)[3]), m(i, j));
        empty += (*it)[4].matched;
        EXPECT_EQ((*it)[4].matched, i == 1);
    }
    EXPECT_EQ(cells, 4);
    EXPECT_EQ(empty, 2);
}

TEST(Report, TableShapesAndSvgValues) {
    const TrajectorySet set = small_set(3);
    const fs::path dir = ts::scratch_dir("report");
    const auto written = write_report(dir, set, true);
    const std::size_t steps = 3, zones = 20, reps = 3;
    EXPECT_EQ(read_csv(dir / "speaker_counts.csv").rows.size(), reps * steps * zones);
    EXPECT_EQ(read_csv(dir / "rankings.csv").rows.size(), reps * steps * zones * 3);
    EXPECT_EQ(read_csv(dir / "geo_matrices.csv").rows.size(), reps * steps * zones * zones);
    const CsvTable ens = read_csv(dir / "ensemble_summary.csv");
    EXPECT_EQ(ens.header, (std::vector<std::string>{"quantity", "zone_id", "zone", "step", "year", "mean", "std_error", "replications"}));
    EXPECT_EQ(ens.rows.size(), (zones * 3 + 2) * steps);
    // 3 rankings + 1 heatmap for first and last year
    int svgs = 0;
    for (const auto& p : written) svgs += p.extension() == ".svg";
    EXPECT_EQ(svgs, 8);

    // top bar of the final total ranking equals the largest total count
    const SpeakerCounts c = speaker_counts(set.runs[0].snapshots.back().tally);
    const std::string svg = slurp(dir / "ranking_total_2027.svg");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(svg, m, std::regex("data-rank=\"1\" data-label=\"([^\"]*)\" data-value=\"([^\"]+)\"")));
    const int top = rank_languages(c, RankKey::Total)[0];
    EXPECT_EQ(m[1].str(), set.zones[top]);
    EXPECT_DOUBLE_EQ(std::stod(m[2].str()), c.total[top]);
}

TEST(Report, SingleReplicationSkipsEnsemble) {
    const fs::path dir = ts::scratch_dir("report1");
    write_report(dir, small_set(1), false);
    EXPECT_FALSE(fs::exists(dir / "ensemble_summary.csv"));
    EXPECT_TRUE(fs::exists(dir / "speaker_counts.csv"));
    EXPECT_FALSE(fs::exists(dir / "geo_2017.svg"));
}

TEST(Config, UnknownKeysAreRejected) {
    EXPECT_THROW(parse_run_config(json{{"simulaton", json::object()}}, "."), Error);
    EXPECT_THROW(parse_run_config(json{{"simulation", {{"agents", 5}}}}, "."), Error);
    EXPECT_THROW(parse_run_config(json{{"fixtures", {{"pop", "x.csv"}}}}, "."), Error);
    EXPECT_THROW(parse_run_config(json{{"simulation", {{"algorithm", "abc"}}}}, "."), Error);
    try {
        parse_run_config(json{{"regression", {{"n_trees", "many"}}}}, ".");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ConfigError);
    }
}

TEST(Config, PathsResolveAgainstConfigFile) {
    const fs::path dir = ts::scratch_dir("cfg");
    put(dir / "run.json", R"({"data_dir": "fx", "fixtures": {"known_t": "/abs/k.csv"}, "output_dir": "o",
        "simulation": {"algorithm": "bmmcs", "n_agents": 10, "replications": 2, "master_seed": 9},
        "regression": {"model": "cart", "max_depth": null}})");
    const RunConfig c = load_run_config(dir / "run.json");
    EXPECT_EQ(c.data_dir, dir / "fx");
    EXPECT_EQ(c.output_dir, dir / "o");
    EXPECT_EQ(c.fixtures().known_transitions, fs::path("/abs/k.csv"));
    EXPECT_EQ(c.fixtures().population, dir / "fx" / "population.csv");
    EXPECT_FALSE(c.sim.migration_enabled);
    EXPECT_EQ(c.sim.n_agents, 10);
    EXPECT_EQ(c.sim.master_seed, 9u);
    EXPECT_EQ(c.regression.model, "cart");
    EXPECT_FALSE(c.regression.max_depth.has_value());
    EXPECT_EQ(c.regression.effective_depth(), kUnlimitedDepth);
    EXPECT_EQ(c.to_json().at("simulation").at("algorithm"), "bmmcs");
    EXPECT_FALSE(c.to_json().contains("output_dir"));
}

TEST(Pipeline, SmokeRunLogsAllStages) {
    RunConfig c;
    c.data_dir = ts::data_dir();
    c.output_dir = ts::scratch_dir("smoke");
    c.sim.n_agents = 100;
    c.sim.replications = 1;
    c.sim.horizon_years = 5;
    std::ostringstream log;
    const PipelineResult r = run_pipeline(c, &log);
    for (const char* stage : {"[validate]", "[factors]", "[estimate]", "[simulate]", "[report]"})
        EXPECT_NE(log.str().find(stage), std::string::npos) << stage;
    const Manifest m = Manifest::read(c.output_dir / kManifestFile);
    EXPECT_EQ(m.seeds.at("master_seed"), 1);
    for (const char* stage : {"factors", "estimate", "simulate", "report"}) EXPECT_FALSE(m.stage_files(stage).empty()) << stage;
    for (const auto& f : m.files) {
        const std::string content = slurp(c.output_dir / f.path);
        EXPECT_EQ(f.sha256, sha256_hex(content)) << f.path;
        EXPECT_EQ(f.bytes, content.size());
    }
    EXPECT_EQ(r.validation.warnings.size(), 1u);
}

TEST(Pipeline, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Cli, SameConfigTwiceGivesIdenticalManifest) {
    const fs::path dir = ts::scratch_dir("twice");
    put(dir / "run.json", "{\"data_dir\": \"" + ts::data_dir().generic_string() +
                              "\", \"output_dir\": \"out\", \"simulation\": {\"n_agents\": 300, \"replications\": 2, \"horizon_years\": 10}}");
    ASSERT_EQ(ts::run_command(cli("run --config \"" + (dir / "run.json").string() + "\" > /dev/null 2>&1")), 0);
    const std::string first = slurp(dir / "out" / "manifest.json");
    fs::remove_all(dir / "out");
    ASSERT_EQ(ts::run_command(cli("--threads 3 run --config \"" + (dir / "run.json").string() + "\" > /dev/null 2>&1")), 0);
    const Manifest a = Manifest::read(dir / "out" / "manifest.json");
    const json ja = json::parse(first);
    // threads is runtime-only; everything that determines outputs matches byte for byte
    EXPECT_EQ(ja.at("config"), a.config);
    EXPECT_EQ(ja.at("seeds"), a.seeds);
    EXPECT_EQ(ja.at("files").dump(), a.to_json().at("files").dump());
}

TEST(Cli, MissingFixtureExitsTwoNamingPath) {
    const fs::path dir = ts::scratch_dir("missing");
    const fs::path bogus = dir / "nowhere" / "population.csv";
    const fs::path log = dir / "log.txt";
    const int code = ts::run_command(cli("run --data-dir \"" + ts::data_dir().string() + "\" --out \"" + (dir / "o").string() +
                                         "\" --agents 10 --replications 1 --horizon 5 > \"" + log.string() + "\" 2>&1"));
    EXPECT_EQ(code, 0);
    put(dir / "run.json", "{\"fixtures\": {\"population\": \"" + bogus.generic_string() + "\"}}");
    const int bad = ts::run_command(cli("run --config \"" + (dir / "run.json").string() + "\" --data-dir \"" +
                                        ts::data_dir().string() + "\" --out \"" + (dir / "o2").string() + "\" > \"" +
                                        log.string() + "\" 2>&1"));
    EXPECT_EQ(bad, 2);
    EXPECT_NE(slurp(log).find(bogus.string()), std::string::npos) << slurp(log);
}

TEST(Cli, StagesRunStandalone) {
    const fs::path dir = ts::scratch_dir("stages");
    const std::string data = " --data-dir \"" + ts::data_dir().string() + "\"";
    ASSERT_EQ(ts::run_command(cli("factors build" + data + " --out \"" + (dir / "f").string() + "\" > /dev/null")), 0);
    ASSERT_EQ(ts::run_command(cli("estimate" + data + " --factors \"" + (dir / "f").string() + "\" --out \"" +
                                  (dir / "e").string() + "\" > /dev/null")),
              0);
    const ZoneMatrix t = read_zone_matrix(dir / "e" / "transition_matrix.csv");
    EXPECT_EQ(t.zones.size(), 20u);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(t.values(i, i), 0.0);
        for (std::size_t j = 0; j < 20; ++j) EXPECT_TRUE(t.values(i, j) >= 0.0 && t.values(i, j) <= 1.0);
    }
    EXPECT_TRUE(fs::exists(dir / "e" / "manifest.json"));

    ASSERT_EQ(ts::run_command(cli("simulate" + data + " --transition \"" + (dir / "e" / "transition_matrix.csv").string() +
                                  "\" --migration \"" + (dir / "f" / "migration_matrix.csv").string() +
                                  "\" --agents 500 --replications 2 --horizon 10 --out \"" + (dir / "s").string() +
                                  "\" > /dev/null")),
              0);
    ASSERT_EQ(ts::run_command(cli("report --trajectories \"" + (dir / "s").string() + "\" --out \"" + (dir / "r").string() +
                                  "\" > /dev/null")),
              0);
    // regenerating from the stored trajectories gives the same tables as an in-process report
    const fs::path again = dir / "r2";
    run_report(dir / "s", again, true);
    for (const char* f : {"speaker_counts.csv", "rankings.csv", "geo_matrices.csv", "ensemble_summary.csv", "geo_2027.svg"})
        EXPECT_EQ(slurp(dir / "r" / f), slurp(again / f)) << f;
}

TEST(Cli, ToyCatalogSimulates) {
    const fs::path dir = ts::scratch_dir("toy");
    write_toy(dir);
    const std::string args = "simulate --transition \"" + (dir / "transition.csv").string() + "\" --migration \"" +
                             (dir / "migration.csv").string() + "\" --population \"" + (dir / "population.csv").string() +
                             "\" --initial \"" + (dir / "initial_distribution.csv").string() +
                             "\" --agents 1000 --replications 1 --horizon 10 --out \"" + (dir / "s").string() + "\" > /dev/null";
    ASSERT_EQ(ts::run_command(cli(args)), 0);
    const TrajectorySet set = read_trajectories(dir / "s");
    EXPECT_EQ(set.zones, (std::vector<std::string>{"A", "B", "C"}));
    ASSERT_EQ(set.runs.size(), 1u);
    ASSERT_EQ(set.runs[0].snapshots.size(), 3u);
    // population follows the schedule through MFM
    const Tally& last = set.runs[0].snapshots.back().tally;
    EXPECT_NEAR(last.natives[0] * last.scale, 5400, last.scale);
    EXPECT_NEAR(last.natives[2] * last.scale, 1900, last.scale);

    // horizon past the last term fails in the simulate stage
    const int code = ts::run_command(cli("simulate --transition \"" + (dir / "transition.csv").string() + "\" --population \"" +
                                         (dir / "population.csv").string() + "\" --initial \"" +
                                         (dir / "initial_distribution.csv").string() +
                                         "\" --algorithm bmmcs --agents 100 --horizon 15 --out \"" + (dir / "s2").string() +
                                         "\" > \"" + (dir / "err.txt").string() + "\" 2>&1"));
    EXPECT_EQ(code, 4);
    EXPECT_NE(slurp(dir / "err.txt").find("2015"), std::string::npos) << slurp(dir / "err.txt");
}

TEST(Cli, HelpAndBadFlags) {
    EXPECT_EQ(ts::run_command(cli("--help > /dev/null")), 0);
    EXPECT_EQ(ts::run_command(cli("simulate --agents many > /dev/null 2>&1")), 2);
    EXPECT_EQ(ts::run_command(cli("validate --data-dir \"" + ts::data_dir().string() + "\" > /dev/null 2>&1")), 1);
}
