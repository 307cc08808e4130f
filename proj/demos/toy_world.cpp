// Three-zone toy world: BMP probabilities by hand, then a short BMMCSM run.

#include <cstdio>

#include "langsim/sim.hpp"
#include "langsim/stats.hpp"

using namespace langsim;

int main() {
    Matrix t(3, 3, 0.0);
    t(0, 1) = 0.2;
    t(2, 1) = 0.4;
    t(0, 2) = 0.1;
    t(1, 0) = 0.3;

    Agent a = Agent::born(0, 0);
    a.push(2);
    const BmpDistribution d = bmp_distribution(a, t);
    std::printf("stack (l1, l3): p(l2) = %.3f  (t12 + t32) / 2 = %.3f  no-learn %.3f\n", d.p[1], (t(0, 1) + t(2, 1)) / 2,
                d.no_learn);

    InitialDistribution init;
    init.zones = {{0, "A"}, {1, "B"}, {2, "C"}};
    init.l1_share = {0.5, 0.3, 0.2};
    init.l2_share = {0.2, 0.6, 0.2};
    init.alpha = 0.3;

    PopulationSchedule sched;
    sched.zones = init.zones;
    sched.terms = {2000, 2005, 2010, 2015};
    sched.persons = Grid<std::int64_t>(3, 4, 0);
    const std::int64_t base[3] = {5000, 3000, 2000};
    for (int z = 0; z < 3; ++z)
        for (int k = 0; k < 4; ++k) sched.persons(z, k) = base[z] + 100 * k * (z + 1);

    MigrationMatrix mig{Matrix(3, 3, 0.0)};
    const double rows[3][3] = {{0.9, 0.08, 0.02}, {0.05, 0.9, 0.05}, {0.1, 0.1, 0.8}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mig.m(i, j) = rows[i][j];

    SimConfig cfg;
    cfg.n_agents = 1000;
    cfg.horizon_years = 15;
    cfg.migration_enabled = true;
    const Trajectory run = run_bmmcsm(cfg, init, t, mig, sched, replication_seed(42, 0));
    for (const auto& s : run.snapshots) {
        const SpeakerCounts c = speaker_counts(s.tally);
        std::printf("%d  total A %.0f B %.0f C %.0f  off-diagonal geo mass %.4f\n", s.year, c.total[0], c.total[1], c.total[2],
                    off_diagonal_mass(geo_distribution(s.tally)));
    }
}
