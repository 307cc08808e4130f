#pragma once

// Batch-Markov Monte Carlo simulation of language stacks, with and without
// migration.
//
// Each step covers `step_years` years: every agent makes
// `learn_events_per_step` learning draws, then (with migration) redraws its
// residence once, then mortality/fertility steers native-zone populations to
// the schedule's term for the step's end year.
//
// Stream discipline: every random draw comes from a Xoshiro256 stream seeded
// by mix_seed({replication seed, purpose tag, step, agent id or zone}).
// Storage order of agents therefore never affects results, and neither does
// the number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "langsim/data.hpp"
#include "langsim/error.hpp"
#include "langsim/factors.hpp"
#include "langsim/grid.hpp"
#include "langsim/parallel.hpp"
#include "langsim/rng.hpp"
#include "langsim/society.hpp"
#include "langsim/stats.hpp"

namespace langsim {

enum class Algorithm { Bmmcs, Bmmcsm };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::Bmmcs ? "bmmcs" : "bmmcsm"; }

struct SimConfig {
    int n_agents = 100000;
    int replications = 1;
    int horizon_years = 50;
    int step_years = 5;
    int learn_events_per_step = 5;
    bool migration_enabled = false;
    double alpha0 = 0.04;  // death proportion per step
    std::uint64_t master_seed = 1;
    int threads = 1;  // does not affect results

    int steps() const { return step_years > 0 ? horizon_years / step_years : 0; }

    void validate() const {
        auto bad = [](const std::string& m) { throw Error(Errc::ConfigError, m); };
        if (n_agents < 1) bad("n_agents must be >= 1");
        if (replications < 1) bad("replications must be >= 1");
        if (step_years < 1) bad("step_years must be >= 1");
        if (horizon_years < 0 || horizon_years % step_years != 0) bad("horizon_years must be a non-negative multiple of step_years");
        if (learn_events_per_step < 0) bad("learn_events_per_step must be >= 0");
        if (!(alpha0 >= 0.0 && alpha0 < 1.0)) bad("alpha0 must lie in [0, 1)");
    }
};

namespace stream {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kLearn = 2;
inline constexpr std::uint64_t kMigrate = 3;
inline constexpr std::uint64_t kMortality = 4;
}  // namespace stream

inline std::uint64_t replication_seed(std::uint64_t master_seed, int replication) {
    return mix_seed({master_seed, static_cast<std::uint64_t>(replication)});
}

// ---------------------------------------------------------------------------
// Learning

/// Next-language distribution of one agent: candidates are the languages
/// not yet on the stack, p_j = (1/|stack|) sum_{i in stack} t_ij. Whatever
/// mass is left is "learn nothing"; if the candidates exceed 1 they are
/// rescaled to sum to 1.
struct BmpDistribution {
    std::vector<double> p;  // 0 for languages already on the stack
    double no_learn = 1.0;
};

namespace detail {

/// Fills p from per-language sums over the stack; returns the no-learn mass.
inline double bmp_from_sums(std::span<const double> stack_sums, std::uint32_t mask, int stack_size, std::span<double> p) {
    const double k = stack_size;
    double total = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = (mask >> j) & 1u ? 0.0 : stack_sums[j] / k;
        total += p[j];
    }
    if (total <= 1.0) return 1.0 - total;
    for (double& v : p) v /= total;
    return 0.0;
}

/// Inverse-CDF draw over p; returns -1 for "no learning".
inline int draw_candidate(std::span<const double> p, double u) {
    double acc = 0.0;
    int last = -1;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        acc += p[j];
        last = static_cast<int>(j);
        if (u < acc) return last;
    }
    return acc >= 1.0 ? last : -1;
}

inline void check_square(const Matrix& m, int zones, const char* what) {
    if (m.rows() != static_cast<std::size_t>(zones) || m.cols() != static_cast<std::size_t>(zones))
        throw Error(Errc::SchemaMismatch, std::string(what) + " must be " + std::to_string(zones) + "x" + std::to_string(zones));
}

}  // namespace detail

inline BmpDistribution bmp_distribution(const Agent& agent, const Matrix& t) {
    const std::size_t n = t.rows();
    std::vector<double> sums(n, 0.0);
    for (std::uint8_t i : agent.stack())
        for (std::size_t j = 0; j < n; ++j) sums[j] += t(i, j);
    BmpDistribution out{std::vector<double>(n, 0.0), 1.0};
    out.no_learn = detail::bmp_from_sums(sums, agent.mask, agent.size, out.p);
    return out;
}

/// `events` learning draws for one agent, each from its current stack.
inline void learn_agent(Agent& agent, const Matrix& t, int events, Xoshiro256& rng, std::vector<double>& sums,
                        std::vector<double>& p) {
    const std::size_t n = t.rows();
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::uint8_t i : agent.stack())
        for (std::size_t j = 0; j < n; ++j) sums[j] += t(i, j);
    for (int e = 0; e < events; ++e) {
        if (agent.size == n) return;
        detail::bmp_from_sums(sums, agent.mask, agent.size, p);
        const int j = detail::draw_candidate(p, uniform01(rng));
        if (j < 0) continue;
        agent.push(j);
        for (std::size_t c = 0; c < n; ++c) sums[c] += t(j, c);
    }
}

inline void learn_step(Society& society, const Matrix& t, int events, std::uint64_t replication_seed, int step, int threads = 1) {
    detail::check_square(t, society.zones, "transition matrix");
    const auto n = static_cast<std::size_t>(society.zones);
    const std::size_t count = society.agents.size();
    const int workers = std::max(1, threads);
    const std::size_t blocks = static_cast<std::size_t>(workers) * 4;
    parallel_for(std::min(blocks, std::max<std::size_t>(count, 1)), workers, [&](std::size_t b) {
        const std::size_t parts = std::min(blocks, std::max<std::size_t>(count, 1));
        std::vector<double> sums(n), p(n);
        for (std::size_t k = count * b / parts; k < count * (b + 1) / parts; ++k) {
            Agent& a = society.agents[k];
            Xoshiro256 rng(mix_seed({replication_seed, stream::kLearn, static_cast<std::uint64_t>(step), a.id}));
            learn_agent(a, t, events, rng, sums, p);
        }
    });
}

// ---------------------------------------------------------------------------
// Migration

/// (m_residence + m_native) / 2.
inline std::vector<double> migration_row(const Agent& agent, const MigrationMatrix& mig) {
    const std::size_t n = mig.size();
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = (mig.m(agent.residence, j) + mig.m(agent.native(), j)) / 2.0;
    return row;
}

inline void migrate_step(Society& society, const MigrationMatrix& mig, std::uint64_t replication_seed, int step, int threads = 1) {
    detail::check_square(mig.m, society.zones, "migration matrix");
    parallel_for(society.agents.size(), threads, [&](std::size_t k) {
        Agent& a = society.agents[k];
        Xoshiro256 rng(mix_seed({replication_seed, stream::kMigrate, static_cast<std::uint64_t>(step), a.id}));
        const auto row = migration_row(a, mig);
        const int dest = detail::draw_candidate(row, uniform01(rng));
        if (dest >= 0) a.residence = static_cast<std::uint8_t>(dest);
    });
}

// ---------------------------------------------------------------------------
// Mortality and fertility

/// For each native zone z: remove floor(alpha0 * n_z) agents chosen uniformly,
/// then remove more (uniformly) or add newborns (stack (z), residence z)
/// until the zone holds round(target(z, term) / scale) agents.
inline void mfm_step(Society& society, const PopulationSchedule& sched, std::size_t term, double alpha0,
                     std::uint64_t replication_seed, int step) {
    const auto n = static_cast<std::size_t>(society.zones);
    if (sched.persons.rows() != n) throw Error(Errc::SchemaMismatch, "schedule zone count differs from society");
    if (term >= sched.terms.size()) throw Error(Errc::ConfigError, "term index out of range");

    std::vector<std::vector<std::size_t>> by_zone(n);
    for (std::size_t k = 0; k < society.agents.size(); ++k) by_zone[society.agents[k].native()].push_back(k);

    std::vector<std::size_t> doomed;
    std::vector<std::int64_t> births(n, 0);
    for (std::size_t z = 0; z < n; ++z) {
        auto& members = by_zone[z];
        std::sort(members.begin(), members.end(),
                  [&](std::size_t a, std::size_t b) { return society.agents[a].id < society.agents[b].id; });
        const auto present = static_cast<std::int64_t>(members.size());
        const auto target = std::llround(static_cast<double>(sched.persons(z, term)) / society.scale);
        if (target < 0)
            throw Error(Errc::TargetUnreachable, "zone " + std::to_string(z) + " has a negative population target");
        const auto deaths = static_cast<std::int64_t>(std::floor(alpha0 * static_cast<double>(present)));
        const std::int64_t survivors = present - deaths;
        const std::int64_t removals = deaths + std::max<std::int64_t>(0, survivors - target);
        births[z] = std::max<std::int64_t>(0, target - survivors);

        Xoshiro256 rng(mix_seed({replication_seed, stream::kMortality, static_cast<std::uint64_t>(step), z}));
        for (std::int64_t r = 0; r < removals; ++r) {
            const auto pick = static_cast<std::size_t>(r) + uniform_below(rng, static_cast<std::uint64_t>(present - r));
            std::swap(members[static_cast<std::size_t>(r)], members[pick]);
            doomed.push_back(members[static_cast<std::size_t>(r)]);
        }
    }

    std::sort(doomed.begin(), doomed.end(), std::greater<>());
    for (std::size_t k : doomed) {
        society.agents[k] = society.agents.back();
        society.agents.pop_back();
    }
    for (std::size_t z = 0; z < n; ++z)
        for (std::int64_t b = 0; b < births[z]; ++b) society.agents.push_back(Agent::born(society.next_id++, static_cast<int>(z)));
}

// ---------------------------------------------------------------------------
// Initial society

/// Native language ~ l1_share; with probability alpha a second language
/// ~ l2_share restricted to zones other than the native one; residence =
/// native zone; scale = world population of the first term / n_agents.
inline Society sample_initial_society(const InitialDistribution& dist, const PopulationSchedule& sched, int n_agents,
                                      std::uint64_t replication_seed) {
    const std::size_t n = dist.l1_share.size();
    if (n == 0 || n > static_cast<std::size_t>(kMaxZones))
        throw Error(Errc::ConfigError, "zone count must lie in 1.." + std::to_string(kMaxZones));
    if (sched.persons.rows() != n) throw Error(Errc::SchemaMismatch, "schedule and distribution disagree on zone count");
    if (n_agents < 1) throw Error(Errc::ConfigError, "n_agents must be >= 1");

    Society s;
    s.zones = static_cast<int>(n);
    s.year = sched.terms.front();
    s.scale = static_cast<double>(sched.world_total(0)) / n_agents;
    s.agents.reserve(static_cast<std::size_t>(n_agents));
    Xoshiro256 rng(mix_seed({replication_seed, stream::kInit}));
    std::vector<double> l2(n);
    for (int k = 0; k < n_agents; ++k) {
        const auto native = static_cast<int>(sample_index(dist.l1_share, uniform01(rng)));
        Agent a = Agent::born(s.next_id++, native);
        const bool bilingual = uniform01(rng) < dist.alpha;
        const double u = uniform01(rng);
        if (bilingual) {
            std::copy(dist.l2_share.begin(), dist.l2_share.end(), l2.begin());
            l2[native] = 0.0;
            const auto second = sample_index(l2, u);
            if (second < n) a.push(static_cast<int>(second));
        }
        s.agents.push_back(a);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Runs

struct SimInputs {
    const InitialDistribution& initial;
    const PopulationSchedule& schedule;
    const Matrix& transition;
    const MigrationMatrix* migration = nullptr;  // required for BMMCSM
};

namespace detail {

inline std::vector<std::size_t> step_terms(const SimConfig& cfg, const PopulationSchedule& sched) {
    std::vector<std::size_t> terms;
    for (int s = 1; s <= cfg.steps(); ++s) {
        const int year = sched.terms.front() + s * cfg.step_years;
        auto k = sched.term_index(year);
        if (!k) throw Error(Errc::ConfigError, "population schedule has no term for year " + std::to_string(year));
        terms.push_back(*k);
    }
    return terms;
}

inline Trajectory run(Algorithm algorithm, const SimConfig& cfg, const SimInputs& in, std::uint64_t seed, int threads) {
    cfg.validate();
    const auto terms = step_terms(cfg, in.schedule);
    if (algorithm == Algorithm::Bmmcsm && in.migration == nullptr)
        throw Error(Errc::ConfigError, "BMMCSM needs a migration matrix");
    for (double v : in.transition.values())
        if (!(v >= 0.0 && std::isfinite(v))) throw Error(Errc::ValueError, "transition entries must be finite and >= 0");

    Society society = sample_initial_society(in.initial, in.schedule, cfg.n_agents, seed);
    detail::check_square(in.transition, society.zones, "transition matrix");
    Trajectory traj;
    traj.seed = seed;
    traj.snapshots.push_back({0, society.year, tally(society)});
    for (int s = 1; s <= cfg.steps(); ++s) {
        learn_step(society, in.transition, cfg.learn_events_per_step, seed, s, threads);
        if (algorithm == Algorithm::Bmmcsm) migrate_step(society, *in.migration, seed, s, threads);
        mfm_step(society, in.schedule, terms[static_cast<std::size_t>(s - 1)], cfg.alpha0, seed, s);
        society.year = in.schedule.terms[terms[static_cast<std::size_t>(s - 1)]];
        traj.snapshots.push_back({s, society.year, tally(society)});
    }
    return traj;
}

}  // namespace detail

/// Algorithm without migration: learning then mortality/fertility each step.
inline Trajectory run_bmmcs(const SimConfig& cfg, const InitialDistribution& initial, const Matrix& transition,
                            const PopulationSchedule& sched, std::uint64_t seed) {
    if (cfg.migration_enabled) throw Error(Errc::ConfigError, "run_bmmcs requires migration to be disabled");
    return detail::run(Algorithm::Bmmcs, cfg, {initial, sched, transition, nullptr}, seed, cfg.threads);
}

/// Algorithm with migration: learning, migration, mortality/fertility.
inline Trajectory run_bmmcsm(const SimConfig& cfg, const InitialDistribution& initial, const Matrix& transition,
                             const MigrationMatrix& migration, const PopulationSchedule& sched, std::uint64_t seed) {
    return detail::run(Algorithm::Bmmcsm, cfg, {initial, sched, transition, &migration}, seed, cfg.threads);
}

/// Replication r, seeded by replication_seed(master_seed, r).
inline Trajectory run_replication(const SimConfig& cfg, const SimInputs& in, int replication, int threads = 1) {
    const Algorithm algorithm = cfg.migration_enabled ? Algorithm::Bmmcsm : Algorithm::Bmmcs;
    Trajectory t = detail::run(algorithm, cfg, in, replication_seed(cfg.master_seed, replication), threads);
    t.replication = replication;
    return t;
}

inline std::vector<Trajectory> run_replications(const SimConfig& cfg, const SimInputs& in) {
    cfg.validate();
    const auto count = static_cast<std::size_t>(cfg.replications);
    std::vector<Trajectory> out(count);
    const int threads = std::max(1, cfg.threads);
    const int outer = std::min(threads, cfg.replications);
    const int inner = std::max(1, threads / outer);
    parallel_for(count, outer, [&](std::size_t r) { out[r] = run_replication(cfg, in, static_cast<int>(r), inner); });
    return out;
}

}  // namespace langsim
