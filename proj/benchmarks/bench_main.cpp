#include <benchmark/benchmark.h>

#include "epv/glicko.hpp"
#include "epv/learners.hpp"
#include "epv/possession.hpp"
#include "epv/pv.hpp"
#include "epv/rng.hpp"
#include "epv/testkit.hpp"
#include "epv/xg.hpp"

namespace {

using namespace epv;

const std::vector<MatchEvents>& fixture_matches() {
    static const std::vector<MatchEvents> matches = [] {
        testkit::SynthLeagueSpec spec;
        spec.n_teams = 8;
        spec.rounds_per_season = 4;
        spec.seed = 1;
        return testkit::generate(spec).matches;
    }();
    return matches;
}

void BM_SegmentPossessions(benchmark::State& state) {
    const auto& matches = fixture_matches();
    std::size_t events = 0;
    for (auto _ : state) {
        for (const auto& m : matches) {
            auto view = segment_possessions(m.events);
            benchmark::DoNotOptimize(view);
            events += m.events.size();
        }
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SegmentPossessions);

void BM_EffectiveTime(benchmark::State& state) {
    const auto& matches = fixture_matches();
    std::size_t events = 0;
    for (auto _ : state) {
        for (const auto& m : matches) {
            auto view = compute_effective_time(m.events);
            benchmark::DoNotOptimize(view);
            events += m.events.size();
        }
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_EffectiveTime);

void BM_LabelRisk(benchmark::State& state) {
    const auto& matches = fixture_matches();
    std::vector<PossessionView> views;
    std::vector<XgTable> tables;
    for (const auto& m : matches) {
        views.push_back(filter_noncore(annotate(m.events)));
        tables.push_back(testkit::hashed_xg_table(views.back()));
    }
    PvConfig cfg;
    std::size_t labeled = 0;
    for (auto _ : state) {
        for (std::size_t i = 0; i < views.size(); ++i) {
            auto labels = label_dataset(views[i], tables[i], cfg);
            benchmark::DoNotOptimize(labels);
            labeled += labels.size();
        }
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(labeled));
}
BENCHMARK(BM_LabelRisk);

void BM_GlickoPeriod(benchmark::State& state) {
    Rng rng(7);
    std::vector<GlickoMatchup> games;
    for (int i = 0; i < 12; ++i) {
        games.push_back({rng.uniform(-1.0, 1.0), rng.uniform(0.4, 2.0),
                         rng.bernoulli(0.5) ? 1.0 : 0.0, 0.0});
    }
    GlickoState st;
    for (auto _ : state) {
        benchmark::DoNotOptimize(glicko_update(st, games));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 12);
}
BENCHMARK(BM_GlickoPeriod);

void BM_GbtTrain(benchmark::State& state) {
    Rng rng(11);
    std::vector<TrainingRow> rows;
    for (int i = 0; i < 5000; ++i) {
        TrainingRow r;
        r.features = {rng.uniform(0, 105), rng.uniform(0, 68), rng.uniform(0, 40),
                      rng.uniform(0, 3), rng.uniform(0, 1)};
        r.target = r.features[2] * 0.01 + rng.normal(0.0, 0.05);
        r.player_id = "p" + std::to_string(i % 200);
        rows.push_back(r);
    }
    assign_per_player_weights(rows);
    GbtConfig cfg;
    cfg.trees = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_gbt(rows, Objective::weighted_mse(), cfg));
    }
}
BENCHMARK(BM_GbtTrain)->Arg(20)->Arg(80);

void BM_LeagueGenerate(benchmark::State& state) {
    testkit::SynthLeagueSpec spec;
    spec.n_teams = 8;
    spec.rounds_per_season = static_cast<int>(state.range(0));
    for (auto _ : state) {
        spec.seed += 1;  // fresh stream each iteration
        benchmark::DoNotOptimize(testkit::generate(spec));
    }
}
BENCHMARK(BM_LeagueGenerate)->Arg(2)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
