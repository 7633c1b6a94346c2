#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "epv/error.hpp"
#include "epv/forecast.hpp"
#include "epv/rng.hpp"
#include "epv/testkit.hpp"

using namespace epv;

TEST_CASE("rate_clubs: defaults, snapshots, ordering") {
    SUBCASE("a club with no matches rates 1500") {
        ClubRatingBook book = rate_clubs({});
        CHECK(book.rating_at_start("2020", "X") == doctest::Approx(1500.0));
    }
    SUBCASE("the first-season snapshot predates every match") {
        auto results = testkit::generate_two_tier_results(4, 1, 0.8, 5);
        ClubRatingBook book = rate_clubs(results);
        for (const auto& [team, league] : book.team_league.at("2020")) {
            CHECK(book.rating_at_start("2020", team) == doctest::Approx(1500.0));
        }
    }
    SUBCASE("out-of-order rounds are rejected") {
        auto results = testkit::generate_two_tier_results(2, 1, 0.8, 5);
        std::swap(results.front(), results.back());
        CHECK_THROWS_AS(rate_clubs(results), ValidationError);
    }
}

TEST_CASE("planted two-tier clubs separate by over 100 points after 3 seasons") {
    auto results = testkit::generate_two_tier_results(8, 3, 0.78, 31);
    ClubRatingBook book = rate_clubs(results);
    double strong = 0.0, weak = 0.0;
    int n = 0;
    for (const auto& [team, st] : book.final_states) {
        const double rating = glicko_display(st.mu);
        if (team < "C08") strong += rating;
        else weak += rating;
        ++n;
    }
    strong /= 8.0;
    weak /= 8.0;
    CHECK(n == 16);
    CHECK(strong - weak > 100.0);
}

TEST_CASE("league_strength: top-n mean with hard preconditions") {
    CHECK(league_strength({1600.0, 1500.0, 1400.0}, 2) == doctest::Approx(1550.0));
    CHECK(league_strength({1600.0, 1500.0, 1400.0}, 1) == doctest::Approx(1600.0));
    CHECK(league_strength({1500.0, 1500.0}, 2) == doctest::Approx(1500.0));
    CHECK_THROWS_AS(league_strength({1500.0}, 2), ValidationError);
}

TEST_CASE("delta_ratings and adjust_pcr arithmetic") {
    CHECK(delta_ratings(1500.0, 1500.0) == doctest::Approx(0.0));
    CHECK(delta_ratings(1650.0, 1500.0) == doctest::Approx(0.1));
    CHECK(delta_ratings(1400.0, 1550.0) == doctest::Approx(-0.1));

    CHECK(adjust_pcr(0.2, 0.0, 0.0) == 0.2);  // exponent zero is the identity
    CHECK(adjust_pcr(0.2, 0.1, 0.05) == doctest::Approx(0.1934).epsilon(5e-4));

    SUBCASE("monotone decreasing in both arguments") {
        const double base = adjust_pcr(0.2, 0.1, 0.1);
        CHECK(adjust_pcr(0.2, 0.2, 0.1) < base);
        CHECK(adjust_pcr(0.2, 0.1, 0.2) < base);
    }
}

TEST_CASE("feature registry: stable names, group partition, stay exclusions") {
    const auto& reg = forecast_feature_registry();
    CHECK(reg.size() >= 40);
    CHECK(forecast_feature_names().size() == reg.size());
    // every new-side feature is excluded from the stay model
    for (std::size_t i : stay_feature_indices()) {
        CHECK(!reg[i].uses_new_side);
    }
    std::size_t new_side = 0;
    for (const auto& def : reg) new_side += def.uses_new_side ? 1 : 0;
    CHECK(stay_feature_indices().size() + new_side == reg.size());
    CHECK(new_side >= 4);
}

namespace {

ForecastDataset small_panel(std::uint64_t seed = 7, int seasons = 4) {
    testkit::SynthPanelSpec spec;
    spec.seed = seed;
    spec.n_seasons = seasons;
    spec.n_leagues = 2;
    spec.teams_per_league = 6;
    spec.players_per_team = 10;
    auto panel = testkit::generate_forecast_panel(spec);
    ForecastConfig cfg;
    cfg.league_top_n = 4;
    return build_forecast_dataset(panel.lines, panel.players, panel.results, cfg);
}

}  // namespace

TEST_CASE("build_features: shape and fallbacks") {
    auto data = small_panel();
    const std::string first_season = data.seasons.front();
    const std::string last_season = data.seasons.back();

    // any line works; pick one deterministically
    const auto& key = data.lines.begin()->first;
    ForecastRow row = build_features(data, key.first, first_season);
    CHECK(row.features.size() == forecast_feature_registry().size());

    SUBCASE("missing aggregate errors with the player named") {
        CHECK_THROWS_WITH_AS(build_features(data, "nobody", first_season),
                             doctest::Contains("nobody"), ValidationError);
    }
    SUBCASE("rookie season falls back to available history") {
        // history_len is 1 in the first season
        const auto& names = forecast_feature_names();
        std::size_t hist_idx = 0;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == "history_len") hist_idx = i;
        }
        CHECK(row.features[hist_idx] == doctest::Approx(1.0));
    }
    SUBCASE("no transfer means zero delta and equal team features") {
        ForecastRow stay = build_features(data, key.first, last_season);
        CHECK(stay.new_team == stay.old_team);
        CHECK(stay.delta_ratings == doctest::Approx(0.0));
    }
    SUBCASE("feature vectors are identical across rebuilds") {
        ForecastRow again = build_features(data, key.first, first_season);
        CHECK(again.features == row.features);
    }
}

TEST_CASE("leakage audit: features never read past the season boundary") {
    testkit::SynthPanelSpec spec;
    spec.seed = 19;
    spec.n_seasons = 4;
    spec.n_leagues = 2;
    spec.teams_per_league = 6;
    spec.players_per_team = 8;
    auto panel = testkit::generate_forecast_panel(spec);
    ForecastConfig cfg;
    cfg.league_top_n = 4;
    auto full = build_forecast_dataset(panel.lines, panel.players, panel.results, cfg);

    // truncate everything after season S = seasons[1]
    const std::string s = full.seasons[1];
    const std::string next = full.seasons[2];
    std::vector<SeasonLine> trunc_lines;
    for (const auto& l : panel.lines) {
        if (l.season_id <= s) trunc_lines.push_back(l);
    }
    std::vector<MatchResult> trunc_results;
    for (const auto& r : panel.results) {
        if (r.season_id <= s) trunc_results.push_back(r);
    }
    auto trunc = build_forecast_dataset(trunc_lines, panel.players, trunc_results, cfg);
    // upcoming-season league assignments are public at the boundary; hand
    // them to the truncated book the way a real deployment would
    trunc.clubs.register_membership(next, full.clubs.team_league.at(next));

    int compared = 0;
    for (const auto& [key, line] : trunc.lines) {
        if (key.second != s) continue;
        if (line.effective_minutes < cfg.min_minutes_data) continue;
        // pin the destination so both datasets answer the same question
        auto next_it = full.lines.find({key.first, next});
        const std::string dest = next_it != full.lines.end() ? next_it->second.team_id
                                                             : line.team_id;
        ForecastRow a = build_features(full, key.first, s, dest);
        ForecastRow b = build_features(trunc, key.first, s, dest);
        REQUIRE(a.features.size() == b.features.size());
        for (std::size_t i = 0; i < a.features.size(); ++i) {
            CAPTURE(forecast_feature_names()[i]);
            REQUIRE(a.features[i] == doctest::Approx(b.features[i]).epsilon(1e-12));
        }
        ++compared;
        if (compared > 50) break;
    }
    CHECK(compared > 10);
}

TEST_CASE("stay model learns the planted departure rule") {
    auto data = small_panel(23, 5);
    auto rows = build_training_rows(data);
    Model stay = train_stay_model(rows, data.config);

    // held-out style AUC over the training rows (desk scale)
    std::vector<std::pair<double, bool>> scored;
    for (const auto& r : rows) {
        scored.emplace_back(predict_stay(stay, r), r.next_minutes >= 100.0);
    }
    double pos = 0, neg = 0, rank_sum = 0;
    std::sort(scored.begin(), scored.end());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (scored[i].second) {
            pos += 1;
            rank_sum += static_cast<double>(i) + 1.0;
        } else {
            neg += 1;
        }
    }
    REQUIRE(pos > 0);
    REQUIRE(neg > 0);
    const double auc = (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
    CHECK(auc > 0.8);

    SUBCASE("outputs stay strictly inside (0, 1)") {
        for (const auto& [p, _] : scored) {
            CHECK(p > 0.0);
            CHECK(p < 1.0);
        }
    }
    SUBCASE("single-class labels error") {
        auto one_class = rows;
        for (auto& r : one_class) r.next_minutes = 2000.0;
        CHECK_THROWS_AS(train_stay_model(one_class, data.config), ValidationError);
    }
}

TEST_CASE("pcr model beats the persistence baseline on planted data") {
    auto data = small_panel(29, 5);
    auto rows = build_training_rows(data);
    ForecastModels models;
    models.stay = train_stay_model(rows, data.config);
    models.pcr = train_pcr_model(rows, data.config);

    EvalReport report = evaluate_forecast(data, models);
    REQUIRE(!report.baseline.empty());
    CHECK(report.baseline[0].sample == "all data");
    CHECK(report.model[0].rmse_100 <= report.baseline[0].rmse_100);

    SUBCASE("constant targets collapse to near-zero error") {
        auto flat = rows;
        for (auto& r : flat) r.target = 0.15;
        Model m = train_pcr_model(flat, data.config);
        double worst = 0.0;
        for (const auto& r : flat) {
            if (r.prev_minutes < 100 || r.next_minutes < 100) continue;
            worst = std::max(worst, std::abs(predict_pcr(m, r) - 0.15));
        }
        CHECK(worst < 1e-6);
    }
    SUBCASE("fixed seed reproduces predictions exactly") {
        Model again = train_pcr_model(rows, data.config);
        for (std::size_t i = 0; i < std::min<std::size_t>(rows.size(), 50); ++i) {
            CHECK(predict_pcr(again, rows[i]) == predict_pcr(models.pcr, rows[i]));
        }
    }
}

TEST_CASE("what_if_transfer: no-op moves and monotone league penalties") {
    auto data = small_panel(37, 4);
    auto rows = build_training_rows(data);
    ForecastModels models;
    models.stay = train_stay_model(rows, data.config);
    models.pcr = train_pcr_model(rows, data.config);

    const std::string season = data.seasons[data.seasons.size() - 2];
    // pick a player with a line in that season
    std::string player;
    std::string own_team;
    for (const auto& [key, line] : data.lines) {
        if (key.second == season && line.effective_minutes > 500) {
            player = key.first;
            own_team = line.team_id;
            break;
        }
    }
    REQUIRE(!player.empty());

    SUBCASE("unknown destination errors") {
        CHECK_THROWS_AS(what_if_transfer(data, models, player, season, "NOWHERE"),
                        ValidationError);
    }
    SUBCASE("staying home equals the plain prediction") {
        ForecastRow plain = build_features(data, player, season, own_team);
        ShortlistRow row = what_if_transfer(data, models, player, season, own_team);
        CHECK(row.pcr_pred == doctest::Approx(predict_pcr(models.pcr, plain)));
    }
    SUBCASE("a stronger destination league shrinks the adjusted value") {
        // rank the two leagues the same way the feature builder does:
        // membership as of the feature season, ratings at the boundary
        const std::string boundary = data.seasons.back();
        auto strength_of = [&](const std::string& lg) {
            std::vector<double> ratings;
            for (const auto& t : data.clubs.league_teams(boundary, lg)) {
                ratings.push_back(data.clubs.rating_at_start(boundary, t));
            }
            const int n = std::min<int>(4, static_cast<int>(ratings.size()));
            return league_strength(std::move(ratings), n);
        };
        const double lg0 = strength_of("LG0");
        const double lg1 = strength_of("LG1");
        const std::string stronger_lg = lg1 > lg0 ? "LG1" : "LG0";
        const std::string weaker_lg = lg1 > lg0 ? "LG0" : "LG1";
        REQUIRE(std::abs(lg1 - lg0) > 20.0);  // the plant must be visible

        std::string weak_team, strong_team;
        for (const auto& [team, league] : data.clubs.team_league.at(boundary)) {
            if (league == weaker_lg && weak_team.empty()) weak_team = team;
            if (league == stronger_lg && strong_team.empty()) strong_team = team;
        }
        REQUIRE(!weak_team.empty());
        REQUIRE(!strong_team.empty());
        ForecastRow to_weak = build_features(data, player, season, weak_team);
        ForecastRow to_strong = build_features(data, player, season, strong_team);
        CHECK(to_strong.delta_ratings > to_weak.delta_ratings);
        const double pred = 0.2;
        const double pl = 0.05;
        CHECK(adjust_pcr(pred, to_strong.delta_ratings, pl) <
              adjust_pcr(pred, to_weak.delta_ratings, pl));
    }
    SUBCASE("shortlist is ranked by the adjusted value") {
        auto shortlist = build_shortlist(data, models, season, own_team);
        REQUIRE(!shortlist.empty());
        for (std::size_t i = 1; i < shortlist.size(); ++i) {
            CHECK(shortlist[i - 1].pcr_adj >= shortlist[i].pcr_adj);
        }
        CHECK(shortlist.front().rank == 1);
    }
}

TEST_CASE("evaluate: hand vectors and partitions") {
    std::vector<EvalInput> rows;
    EvalInput a;
    a.actual = 0.1;
    a.baseline = 0.2;
    a.model = 0.2;
    a.prev_minutes = 1200;
    rows.push_back(a);
    EvalInput b;
    b.actual = 0.3;
    b.baseline = 0.2;
    b.model = 0.2;
    b.prev_minutes = 800;
    rows.push_back(b);

    EvalReport report = evaluate(rows);
    REQUIRE(!report.baseline.empty());
    const auto& all = report.baseline[0];
    CHECK(all.sample == "all data");
    CHECK(all.n_100 == 2);
    CHECK(all.rmse_100 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(all.mae_100 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(all.n_1000 == 1);

    SUBCASE("identical predictions give zero error") {
        for (auto& r : rows) {
            r.baseline = r.actual;
            r.model = r.actual;
        }
        auto perfect = evaluate(rows);
        CHECK(perfect.baseline[0].rmse_100 == doctest::Approx(0.0));
        CHECK(perfect.baseline[0].mae_100 == doctest::Approx(0.0));
    }
    SUBCASE("groups partition the rows and squared errors add up") {
        std::vector<EvalInput> mixed;
        Rng rng(41);
        for (int i = 0; i < 200; ++i) {
            EvalInput e;
            e.actual = rng.uniform(0.0, 0.3);
            e.baseline = rng.uniform(0.0, 0.3);
            e.model = rng.uniform(0.0, 0.3);
            e.same_team = rng.bernoulli(0.6);
            e.same_league = rng.bernoulli(0.7);
            e.prev_minutes = rng.uniform(100.0, 2500.0);
            mixed.push_back(e);
        }
        auto rep = evaluate(mixed);
        REQUIRE(rep.baseline.size() == 5);
        std::size_t total = 0;
        double sse = 0.0;
        for (std::size_t g = 1; g < rep.baseline.size(); ++g) {
            total += rep.baseline[g].n_100;
            sse += rep.baseline[g].rmse_100 * rep.baseline[g].rmse_100 *
                   static_cast<double>(rep.baseline[g].n_100);
        }
        CHECK(total == mixed.size());
        const double all_sse = rep.baseline[0].rmse_100 * rep.baseline[0].rmse_100 *
                               static_cast<double>(rep.baseline[0].n_100);
        CHECK(sse == doctest::Approx(all_sse).epsilon(1e-9));
    }
    SUBCASE("empty groups are omitted with a note") {
        auto rep = evaluate(rows);  // both rows are same-team/same-league
        CHECK(rep.baseline.size() < 5);
        CHECK(!rep.notes.empty());
    }
}
