#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "epv/possession.hpp"
#include "epv/season.hpp"
#include "epv/testkit.hpp"

using namespace epv;

TEST_CASE("pcr arithmetic") {
    CHECK(pcr(0.5, 150.0) == doctest::Approx(0.2));
    CHECK(pcr(0.0, 90.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(pcr(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(pcr(1.0, -5.0), std::domain_error);

    SUBCASE("scale invariance under duplication") {
        CHECK(pcr(0.5, 150.0) == pcr(1.0, 300.0));
        CHECK(pcr(0.37, 811.0) == pcr(0.74, 1622.0));
    }
}

TEST_CASE("season_rankings filters, sorts, breaks ties deterministically") {
    std::vector<SeasonLine> lines;
    auto mk = [](const std::string& p, double pcr_v, double minutes) {
        SeasonLine l;
        l.player_id = p;
        l.season_id = "2020";
        l.team_id = "T";
        l.competition_id = "L";
        l.pcr = pcr_v;
        l.effective_minutes = minutes;
        return l;
    };
    lines.push_back(mk("a", 0.2, 1200));
    lines.push_back(mk("b", 0.3, 1100));
    lines.push_back(mk("c", 0.2, 1300));
    lines.push_back(mk("d", 0.9, 500));  // below the minutes bar

    auto rows = season_rankings(lines, 1000.0);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].player == "b");
    CHECK(rows[1].player == "c");  // tie on pcr, more minutes
    CHECK(rows[2].player == "a");
    CHECK(rows[0].rank == 1);
    CHECK(rows[2].rank == 3);

    SUBCASE("all below the threshold yields an empty table") {
        CHECK(season_rankings(lines, 5000.0).empty());
    }
    SUBCASE("name mapping applies") {
        auto named = season_rankings(lines, 1000.0, {{"b", "Best Player"}});
        CHECK(named[0].player == "Best Player");
    }
}

TEST_CASE("aggregation attributes rewards, minutes and stats per player-season") {
    // one tiny match: A passes twice (one reward each), B watches
    std::vector<Event> events;
    auto mk = [&](std::int64_t i, const std::string& team, const std::string& player,
                  ActionKind action, double wall) {
        Event ev;
        ev.match_id = "m1";
        ev.event_index = i;
        ev.half = 1;
        ev.wall_clock_s = wall;
        ev.team_id = team;
        ev.player_id = player;
        ev.action = action;
        ev.x = 50;
        ev.y = 30;
        return ev;
    };
    events.push_back(mk(0, "A", "a1", ControlKind::pass, 0));
    events.push_back(mk(1, "A", "a1", ControlKind::carry, 60));
    auto shot = mk(2, "A", "a2", ControlKind::shot, 120);
    shot.is_goal = true;
    events.push_back(shot);
    events.push_back(mk(3, "B", "b1", ControlKind::pass, 180));

    std::vector<PossessionView> views{annotate(events)};
    std::vector<XgTable> xg{XgTable(4, std::numeric_limits<double>::quiet_NaN())};
    xg[0][2] = 0.4;

    std::vector<RewardRecord> rewards;
    RewardRecord r1;
    r1.match_id = "m1";
    r1.event_index = 0;
    r1.player_id = "a1";
    r1.delta_epv = 0.02;
    rewards.push_back(r1);
    RewardRecord r2 = r1;
    r2.event_index = 1;
    r2.delta_epv = 0.03;
    rewards.push_back(r2);
    RewardRecord r3 = r1;  // shot reward: excluded from the pass/carry sum
    r3.event_index = 2;
    r3.player_id = "a2";
    r3.delta_epv = 0.5;
    rewards.push_back(r3);

    std::map<std::string, MatchMeta> meta;
    meta["m1"] = {"m1", "2020", 1, "L1", "A", "B"};

    auto lines = aggregate_season_lines(views, xg, rewards, {}, meta);
    const SeasonLine* a1 = nullptr;
    const SeasonLine* a2 = nullptr;
    for (const auto& l : lines) {
        if (l.player_id == "a1") a1 = &l;
        if (l.player_id == "a2") a2 = &l;
    }
    REQUIRE(a1);
    REQUIRE(a2);
    CHECK(a1->sum_pcr_delta == doctest::Approx(0.05));
    CHECK(a2->sum_pcr_delta == doctest::Approx(0.0));  // shots carry no pass/carry credit
    CHECK(a2->goals == 1);
    CHECK(a2->xg_sum == doctest::Approx(0.4));
    CHECK(a1->effective_minutes == doctest::Approx(45.0 / 60.0));  // 3 gaps clamped at 15 s
    CHECK(a1->pcr == doctest::Approx(60.0 * 0.05 / (45.0 / 60.0)));
    CHECK(a1->competition_id == "L1");

    SUBCASE("per-row and per-group sums agree") {
        double total = 0.0;
        for (const auto& l : lines) total += l.sum_pcr_delta;
        double raw = 0.0;
        for (const auto& r : rewards) {
            if (r.event_index != 2) raw += r.delta_epv;  // the shot row never aggregates
        }
        CHECK(total == doctest::Approx(raw));
    }
}

TEST_CASE("long-pass duel report: thresholds and schema") {
    // keeper launches: 39 m pass excluded, 41 m with +11 forward gain included
    auto league = testkit::generate([] {
        testkit::SynthLeagueSpec spec;
        spec.n_teams = 2;
        spec.rounds_per_season = 2;
        spec.seed = 21;
        spec.long_pass_prob = 0.6;
        return spec;
    }());
    std::vector<PossessionView> views;
    for (const auto& m : league.matches) views.push_back(filter_noncore(annotate(m.events)));

    // constant models are fine here; the report aggregates their outputs
    EpvModelSet models;
    auto cm = [](double v, const std::vector<std::string>& names) {
        Model m;
        m.kind = Model::Kind::gbt;
        m.objective = ObjectiveKind::weighted_mse;
        m.feature_names = names;
        m.base_score = v;
        return m;
    };
    models.control_open = cm(0.05, epv_control_open_feature_names());
    models.control_set_piece = cm(0.02, epv_control_set_piece_feature_names());
    models.duel_avg_aerial = cm(0.04, epv_duel_avg_feature_names());
    models.duel_avg_ground = cm(0.04, epv_duel_avg_feature_names());
    models.duel_ind_aerial = cm(0.10, epv_duel_ind_feature_names());
    models.duel_ind_ground = cm(0.10, epv_duel_ind_feature_names());

    const std::string keeper = league.keeper_of.at("T01");
    auto rows = long_pass_duel_report(views, keeper, models, {});
    REQUIRE(!rows.empty());
    for (const auto& r : rows) {
        CHECK((r.duel == "aerial" || r.duel == "ground"));
        CHECK(r.duels > 0);
        CHECK(r.saved_pct >= 0.0);
        CHECK(r.saved_pct <= 100.0);
        CHECK(r.apriori_pct >= 0.0);
        CHECK(r.apriori_pct <= 100.0);
    }
    // the planted targets dominate the keeper's launches
    std::set<std::string> names;
    for (const auto& r : rows) names.insert(r.player);
    CHECK(names.count(league.strong_target_of.at("T01")) +
              names.count(league.weak_target_of.at("T01")) >=
          1);

    SUBCASE("absent passer yields an empty table") {
        CHECK(long_pass_duel_report(views, "ghost", models, {}).empty());
    }
    SUBCASE("thresholds cut by distance and forward gain") {
        // a synthetic view with one short and one long launch
        std::vector<Event> events;
        auto mk = [&](std::int64_t i, ActionKind a, double x, double y) {
            Event ev;
            ev.match_id = "t";
            ev.event_index = i;
            ev.half = 1;
            ev.wall_clock_s = static_cast<double>(i) * 4;
            ev.team_id = "A";
            ev.player_id = "gk";
            ev.action = a;
            ev.x = x;
            ev.y = y;
            return ev;
        };
        auto short_pass = mk(0, ControlKind::pass, 10, 34);
        short_pass.end_x = 10.0 + 39.0;  // 39 m, below the bar
        short_pass.end_y = 34;
        events.push_back(short_pass);
        auto d1 = mk(1, DuelKind::aerial, 49, 34);
        d1.player_id = "t1";
        d1.opponent_id = "d1";
        d1.team_id = "A";
        events.push_back(d1);
        auto recover = mk(2, ControlKind::pass, 50, 34);
        recover.player_id = "a5";
        events.push_back(recover);

        auto long_pass = mk(3, ControlKind::pass, 10, 34);
        long_pass.end_x = 10.0 + 40.5;  // 40.5 m ahead, 41 m total
        long_pass.end_y = 34 + 6.4;
        events.push_back(long_pass);
        auto d2 = mk(4, DuelKind::aerial, 51, 40);
        d2.player_id = "t2";
        d2.opponent_id = "d2";
        d2.team_id = "A";
        events.push_back(d2);
        auto after = mk(5, ControlKind::pass, 52, 40);
        after.player_id = "a6";
        events.push_back(after);

        auto view = filter_noncore(annotate(events));
        auto out = long_pass_duel_report({view}, "gk", models, {});
        REQUIRE(out.size() == 1);
        CHECK(out[0].player == "t2");
        CHECK(out[0].saved_pct == doctest::Approx(100.0));
    }
}
