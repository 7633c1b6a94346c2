#include <doctest.h>

#include <set>
#include <sstream>

#include "epv/error.hpp"
#include "epv/ingest.hpp"
#include "epv/possession.hpp"
#include "epv/testkit.hpp"

using namespace epv;

namespace {

Event make(std::int64_t idx, int half, double wall, const std::string& team, ActionKind action) {
    Event ev;
    ev.match_id = "m1";
    ev.event_index = idx;
    ev.half = half;
    ev.wall_clock_s = wall;
    ev.team_id = team;
    ev.player_id = team + std::to_string(idx % 7);
    ev.action = action;
    ev.x = 50.0;
    ev.y = 30.0;
    return ev;
}

}  // namespace

TEST_CASE("ingest: empty stream -> empty list") {
    std::istringstream in("");
    CHECK(ingest_events(in).empty());
}

TEST_CASE("ingest: one jsonl shot record") {
    std::istringstream in(
        R"({"match_id":"m1","event_index":0,"wall_clock_s":3.5,"half":1,"team_id":"A",)"
        R"("player_id":"a1","action":"shot","x":90,"y":34,"is_goal":true})"
        "\n");
    auto matches = ingest_events(in);
    REQUIRE(matches.size() == 1);
    REQUIRE(matches[0].events.size() == 1);
    CHECK(is_shot(matches[0].events[0].action));
    CHECK(matches[0].events[0].is_goal);
}

TEST_CASE("ingest: coordinate out of range names the line") {
    std::istringstream in(
        R"({"match_id":"m1","event_index":0,"wall_clock_s":0,"half":1,"team_id":"A",)"
        R"("player_id":"a1","action":"pass","x":200,"y":34})"
        "\n");
    CHECK_THROWS_WITH_AS(ingest_events(in), doctest::Contains("line 1"), ValidationError);
}

TEST_CASE("ingest: duplicate (match, index) rejected") {
    const std::string rec =
        R"({"match_id":"m1","event_index":5,"wall_clock_s":0,"half":1,"team_id":"A",)"
        R"("player_id":"a1","action":"pass","x":10,"y":34})";
    std::istringstream in(rec + "\n" + rec + "\n");
    CHECK_THROWS_AS(ingest_events(in), ValidationError);
}

TEST_CASE("ingest: unknown action maps to Other(other)") {
    std::istringstream in(
        R"({"match_id":"m1","event_index":0,"wall_clock_s":0,"half":1,"team_id":"A",)"
        R"("player_id":"a1","action":"quantum_flick","x":10,"y":34})"
        "\n");
    auto matches = ingest_events(in);
    REQUIRE(matches[0].events.size() == 1);
    CHECK(is_other(matches[0].events[0].action));
}

TEST_CASE("ingest: csv with identical header names") {
    std::istringstream in(
        "match_id,event_index,wall_clock_s,half,team_id,player_id,action,x,y,is_goal\n"
        "m1,0,1.0,1,A,a1,pass,10,20,\n"
        "m1,1,2.0,1,A,a2,shot,90,34,true\n");
    IngestOptions opts;
    opts.format = EventFormat::csv;
    auto matches = ingest_events(in, opts);
    REQUIRE(matches.size() == 1);
    REQUIRE(matches[0].events.size() == 2);
    CHECK(matches[0].events[1].is_goal);
}

TEST_CASE("ingest: jsonl round-trip is stable") {
    auto league = testkit::generate([] {
        testkit::SynthLeagueSpec spec;
        spec.n_teams = 2;
        spec.rounds_per_season = 1;
        spec.seed = 3;
        return spec;
    }());
    const std::string text = events_to_jsonl(league.matches);
    std::istringstream in(text);
    auto matches = ingest_events(in);
    CHECK(events_to_jsonl(matches) == text);
}

TEST_CASE("segmentation: five passes by one team form one possession") {
    std::vector<Event> events;
    for (int i = 0; i < 5; ++i) events.push_back(make(i, 1, i * 4.0, "A", ControlKind::pass));
    auto view = segment_possessions(events);
    for (const auto& ae : view.events) CHECK(ae.possession == 0);
}

TEST_CASE("segmentation: interception without control does not break possession") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 0, "A", ControlKind::pass));
    events.push_back(make(1, 1, 3, "B", OtherKind::interception));
    events.push_back(make(2, 1, 6, "A", ControlKind::pass));
    auto view = segment_possessions(events);
    CHECK(view.events[0].possession == 0);
    CHECK(view.events[1].possession == 0);
    CHECK(view.events[2].possession == 0);
}

TEST_CASE("segmentation: save then corner keeps the attacking possession") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 0, "A", ControlKind::shot));
    events.push_back(make(1, 1, 2, "B", OtherKind::save));
    auto corner = make(2, 1, 40, "A", ControlKind::corner_kick);
    corner.set_piece = SetPiece::corner;
    events.push_back(corner);
    events.push_back(make(3, 1, 45, "A", ControlKind::shot));
    auto view = segment_possessions(events);
    for (const auto& ae : view.events) CHECK(ae.possession == 0);
}

TEST_CASE("segmentation: duel carries the previous possession index") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 0, "A", ControlKind::pass));
    events.push_back(make(1, 1, 3, "A", DuelKind::aerial));
    events.push_back(make(2, 1, 6, "B", ControlKind::pass));
    auto view = segment_possessions(events);
    CHECK(view.events[0].possession == 0);
    CHECK(view.events[1].possession == 0);
    CHECK(view.events[2].possession == 1);
}

TEST_CASE("segmentation: random matches equal the independent recount") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto match = testkit::random_soup_match(seed, 200, "m" + std::to_string(seed));
        auto view = segment_possessions(match.events);
        auto expected = testkit::oracle_segment_possessions(match.events);
        REQUIRE(view.events.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CAPTURE(seed);
            CAPTURE(i);
            REQUIRE(view.events[i].possession == expected[i]);
        }
    }
}

TEST_CASE("segmentation: one team per possession, indices non-decreasing") {
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
        auto match = testkit::random_soup_match(seed, 150, "m");
        auto view = segment_possessions(match.events);
        std::map<int, std::string> owner_of;
        int prev = -1;
        for (const auto& ae : view.events) {
            CHECK(ae.possession >= prev);
            prev = ae.possession;
            if (!is_control(ae.ev.action)) continue;
            auto [it, fresh] = owner_of.emplace(ae.possession, ae.ev.team_id);
            if (!fresh) CHECK(it->second == ae.ev.team_id);
        }
    }
}

TEST_CASE("segmentation: possession count property per half") {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        auto match = testkit::random_soup_match(seed, 150, "m");
        auto view = segment_possessions(match.events);
        for (int half = 1; half <= 2; ++half) {
            std::set<int> possessions;
            int changes = 0;
            const Event* prev_control = nullptr;
            bool any = false;
            for (const auto& ae : view.events) {
                if (ae.ev.half != half) continue;
                any = true;
                possessions.insert(ae.possession);
                if (is_control(ae.ev.action)) {
                    if (prev_control && prev_control->team_id != ae.ev.team_id) ++changes;
                    prev_control = &ae.ev;
                }
            }
            if (any) CHECK(static_cast<int>(possessions.size()) == 1 + changes);
        }
    }
}

TEST_CASE("effective time: open play accumulates real deltas") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 10, "A", ControlKind::pass));
    events.push_back(make(1, 1, 15, "A", ControlKind::pass));
    auto view = compute_effective_time(events);
    CHECK(view.events[0].t == doctest::Approx(0.0));
    CHECK(view.events[1].t == doctest::Approx(5.0));
}

TEST_CASE("effective time: dead-ball gap before a corner contributes nothing") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 0, "A", ControlKind::shot));
    auto corner = make(1, 1, 90, "A", ControlKind::corner_kick);
    corner.set_piece = SetPiece::corner;
    events.push_back(corner);
    auto view = compute_effective_time(events);
    CHECK(view.events[1].t == doctest::Approx(0.0));
}

TEST_CASE("effective time: open-play gaps clamp at the cap") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 0, "A", ControlKind::pass));
    events.push_back(make(1, 1, 40, "A", ControlKind::pass));
    auto view = compute_effective_time(events);
    CHECK(view.events[1].t == doctest::Approx(15.0));
}

TEST_CASE("effective time: negative delta is an ordering error") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 10, "A", ControlKind::pass));
    events.push_back(make(1, 1, 5, "A", ControlKind::pass));
    CHECK_THROWS_AS(compute_effective_time(events), ValidationError);
}

TEST_CASE("effective time: invariant under stretching dead-ball gaps") {
    auto league = testkit::generate([] {
        testkit::SynthLeagueSpec spec;
        spec.n_teams = 2;
        spec.rounds_per_season = 1;
        spec.seed = 9;
        return spec;
    }());
    for (const auto& match : league.matches) {
        auto base = compute_effective_time(match.events);
        auto stretched = match.events;
        // push every set-piece restart (and everything after it) 37 s later
        for (std::size_t i = 0; i < stretched.size(); ++i) {
            if (!stretched[i].set_piece) continue;
            for (std::size_t j = i; j < stretched.size(); ++j) {
                if (stretched[j].half == stretched[i].half) stretched[j].wall_clock_s += 37.0;
            }
        }
        auto shifted = compute_effective_time(stretched);
        for (std::size_t i = 0; i < base.events.size(); ++i) {
            REQUIRE(shifted.events[i].t == doctest::Approx(base.events[i].t).epsilon(1e-12));
        }
    }
}

TEST_CASE("effective time never exceeds the wall clock") {
    for (std::uint64_t seed = 4000; seed < 4030; ++seed) {
        auto match = testkit::random_soup_match(seed, 150, "m");
        auto view = compute_effective_time(match.events);
        for (const auto& ae : view.events) {
            CHECK(ae.t <= ae.ev.wall_clock_s + 1e-9);
        }
    }
}

TEST_CASE("ingest rescales foreign pitch dimensions onto 105x68") {
    std::istringstream in(
        R"({"match_id":"m1","event_index":0,"wall_clock_s":0,"half":1,"team_id":"A",)"
        R"("player_id":"a1","action":"pass","x":50,"y":50,"end_x":100,"end_y":100})"
        "\n");
    IngestOptions opts;
    opts.pitch_length = 100.0;
    opts.pitch_width = 100.0;
    auto matches = ingest_events(in, opts);
    const Event& ev = matches[0].events[0];
    CHECK(ev.x == doctest::Approx(52.5));
    CHECK(ev.y == doctest::Approx(34.0));
    CHECK(*ev.end_x == doctest::Approx(105.0));
    CHECK(*ev.end_y == doctest::Approx(68.0));
}

TEST_CASE("filter_noncore drops Other events and is idempotent") {
    std::vector<Event> events;
    events.push_back(make(0, 1, 0, "A", ControlKind::pass));
    events.push_back(make(1, 1, 2, "B", OtherKind::interception));
    events.push_back(make(2, 1, 4, "A", ControlKind::shot));
    auto view = filter_noncore(annotate(events));
    REQUIRE(view.events.size() == 2);
    CHECK(is_shot(view.events[1].ev.action));
    auto again = filter_noncore(view);
    CHECK(again.events.size() == view.events.size());

    SUBCASE("all-Other sequence filters to empty") {
        std::vector<Event> noise;
        noise.push_back(make(0, 1, 0, "A", OtherKind::save));
        noise.push_back(make(1, 1, 2, "B", OtherKind::block));
        CHECK(filter_noncore(annotate(noise)).events.empty());
    }
}

TEST_CASE("duel_winner rule cascade") {
    Event duel = make(4, 1, 10, "A", DuelKind::aerial);
    duel.opponent_id = "b3";

    SUBCASE("foul wins outright") {
        duel.foul_suffered_by = "P7";
        CHECK(duel_winner(duel, std::nullopt) == "P7");
    }
    SUBCASE("first touch wins next") {
        duel.first_touch_by = "P3";
        CHECK(duel_winner(duel, "B") == "P3");
    }
    SUBCASE("next possession decides otherwise") {
        CHECK(duel_winner(duel, "B") == "b3");
        CHECK(duel_winner(duel, "A") == duel.player_id);
    }
    SUBCASE("no rule applies -> unresolved") {
        CHECK(!duel_winner(duel, std::nullopt).has_value());
    }
    SUBCASE("non-duel event is a contract violation") {
        CHECK_THROWS_AS(duel_winner(make(0, 1, 0, "A", ControlKind::pass), "A"),
                        std::invalid_argument);
    }
}
