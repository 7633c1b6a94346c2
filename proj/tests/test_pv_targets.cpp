#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>

#include "epv/possession.hpp"
#include "epv/pv.hpp"
#include "epv/testkit.hpp"

using namespace epv;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Hand-built single-match view: (team, action, wall clock seconds).
struct Step {
    std::string team;
    ActionKind action;
    double wall;
    bool is_goal = false;
};

PossessionView build_view(const std::vector<Step>& steps) {
    std::vector<Event> events;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        Event ev;
        ev.match_id = "m";
        ev.event_index = static_cast<std::int64_t>(i);
        ev.half = 1;
        ev.wall_clock_s = steps[i].wall;
        ev.team_id = steps[i].team;
        ev.player_id = steps[i].team + std::to_string(i);
        ev.action = steps[i].action;
        ev.is_goal = steps[i].is_goal;
        ev.x = 50;
        ev.y = 30;
        events.push_back(ev);
    }
    // wide stoppage cap so wall clock deltas pass through unchanged
    return filter_noncore(annotate(events, 1e9));
}

}  // namespace

TEST_CASE("pv_basic: no shots -> 0") {
    auto view = build_view({{"A", ControlKind::pass, 0}, {"A", ControlKind::carry, 5}});
    std::vector<double> xg(view.events.size(), kNaN);
    CHECK(pv_basic(view, xg, 0) == doctest::Approx(0.0));
}

TEST_CASE("pv_basic: single future shot passes its xG through") {
    auto view = build_view({{"A", ControlKind::pass, 0}, {"A", ControlKind::shot, 10}});
    std::vector<double> xg = {kNaN, 0.75};
    CHECK(pv_basic(view, xg, 0) == doctest::Approx(0.75));
}

TEST_CASE("pv_basic: two future shots compound") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", ControlKind::shot, 5},
                            {"A", ControlKind::shot, 9}});
    std::vector<double> xg = {kNaN, 0.1, 0.2};
    CHECK(pv_basic(view, xg, 0) == doctest::Approx(1.0 - 0.9 * 0.8));
}

TEST_CASE("pv_basic: only a control action is a valid anchor") {
    auto view = build_view({{"A", ControlKind::pass, 0}, {"A", DuelKind::aerial, 3}});
    std::vector<double> xg(view.events.size(), kNaN);
    CHECK_THROWS_AS(pv_basic(view, xg, 1), std::invalid_argument);
}

TEST_CASE("pv_decay: worked decay example") {
    auto view = build_view({{"A", ControlKind::pass, 0}, {"A", ControlKind::shot, 30}});
    std::vector<double> xg = {kNaN, 0.75};
    const double expected = std::pow(0.95, 30.0) * 0.75;
    CHECK(pv_decay(view, xg, 0, 0.95) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.161).epsilon(0.01));
}

TEST_CASE("pv_decay: gamma = 1 reduces to pv_basic") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", ControlKind::shot, 7},
                            {"A", ControlKind::shot, 13}});
    std::vector<double> xg = {kNaN, 0.3, 0.4};
    CHECK(pv_decay(view, xg, 0, 1.0) == pv_basic(view, xg, 0));
}

TEST_CASE("pv_decay: mixed-delta product") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", ControlKind::shot, 0},
                            {"A", ControlKind::shot, 10}});
    std::vector<double> xg = {kNaN, 0.1, 0.2};
    const double expected = 1.0 - (1.0 - 0.1) * (1.0 - std::pow(0.95, 10.0) * 0.2);
    CHECK(pv_decay(view, xg, 0, 0.95) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.2078).epsilon(1e-3));
}

TEST_CASE("pv_risk: no shots on either side -> 0") {
    auto view = build_view({{"A", ControlKind::pass, 0}, {"B", ControlKind::pass, 10}});
    std::vector<double> xg(view.events.size(), kNaN);
    CHECK(pv_risk(view, xg, 0, 0.95, 300.0) == doctest::Approx(0.0));
}

TEST_CASE("pv_risk: lone opponent penalty 30 s later") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"B", ControlKind::pass, 10},
                            {"B", ControlKind::shot, 30}});
    std::vector<double> xg = {kNaN, kNaN, 0.75};
    const double expected = -std::pow(0.95, 30.0) * 0.75;
    CHECK(pv_risk(view, xg, 0, 0.95, 300.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(-0.161).epsilon(0.01));
}

TEST_CASE("pv_risk: mirrored shot sets cancel") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", ControlKind::shot, 20},
                            {"B", ControlKind::shot, 20}});
    std::vector<double> xg = {kNaN, 0.3, 0.3};
    CHECK(pv_risk(view, xg, 0, 0.95, 300.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("pv_risk: shots beyond the horizon are ignored") {
    auto view = build_view({{"A", ControlKind::pass, 0}, {"B", ControlKind::shot, 400}});
    std::vector<double> xg = {kNaN, 0.9};
    CHECK(pv_risk(view, xg, 0, 0.95, 300.0) == doctest::Approx(0.0));
    CHECK(pv_risk(view, xg, 0, 0.95, 500.0) < 0.0);
}

TEST_CASE("pv_duel: sign follows the next control action's team") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", DuelKind::aerial, 5},
                            {"A", ControlKind::pass, 8},
                            {"A", ControlKind::shot, 12}});
    std::vector<double> xg = {kNaN, kNaN, kNaN, 0.2};
    std::vector<double> control_pv(view.events.size(), kNaN);
    control_pv[2] = 0.2;

    CHECK(pv_duel(view, control_pv, 1) == doctest::Approx(0.2));

    SUBCASE("opponent control flips the sign") {
        auto flipped = build_view({{"A", ControlKind::pass, 0},
                                   {"A", DuelKind::aerial, 5},
                                   {"B", ControlKind::pass, 8}});
        std::vector<double> pv = {kNaN, kNaN, 0.2};
        CHECK(pv_duel(flipped, pv, 1) == doctest::Approx(-0.2));
    }
    SUBCASE("duel chains propagate from the first control after the chain") {
        auto chain = build_view({{"A", DuelKind::aerial, 0},
                                 {"A", DuelKind::ground, 2},
                                 {"A", ControlKind::pass, 4}});
        std::vector<double> pv = {kNaN, kNaN, 0.3};
        CHECK(pv_duel(chain, pv, 0) == doctest::Approx(0.3));
        CHECK(pv_duel(chain, pv, 1) == doctest::Approx(0.3));
    }
    SUBCASE("no control action until the half ends -> unlabeled") {
        auto tail = build_view({{"A", ControlKind::pass, 0}, {"A", DuelKind::aerial, 5}});
        std::vector<double> pv = {0.1, kNaN};
        CHECK(!pv_duel(tail, pv, 1).has_value());
    }
}

TEST_CASE("label_dataset: empty and trivial cases") {
    PossessionView empty;
    std::vector<double> no_xg;
    CHECK(label_dataset(empty, no_xg, {}).empty());

    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", DuelKind::aerial, 4},
                            {"A", ControlKind::shot, 8}});
    std::vector<double> xg = {kNaN, kNaN, 0.4};
    auto labels = label_dataset(view, xg, {});
    CHECK(labels.size() == 3);  // two controls + one labeled duel
}

TEST_CASE("pv invariants on random streams") {
    PvConfig decay_cfg;
    decay_cfg.variant = PvVariant::decay;
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
        auto match = testkit::random_soup_match(seed, 120, "m");
        auto view = filter_noncore(annotate(match.events));
        auto xg = testkit::hashed_xg_table(view);
        for (std::size_t i = 0; i < view.events.size(); ++i) {
            if (!is_control(view.events[i].ev.action)) continue;
            const double basic = pv_basic(view, xg, i);
            const double decay = pv_decay(view, xg, i, 0.95);
            const double risk = pv_risk(view, xg, i, 0.95, 300.0);
            CHECK(basic >= 0.0);
            CHECK(basic <= 1.0);
            CHECK(decay >= 0.0);
            CHECK(decay <= 1.0);
            CHECK(risk >= -1.0);
            CHECK(risk <= 1.0);
            // decay never exceeds the undecayed accumulation
            CHECK(decay <= basic + 1e-12);
        }
    }
}

TEST_CASE("pv monotonicity: raising a future same-possession xG never lowers the target") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", ControlKind::shot, 6},
                            {"A", ControlKind::shot, 11}});
    std::vector<double> xg = {kNaN, 0.2, 0.3};
    const double before = pv_decay(view, xg, 0, 0.95);
    xg[1] = 0.4;
    CHECK(pv_decay(view, xg, 0, 0.95) >= before);
}

TEST_CASE("pv_decay is non-decreasing toward trailing shots within a possession") {
    auto view = build_view({{"A", ControlKind::pass, 0},
                            {"A", ControlKind::carry, 6},
                            {"A", ControlKind::pass, 12},
                            {"A", ControlKind::shot, 20},
                            {"A", ControlKind::shot, 24}});
    std::vector<double> xg = {kNaN, kNaN, kNaN, 0.15, 0.25};
    double prev = -1.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = pv_decay(view, xg, i, 0.95);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("labeling agrees with the brute-force oracle on random matches") {
    for (PvVariant variant : {PvVariant::basic, PvVariant::decay, PvVariant::risk}) {
        PvConfig cfg;
        cfg.variant = variant;
        for (std::uint64_t seed = 500; seed < 520; ++seed) {
            auto match = testkit::random_soup_match(seed, 200, "m" + std::to_string(seed));
            auto view = filter_noncore(annotate(match.events));
            auto xg = testkit::hashed_xg_table(view);
            auto got = label_dataset(view, xg, cfg);
            auto expected = testkit::oracle_label(view, xg, cfg);
            REQUIRE(got.size() == expected.size());
            for (std::size_t k = 0; k < got.size(); ++k) {
                REQUIRE(got[k].view_index == expected[k].view_index);
                REQUIRE(got[k].kind == expected[k].kind);
                REQUIRE(std::abs(got[k].pv - expected[k].pv) < 1e-12);
            }
        }
    }
}
