#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "epv/duels.hpp"
#include "epv/events.hpp"
#include "epv/forecast.hpp"
#include "epv/glicko.hpp"
#include "epv/pv.hpp"

namespace epv::testkit {

// ---------------------------------------------------------------------------
// synthetic league (event-level)
// ---------------------------------------------------------------------------

/// Planted-truth league generator. Same seed, same byte stream.
struct SynthLeagueSpec {
    int n_teams = 8;
    int players_per_team = 11;
    int n_seasons = 1;
    int rounds_per_season = 0;  // 0 = double round robin
    std::uint64_t seed = 42;
    int first_season_year = 2020;
    std::string league_id = "L1";

    double possessions_per_half = 40.0;
    double shot_prob = 0.24;
    double duel_prob = 0.22;
    double interception_prob = 0.10;
    double save_prob = 0.55;
    double save_corner_prob = 0.40;
    double penalty_prob = 0.025;
    double penalty_conversion = 0.75;   // planted penalty xG
    double defender_aerial_edge = 0.5;  // logit units
    double duel_skill_gap = 1.6;        // strong vs weak long-pass targets
    double long_pass_prob = 0.35;       // keeper launches into a planted duel
    double team_strength_gap = 0.8;
    int squad_churn_per_season = 2;     // players replaced per team per season
};

/// key = value text form (one pair per line, '#' comments).
SynthLeagueSpec parse_league_spec(const std::string& text);
std::string league_spec_to_string(const SynthLeagueSpec& spec);

struct SynthLeague {
    std::vector<MatchEvents> matches;
    std::vector<PlayerMeta> players;
    std::vector<MatchMeta> match_meta;
    std::vector<MatchResult> results;
    // planted ground truth
    std::map<std::string, double> pass_skill;
    std::map<std::string, double> aerial_skill;
    std::map<std::string, double> ground_skill;
    std::map<std::string, double> team_strength;
    std::map<std::string, std::string> keeper_of;        // team -> player
    std::map<std::string, std::string> strong_target_of; // team -> player
    std::map<std::string, std::string> weak_target_of;   // team -> player
    std::string truth_json() const;
};

SynthLeague generate(const SynthLeagueSpec& spec);

/// Ground-truth scoring probability the generator samples from; depends on
/// the shot geometry and set-piece type only.
double shot_goal_probability(double dist_m, double angle_rad,
                             const std::optional<SetPiece>& set_piece,
                             double penalty_conversion = 0.75);

// ---------------------------------------------------------------------------
// adversarial random streams (differential testing)
// ---------------------------------------------------------------------------

/// Schema-valid but structurally random match: random action kinds, teams,
/// set pieces, halves; strictly increasing indices; per-half non-decreasing
/// wall clock.
MatchEvents random_soup_match(std::uint64_t seed, int n_events, const std::string& match_id);

/// Deterministic pseudo-random xG in [0.02, 0.9] keyed by event identity;
/// lets PV differential tests run without any trained model.
double hashed_xg(const std::string& match_id, std::int64_t event_index);
XgTable hashed_xg_table(const PossessionView& view);

// ---------------------------------------------------------------------------
// independent oracles
// ---------------------------------------------------------------------------

/// Possession index per event, recomputed from the definition (half starts
/// plus team-changing control boundaries) without the production
/// state machine.
std::vector<int> oracle_segment_possessions(const std::vector<Event>& events);

/// Naive nested-loop evaluation of the possession-value formulas for a
/// control action.
double oracle_pv(const PossessionView& view, std::span<const double> xg, const PvConfig& config,
                 std::size_t i);

/// Full labeling via oracle_pv plus an independent duel chain scan.
std::vector<LabeledAction> oracle_label(const PossessionView& view, std::span<const double> xg,
                                        const PvConfig& config);

/// Literal transcription of the published Glicko-2 step sequence
/// (advantage-free). Matchup advantages must be zero.
GlickoState oracle_glicko(const GlickoState& state, std::span<const GlickoMatchup> matchups,
                          const GlickoConfig& config = {});

// ---------------------------------------------------------------------------
// targeted generators
// ---------------------------------------------------------------------------

/// Context model stub that predicts exactly 0.5 everywhere.
Model neutral_context_model();

struct TwoTierDuelSpec {
    int players_per_tier = 20;
    int rounds = 50;
    double cross_tier_win_prob = 0.75;  // strong beats weak
    DuelKind kind = DuelKind::aerial;
    std::uint64_t seed = 11;
};

struct DuelPopulation {
    std::vector<DuelOutcomeRecord> records;
    std::map<std::string, PositionGroup> positions;
    std::map<std::string, MatchMeta> match_meta;
    std::set<std::string> strong;
    std::set<std::string> weak;
};

DuelPopulation generate_two_tier_duels(const TwoTierDuelSpec& spec);

/// Equal-skill duels whose defender wins with fixed probability p; contexts
/// are randomized but carry no outcome signal.
DuelPopulation generate_context_duels(int n, double p_defender, std::uint64_t seed);

/// Two-tier club population over round-robin seasons.
std::vector<MatchResult> generate_two_tier_results(int clubs_per_tier, int n_seasons,
                                                   double strong_win_prob, std::uint64_t seed);

// ---------------------------------------------------------------------------
// forecast panel (season-aggregate level)
// ---------------------------------------------------------------------------

/// Planted persistence + league-shift panel: latent player quality persists,
/// league membership shifts PCR additively, minutes and departures follow an
/// age/minutes rule.
struct SynthPanelSpec {
    int n_leagues = 3;
    int teams_per_league = 10;
    int players_per_team = 22;
    int n_seasons = 5;
    int first_season_year = 2019;
    std::uint64_t seed = 7;
    double quality_mean = 0.15;
    double quality_sd = 0.06;
    double reversion = 0.75;       // pcr loads on (quality - mean) by this factor
    double season_noise_sd = 0.025;
    double league_shift = 0.05;    // additive PCR shift per league tier
    double transfer_rate = 0.30;
    int league_swaps_per_boundary = 3;  // team pairs swapping leagues
};

struct SynthPanel {
    std::vector<SeasonLine> lines;
    std::map<std::string, PlayerMeta> players;
    std::vector<MatchResult> results;
};

SynthPanel generate_forecast_panel(const SynthPanelSpec& spec);

}  // namespace epv::testkit
