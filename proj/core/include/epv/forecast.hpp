#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "epv/glicko.hpp"
#include "epv/learners.hpp"
#include "epv/season.hpp"

namespace epv {

struct MatchResult {
    std::string match_id;
    std::string season_id;
    int round = 0;
    std::string league_id;
    std::string home_team;
    std::string away_team;
    int home_goals = 0;
    int away_goals = 0;
};

/// Glicko-2 over match outcomes (win 1, draw 0.5), one rating period per
/// (season, round), with frozen season-start snapshots for feature use.
struct ClubRatingBook {
    std::vector<std::string> seasons;  // processing order
    /// states at the start of each season (before any of its matches)
    std::map<std::string, std::map<std::string, GlickoState>> season_start;
    std::map<std::string, GlickoState> final_states;
    /// per season: team -> league
    std::map<std::string, std::map<std::string, std::string>> team_league;

    /// Display rating at the start of `season`; falls back to the final
    /// states for a season after the last processed one, and to the default
    /// 1500 for unknown teams.
    double rating_at_start(const std::string& season, const std::string& team) const;
    /// League membership as of `season`, walking back through earlier
    /// seasons only (never forward, so truncating the future cannot change
    /// the answer). Upcoming-season memberships are public before a ball is
    /// kicked; register them explicitly when available.
    std::string league_of(const std::string& season, const std::string& team) const;
    std::vector<std::string> league_teams(const std::string& season, const std::string& league) const;
    bool knows_team(const std::string& team) const;
    void register_membership(const std::string& season,
                             const std::map<std::string, std::string>& memberships);
};

/// Throws ValidationError when results are not in chronological
/// (season, round) order.
ClubRatingBook rate_clubs(const std::vector<MatchResult>& results, const GlickoConfig& config = {});

/// Mean of the top-n club ratings. Throws ValidationError when fewer than n
/// ratings are supplied.
double league_strength(std::vector<double> club_ratings, int n);
double league_strength(const ClubRatingBook& book, const std::string& season,
                       const std::string& league, int n);

// ---------------------------------------------------------------------------
// feature registry
// ---------------------------------------------------------------------------

enum class FeatureGroup { player_specific, performance, team_contribution, league_style, strength };

/// Everything a feature function may look at. All members describe data
/// known at the start of the target (next) season.
struct FeatureContext {
    const PlayerMeta* meta = nullptr;
    /// history[0] is the feature season S, history[1] is S-1, ...
    std::vector<const SeasonLine*> history;
    int next_season_year = 0;
    double old_team_rating = kGlickoBase;
    double new_team_rating = kGlickoBase;
    double old_league_rating = kGlickoBase;
    double new_league_rating = kGlickoBase;
    double league_mean_pcr_prev = 0.0;
    double league_team_count = 0.0;
    double mean_opponent_rating = kGlickoBase;
    double aerial_rating = kGlickoBase;
    double ground_rating = kGlickoBase;
    bool changed_team = false;
    bool changed_league = false;
    double contract_months = 0.0;
    bool contract_known = false;
};

struct FeatureDef {
    std::string name;
    FeatureGroup group;
    /// True for features describing the destination team/league; the
    /// stay-probability model excludes these.
    bool uses_new_side;
    double (*fn)(const FeatureContext&);
};

const std::vector<FeatureDef>& forecast_feature_registry();
const std::vector<std::string>& forecast_feature_names();
/// Registry positions usable by the stay model (uses_new_side == false).
const std::vector<std::size_t>& stay_feature_indices();
const std::vector<std::string>& stay_feature_names();

struct ForecastRow {
    std::string player_id;
    std::string season_id;       // feature season S
    std::string next_season_id;  // target season
    std::string old_team, new_team, old_league, new_league;
    std::vector<double> features;  // full registry order
    double target = 0.0;           // next-season PCR (valid iff has_target)
    bool has_target = false;
    double prev_minutes = 0.0;
    double next_minutes = 0.0;
    bool next_season_observed = false;  // target season exists in the panel
    double delta_ratings = 0.0;  // (new league - old league) / 1500
    double pl = 0.0;             // probability of leaving the data, filled by models
};

struct ForecastConfig {
    int league_top_n = 10;
    std::map<std::string, int> league_top_n_override;
    double min_minutes_data = 100.0;
    GbtConfig stay_gbt;
    GbtConfig pcr_gbt;
};

/// Season panel plus rating book, indexed for feature building.
struct ForecastDataset {
    std::vector<std::string> seasons;  // ordered
    std::map<std::pair<std::string, std::string>, SeasonLine> lines;  // (player, season)
    std::map<std::string, PlayerMeta> players;
    ClubRatingBook clubs;
    std::map<std::pair<std::string, std::string>, double> mean_opponent_rating;  // (season, team)
    std::map<std::pair<std::string, std::string>, double> league_mean_pcr;       // (season, league)
    std::map<std::pair<std::string, std::string>, double> duel_rating_aerial;    // (player, season end)
    std::map<std::pair<std::string, std::string>, double> duel_rating_ground;
    ForecastConfig config;
};

ForecastDataset build_forecast_dataset(const std::vector<SeasonLine>& lines,
                                       const std::map<std::string, PlayerMeta>& players,
                                       const std::vector<MatchResult>& results,
                                       const ForecastConfig& config = {});

/// Build the registry feature vector for (player, season S), predicting
/// season S+1. `destination` overrides the next-season team (what-if mode);
/// otherwise the player's actual next-season team is used when known, else
/// the current one. Throws ValidationError when the player-season line is
/// missing.
ForecastRow build_features(const ForecastDataset& data, const std::string& player,
                           const std::string& season,
                           const std::optional<std::string>& destination = std::nullopt);

/// One row per (player, season) whose following season is observed and whose
/// own minutes pass the data threshold; the raw material for both models.
std::vector<ForecastRow> build_training_rows(const ForecastDataset& data);

struct ForecastModels {
    Model stay;
    Model pcr;
};

/// Classifier for "plays >= 100 minutes next season", trained without any
/// destination-side rating features. Throws ValidationError on single-class
/// labels.
Model train_stay_model(const std::vector<ForecastRow>& rows, const ForecastConfig& config = {});

/// Weighted-MSE regressor on rows with >= 100 minutes in both seasons.
Model train_pcr_model(const std::vector<ForecastRow>& rows, const ForecastConfig& config = {});

double predict_stay(const Model& stay_model, const ForecastRow& row);
double predict_pcr(const Model& pcr_model, const ForecastRow& row);

/// (rating(league_new) - rating(league_old)) / 1500.
double delta_ratings(double new_league_rating, double old_league_rating);

/// Presence-only shrinkage: pcr_pred * 0.8^(delta_ratings + pl).
double adjust_pcr(double pcr_pred, double delta_ratings_value, double pl);

struct ShortlistRow {
    int rank = 0;
    std::string player;
    std::string team;
    double age = 0.0;
    double pcr = 0.0;       // current-season actual
    double pcr_pred = 0.0;
    double pcr_adj = 0.0;
    double stay_proba = 0.0;
};

/// What-if projection of one player's move to destination_team.
ShortlistRow what_if_transfer(const ForecastDataset& data, const ForecastModels& models,
                              const std::string& player, const std::string& season,
                              const std::string& destination_team);

/// Ranked what-if table over every eligible player of the season.
std::vector<ShortlistRow> build_shortlist(const ForecastDataset& data,
                                          const ForecastModels& models, const std::string& season,
                                          const std::string& destination_team);

// ---------------------------------------------------------------------------
// evaluation harness
// ---------------------------------------------------------------------------

struct EvalInput {
    double actual = 0.0;
    double baseline = 0.0;  // previous-season PCR
    double model = 0.0;     // model prediction
    bool same_team = true;
    bool same_league = true;
    double prev_minutes = 0.0;
};

struct EvalGroupMetrics {
    std::string sample;
    std::size_t n_100 = 0;
    double rmse_100 = 0.0;
    double mae_100 = 0.0;
    std::size_t n_1000 = 0;
    double rmse_1000 = 0.0;
    double mae_1000 = 0.0;
};

struct EvalReport {
    std::vector<EvalGroupMetrics> baseline;
    std::vector<EvalGroupMetrics> model;
    std::vector<std::string> notes;  // omitted empty groups
};

/// Per-group RMSE/MAE for the naive previous-season baseline and the model,
/// over {all, same/new team x same/new league} x {>100 min, >1000 min}.
EvalReport evaluate(const std::vector<EvalInput>& rows);

/// Assemble evaluation inputs from consecutive-season pairs with >= 100
/// minutes on both sides, then score.
EvalReport evaluate_forecast(const ForecastDataset& data, const ForecastModels& models);

}  // namespace epv
