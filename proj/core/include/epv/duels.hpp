#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epv/events.hpp"
#include "epv/glicko.hpp"
#include "epv/learners.hpp"

namespace epv {

/// Skill-free description of a duel situation. `defending_side` marks
/// whether the record's reference participant is in the defensive phase;
/// the context model always predicts P(defending side wins).
struct DuelContext {
    double duel_x = 0.0;
    double duel_y = 0.0;
    double pass_x = 0.0;
    double pass_y = 0.0;
    bool has_pass = false;
    std::optional<SetPiece> pass_set_piece;
    int n_opponents_nearby = 0;
    bool defending_side = true;
};

/// A resolved duel, oriented attacker vs defender. The contextual advantage
/// always belongs to the defender (the advantage holder).
struct DuelOutcomeRecord {
    std::string match_id;
    std::int64_t event_index = 0;
    DuelKind kind = DuelKind::aerial;
    std::string attacker;  // participant on the team possessing before the duel
    std::string defender;  // advantage holder
    std::string winner;
    std::string loser;
    bool recorded_is_defender = false;  // whether the event's player_id defends
    DuelContext context;                // defender perspective (defending_side = true)
};

/// Orientation plus winner resolution for every duel in an annotated view.
/// Duels whose winner cannot be resolved are skipped.
std::vector<DuelOutcomeRecord> resolve_duels(const PossessionView& view);

const std::vector<std::string>& duel_context_feature_names();
std::vector<double> duel_context_feature_vector(const DuelContext& ctx);

/// Train P(defender wins | context) on duels whose participants share a
/// position group, weighted by inverse defender frequency. Throws
/// ValidationError when the filtered set is empty or single-class.
Model train_context_model(const std::vector<DuelOutcomeRecord>& records,
                          const std::map<std::string, PositionGroup>& positions,
                          const GbtConfig& config = {});

/// Internal-scale advantage for the defender: logit of the context-model
/// probability. Throws std::domain_error when p is not strictly inside
/// (0, 1).
double advantage_of(double context_probability);
double advantage_of(const Model& context_model, const DuelContext& context);

enum class AdvantageMode { per_duel, global_mean };

/// Rating state of both participants as of the duel's rating period (before
/// that period's updates), plus the probabilities the EPV feature set needs.
/// `own` is the event's recorded participant, `opponent` the other one.
struct DuelRatingSnapshot {
    GlickoState own;
    GlickoState opponent;
    double p_context = 0.5;  // defender-win probability from the context model
    double p_win_own = 0.5;  // rating- and advantage-aware, event-player perspective
    double advantage = 0.0;  // defender advantage used in the update
};

struct RatingTableRow {
    int rank = 0;
    std::string player_id;
    std::string position;
    double rating = kGlickoBase;  // display scale
    std::int64_t duels = 0;
    double win_pct = 0.0;
};

struct RatingPipelineConfig {
    GlickoConfig glicko;
    AdvantageMode advantage_mode = AdvantageMode::per_duel;
};

struct RatingPipelineResult {
    std::map<DuelKind, std::map<std::string, GlickoState>> states;
    /// keyed by (match_id, event_index)
    std::map<std::pair<std::string, std::int64_t>, DuelRatingSnapshot> snapshots;
    /// per kind, per player: (duels, wins)
    std::map<DuelKind, std::map<std::string, std::pair<std::int64_t, std::int64_t>>> duel_wins;
    /// states frozen after each season's last rating period; usable as
    /// next-season-start features without lookahead
    std::map<std::string, std::map<DuelKind, std::map<std::string, GlickoState>>>
        season_end_states;

    GlickoState state_of(DuelKind kind, const std::string& player) const;
};

/// Chronological Glicko-2 replay: one rating period per (season, round),
/// both participants updated from pre-period states, defender advantage from
/// the per-kind context model. With an empty match_meta map every match is
/// its own period, in first-appearance order.
RatingPipelineResult run_rating_pipeline(
    const std::vector<DuelOutcomeRecord>& records,
    const std::map<std::string, MatchMeta>& match_meta,
    const std::map<DuelKind, Model>& context_models,
    const RatingPipelineConfig& config = {});

/// P(A wins) = E(mu_A + signed advantage, mu_B, phi_B); the advantage is the
/// context logit, oriented toward whichever side defends.
double win_probability(const GlickoState& a, const GlickoState& b, double context_p_defender,
                       bool a_is_defending);
double win_probability(const GlickoState& a, const GlickoState& b, const DuelContext& context,
                       const Model& context_model);

/// Rating table per duel kind: rating desc, ties by duel count desc then id.
std::vector<RatingTableRow> rating_table(const RatingPipelineResult& result, DuelKind kind,
                                         const std::map<std::string, PositionGroup>& positions);

}  // namespace epv
