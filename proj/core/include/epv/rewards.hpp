#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epv/epv_models.hpp"
#include "epv/events.hpp"

namespace epv {

/// The five possible follow-ups of a control action or duel.
enum class Scenario {
    same_team_control = 1,
    turnover = 2,
    goal = 3,
    half_end = 4,
    into_duel = 5,
};

std::string scenario_name(Scenario s);

struct RewardRecord {
    std::string match_id;
    std::int64_t event_index = 0;
    std::string player_id;
    Scenario scenario = Scenario::half_end;
    double delta_epv = 0.0;
    double effective_minute = 0.0;
    bool kickoff_missing = false;  // goal scenario with no restart in the half
};

/// Classify event i on a filtered view (controls and duels only).
/// Precedence: goal, then half end, then duel follow-up, then the team of
/// the next control action. Total on every valid index; a duel flagged as
/// goal-scoring raises ValidationError (the schema forbids it upstream).
Scenario classify_scenario(const PossessionView& filtered, std::size_t i);

/// Per-event credit per the five-scenario rules, using model predictions
/// clamped to [-1, 1]. Duels are judged against the skill-free average
/// model; the individual model only values the duel a pass leads into.
RewardRecord delta_epv_control(const EpvModelSet& models, const PossessionView& filtered,
                               std::size_t i, const SnapshotMap& snapshots);
RewardRecord delta_epv_duel(const EpvModelSet& models, const PossessionView& filtered,
                            std::size_t i, const SnapshotMap& snapshots);

std::vector<RewardRecord> compute_rewards(const EpvModelSet& models,
                                          const PossessionView& filtered,
                                          const SnapshotMap& snapshots);

}  // namespace epv
