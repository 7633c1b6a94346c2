#pragma once

#include <map>
#include <string>
#include <vector>

#include "epv/duels.hpp"
#include "epv/epv_models.hpp"
#include "epv/events.hpp"
#include "epv/rewards.hpp"

namespace epv {

/// Per-player-season aggregate feeding the ranking and forecast layers.
struct SeasonLine {
    std::string player_id;
    std::string season_id;
    std::string team_id;
    std::string competition_id;
    double sum_pcr_delta = 0.0;     // rewards over pass/carry/dribble events
    double effective_minutes = 0.0;
    double pcr = 0.0;
    // duel stats per kind
    std::int64_t duels_aerial = 0, duel_wins_aerial = 0;
    std::int64_t duels_ground = 0, duel_wins_ground = 0;
    // raw season stats used by the forecast feature registry
    double xg_sum = 0.0;
    std::int64_t goals = 0;
    std::int64_t shots = 0;
    std::int64_t passes = 0;
    std::int64_t carries = 0;
    std::int64_t matches = 0;
    double team_xg_on_pitch = 0.0;  // team xG total over the matches played
};

/// Pass Carry Reward: reward per 60 effective minutes.
/// Throws std::domain_error when minutes <= 0.
double pcr(double reward_sum, double minutes);

/// Join rewards, xG, duel outcomes and schedule metadata into one line per
/// (player, season). Views are the unfiltered annotated views, aligned with
/// xg_tables.
std::vector<SeasonLine> aggregate_season_lines(
    const std::vector<PossessionView>& views, const std::vector<XgTable>& xg_tables,
    const std::vector<RewardRecord>& rewards, const std::vector<DuelOutcomeRecord>& duel_records,
    const std::map<std::string, MatchMeta>& match_meta);

struct RankingRow {
    int rank = 0;
    std::string player;
    std::string team;
    std::string competition;
    std::string season;
    double pcr = 0.0;
    double eff_time = 0.0;  // minutes
};

/// Filter to minutes >= min_minutes; sort by PCR desc, ties by minutes desc
/// then player id. `names` maps player ids to display names (optional).
std::vector<RankingRow> season_rankings(const std::vector<SeasonLine>& lines,
                                        double min_minutes = 1000.0,
                                        const std::map<std::string, std::string>& names = {});

struct DuelReportRow {
    std::string player;  // target of the long pass
    std::string duel;    // "aerial" | "ground"
    std::int64_t duels = 0;
    double saved_pct = 0.0;     // possessions retained after the duel
    double apriori_pct = 0.0;   // context-model win probability (target side)
    double win_duel_pct = 0.0;  // rating-aware win probability (target side)
    double rating = kGlickoBase;
    double opp_rating = kGlickoBase;
    double duel_epv = 0.0;      // average-player model
    double epv_ind_duel = 0.0;  // individual model
};

/// Long forward passes by one player into duels, aggregated per target and
/// duel kind. A qualifying pass covers more than min_distance meters with a
/// forward gain above min_forward_gain (attack-direction coordinates).
std::vector<DuelReportRow> long_pass_duel_report(
    const std::vector<PossessionView>& filtered_views, const std::string& passer,
    const EpvModelSet& models, const SnapshotMap& snapshots, double min_distance = 40.0,
    double min_forward_gain = 10.0, const std::map<std::string, std::string>& names = {});

}  // namespace epv
