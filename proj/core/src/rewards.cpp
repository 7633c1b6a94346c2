#include "epv/rewards.hpp"

#include <optional>
#include <stdexcept>

#include "epv/error.hpp"

namespace epv {

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::same_team_control: return "same_team_control";
        case Scenario::turnover: return "turnover";
        case Scenario::goal: return "goal";
        case Scenario::half_end: return "half_end";
        case Scenario::into_duel: return "into_duel";
    }
    return "half_end";
}

Scenario classify_scenario(const PossessionView& filtered, std::size_t i) {
    const auto& evs = filtered.events;
    if (i >= evs.size()) throw std::invalid_argument("classify_scenario: bad index");
    const Event& ev = evs[i].ev;
    if (is_other(ev.action)) {
        throw std::invalid_argument("classify_scenario: view is not filtered");
    }
    if (ev.is_goal) {
        if (is_duel(ev.action)) {
            throw ValidationError("classify_scenario: duel flagged as goal-scoring");
        }
        return Scenario::goal;
    }
    const bool last_in_half = i + 1 >= evs.size() || evs[i + 1].ev.half != ev.half;
    if (last_in_half) return Scenario::half_end;
    const Event& next = evs[i + 1].ev;
    if (is_duel(next.action)) return Scenario::into_duel;
    return next.team_id == ev.team_id ? Scenario::same_team_control : Scenario::turnover;
}

namespace {

/// First control action strictly after i in the same half (the restart that
/// follows a goal, in well-formed data).
std::optional<std::size_t> next_control_in_half(const PossessionView& filtered, std::size_t i) {
    for (std::size_t k = i + 1; k < filtered.events.size(); ++k) {
        if (filtered.events[k].ev.half != filtered.events[i].ev.half) break;
        if (is_control(filtered.events[k].ev.action)) return k;
    }
    return std::nullopt;
}

}  // namespace

RewardRecord delta_epv_control(const EpvModelSet& models, const PossessionView& filtered,
                               std::size_t i, const SnapshotMap& snapshots) {
    const auto& ae = filtered.events.at(i);
    if (!is_control(ae.ev.action)) {
        throw std::invalid_argument("delta_epv_control: event is not a control action");
    }
    RewardRecord rec;
    rec.match_id = ae.ev.match_id;
    rec.event_index = ae.ev.event_index;
    rec.player_id = ae.ev.player_id;
    rec.effective_minute = ae.t / 60.0;
    rec.scenario = classify_scenario(filtered, i);

    const double own = epv_control(models, filtered, i);
    switch (rec.scenario) {
        case Scenario::same_team_control:
            rec.delta_epv = epv_control(models, filtered, i + 1) - own;
            break;
        case Scenario::turnover:
            rec.delta_epv = -epv_control(models, filtered, i + 1) - own;
            break;
        case Scenario::goal: {
            auto restart = next_control_in_half(filtered, i);
            double restart_epv = 0.0;
            if (restart) {
                restart_epv = epv_control(models, filtered, *restart);
            } else {
                rec.kickoff_missing = true;
            }
            rec.delta_epv = 1.0 - own - restart_epv;
            break;
        }
        case Scenario::half_end:
            rec.delta_epv = 0.0;
            break;
        case Scenario::into_duel:
            rec.delta_epv = epv_duel_ind(models, filtered, i + 1, snapshots, ae.ev.team_id) - own;
            break;
    }
    return rec;
}

RewardRecord delta_epv_duel(const EpvModelSet& models, const PossessionView& filtered,
                            std::size_t i, const SnapshotMap& snapshots) {
    const auto& ae = filtered.events.at(i);
    if (!is_duel(ae.ev.action)) {
        throw std::invalid_argument("delta_epv_duel: event is not a duel");
    }
    RewardRecord rec;
    rec.match_id = ae.ev.match_id;
    rec.event_index = ae.ev.event_index;
    rec.player_id = ae.ev.player_id;
    rec.effective_minute = ae.t / 60.0;
    rec.scenario = classify_scenario(filtered, i);

    // The baseline is always the average-player model, never the
    // individual one.
    const double baseline = epv_duel_avg(models, filtered, i, snapshots, ae.ev.team_id);
    switch (rec.scenario) {
        case Scenario::same_team_control:
            rec.delta_epv = epv_control(models, filtered, i + 1) - baseline;
            break;
        case Scenario::turnover:
            rec.delta_epv = -epv_control(models, filtered, i + 1) - baseline;
            break;
        case Scenario::goal:
            // unreachable: classify_scenario rejects goal-scoring duels
            throw ValidationError("delta_epv_duel: duel flagged as goal-scoring");
        case Scenario::half_end:
            rec.delta_epv = 0.0;
            break;
        case Scenario::into_duel:
            rec.delta_epv =
                epv_duel_ind(models, filtered, i + 1, snapshots, ae.ev.team_id) - baseline;
            break;
    }
    return rec;
}

std::vector<RewardRecord> compute_rewards(const EpvModelSet& models,
                                          const PossessionView& filtered,
                                          const SnapshotMap& snapshots) {
    std::vector<RewardRecord> out;
    out.reserve(filtered.events.size());
    for (std::size_t i = 0; i < filtered.events.size(); ++i) {
        if (is_control(filtered.events[i].ev.action)) {
            out.push_back(delta_epv_control(models, filtered, i, snapshots));
        } else if (is_duel(filtered.events[i].ev.action)) {
            out.push_back(delta_epv_duel(models, filtered, i, snapshots));
        }
    }
    return out;
}

}  // namespace epv
