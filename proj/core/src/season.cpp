#include "epv/season.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epv/error.hpp"
#include "epv/geometry.hpp"
#include "epv/possession.hpp"

namespace epv {

double pcr(double reward_sum, double minutes) {
    if (!(minutes > 0.0)) throw std::domain_error("pcr: minutes must be positive");
    return 60.0 * reward_sum / minutes;
}

namespace {

bool counts_for_pcr(const Event& ev) {
    if (!is_control(ev.action) || ev.set_piece) return false;
    switch (std::get<ControlKind>(ev.action)) {
        case ControlKind::pass:
        case ControlKind::carry:
        case ControlKind::dribble:
            return true;
        default:
            return false;
    }
}

std::string season_of(const std::map<std::string, MatchMeta>& meta, const std::string& match_id) {
    auto it = meta.find(match_id);
    if (it == meta.end()) {
        throw ValidationError("season aggregation: no match metadata for " + match_id);
    }
    return it->second.season_id;
}

}  // namespace

std::vector<SeasonLine> aggregate_season_lines(
    const std::vector<PossessionView>& views, const std::vector<XgTable>& xg_tables,
    const std::vector<RewardRecord>& rewards, const std::vector<DuelOutcomeRecord>& duel_records,
    const std::map<std::string, MatchMeta>& match_meta) {
    if (views.size() != xg_tables.size()) {
        throw ValidationError("season aggregation: views and xg tables are misaligned");
    }

    std::map<std::pair<std::string, std::string>, SeasonLine> lines;  // (player, season)
    auto line_of = [&](const std::string& player, const std::string& season) -> SeasonLine& {
        auto& l = lines[{player, season}];
        if (l.player_id.empty()) {
            l.player_id = player;
            l.season_id = season;
        }
        return l;
    };

    // Per-match stats, minutes and appearances.
    for (std::size_t m = 0; m < views.size(); ++m) {
        const auto& view = views[m];
        if (view.events.empty()) continue;
        const std::string season = season_of(match_meta, view.match_id);
        const std::string league = match_meta.at(view.match_id).league_id;
        const double minutes = match_effective_seconds(view) / 60.0;

        std::map<std::string, bool> appeared;
        std::map<std::string, double> team_xg;
        for (std::size_t i = 0; i < view.events.size(); ++i) {
            const Event& ev = view.events[i].ev;
            appeared[ev.player_id] = true;
            if (ev.opponent_id) appeared[*ev.opponent_id] = true;
            auto& l = line_of(ev.player_id, season);
            if (l.team_id.empty()) l.team_id = ev.team_id;
            if (l.competition_id.empty()) l.competition_id = league;
            if (is_shot(ev.action)) {
                l.shots += 1;
                if (ev.is_goal) l.goals += 1;
                const double g = xg_tables[m][i];
                if (!std::isnan(g)) {
                    l.xg_sum += g;
                    team_xg[ev.team_id] += g;
                }
            } else if (is_control(ev.action)) {
                const auto kind = std::get<ControlKind>(ev.action);
                if (kind == ControlKind::pass) l.passes += 1;
                if (kind == ControlKind::carry || kind == ControlKind::dribble) l.carries += 1;
            }
        }
        for (const auto& [player, _] : appeared) {
            auto& l = line_of(player, season);
            l.matches += 1;
            l.effective_minutes += minutes;
            auto t = team_xg.find(l.team_id);
            if (t != team_xg.end()) l.team_xg_on_pitch += t->second;
        }
    }

    // Reward sums restricted to pass/carry events.
    std::map<std::string, const PossessionView*> view_by_match;
    std::map<std::pair<std::string, std::int64_t>, const Event*> event_by_key;
    for (const auto& view : views) {
        view_by_match[view.match_id] = &view;
        for (const auto& ae : view.events) {
            event_by_key[{ae.ev.match_id, ae.ev.event_index}] = &ae.ev;
        }
    }
    for (const auto& rec : rewards) {
        auto it = event_by_key.find({rec.match_id, rec.event_index});
        if (it == event_by_key.end()) {
            throw ValidationError("season aggregation: reward for unknown event");
        }
        if (!counts_for_pcr(*it->second)) continue;
        line_of(rec.player_id, season_of(match_meta, rec.match_id)).sum_pcr_delta += rec.delta_epv;
    }

    // Duel tallies.
    for (const auto& rec : duel_records) {
        const std::string season = season_of(match_meta, rec.match_id);
        for (const std::string* who : {&rec.attacker, &rec.defender}) {
            auto& l = line_of(*who, season);
            const bool won = rec.winner == *who;
            if (rec.kind == DuelKind::aerial) {
                l.duels_aerial += 1;
                if (won) l.duel_wins_aerial += 1;
            } else {
                l.duels_ground += 1;
                if (won) l.duel_wins_ground += 1;
            }
        }
    }

    std::vector<SeasonLine> out;
    out.reserve(lines.size());
    for (auto& [_, l] : lines) {
        l.pcr = l.effective_minutes > 0.0 ? pcr(l.sum_pcr_delta, l.effective_minutes) : 0.0;
        out.push_back(std::move(l));
    }
    return out;
}

std::vector<RankingRow> season_rankings(const std::vector<SeasonLine>& lines, double min_minutes,
                                        const std::map<std::string, std::string>& names) {
    std::vector<RankingRow> rows;
    for (const auto& l : lines) {
        if (l.effective_minutes < min_minutes) continue;
        RankingRow r;
        auto n = names.find(l.player_id);
        r.player = n == names.end() ? l.player_id : n->second;
        r.team = l.team_id;
        r.competition = l.competition_id;
        r.season = l.season_id;
        r.pcr = l.pcr;
        r.eff_time = l.effective_minutes;
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        if (a.pcr != b.pcr) return a.pcr > b.pcr;
        if (a.eff_time != b.eff_time) return a.eff_time > b.eff_time;
        return a.player < b.player;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
    return rows;
}

namespace {

bool pass_like(const Event& ev) {
    if (!is_control(ev.action)) return false;
    switch (std::get<ControlKind>(ev.action)) {
        case ControlKind::pass:
        case ControlKind::free_kick:
        case ControlKind::goal_kick:
        case ControlKind::corner_kick:
        case ControlKind::throw_in:
            return true;
        default:
            return false;
    }
}

struct TargetAccum {
    std::int64_t duels = 0;
    std::int64_t saved = 0;
    double apriori = 0.0;
    double win_duel = 0.0;
    double rating = 0.0;
    double opp_rating = 0.0;
    double duel_epv = 0.0;
    double epv_ind = 0.0;
};

}  // namespace

std::vector<DuelReportRow> long_pass_duel_report(
    const std::vector<PossessionView>& filtered_views, const std::string& passer,
    const EpvModelSet& models, const SnapshotMap& snapshots, double min_distance,
    double min_forward_gain, const std::map<std::string, std::string>& names) {
    std::map<std::pair<std::string, DuelKind>, TargetAccum> acc;

    for (const auto& view : filtered_views) {
        const auto& evs = view.events;
        for (std::size_t i = 0; i + 1 < evs.size(); ++i) {
            const Event& ev = evs[i].ev;
            if (ev.player_id != passer || !pass_like(ev)) continue;
            if (!ev.end_x || !ev.end_y) continue;
            const double dist = planar_distance(ev.x, ev.y, *ev.end_x, *ev.end_y);
            const double gain = *ev.end_x - ev.x;  // attack-direction coordinates
            if (!(dist > min_distance && gain > min_forward_gain)) continue;
            const Event& duel = evs[i + 1].ev;
            if (duel.half != ev.half || !is_duel(duel.action)) continue;

            // Target = participant on the passer's team. The passer's team
            // possesses going into the duel, so the target attacks and the
            // opponent defends.
            std::string target, opponent;
            if (duel.team_id == ev.team_id) {
                if (!duel.opponent_id) continue;
                target = duel.player_id;
                opponent = *duel.opponent_id;
            } else {
                if (!duel.opponent_id) continue;
                target = *duel.opponent_id;
                opponent = duel.player_id;
            }

            auto& a = acc[{target, std::get<DuelKind>(duel.action)}];
            a.duels += 1;

            bool saved = false;
            for (std::size_t k = i + 2; k < evs.size(); ++k) {
                if (evs[k].ev.half != ev.half) break;
                if (is_control(evs[k].ev.action)) {
                    saved = evs[k].ev.team_id == ev.team_id;
                    break;
                }
            }
            if (saved) a.saved += 1;

            double p_context = 0.5, p_win_target = 0.5;
            double target_rating = kGlickoBase, opp_rating = kGlickoBase;
            auto sit = snapshots.find({duel.match_id, duel.event_index});
            if (sit != snapshots.end()) {
                const auto& snap = sit->second;
                const bool target_recorded = target == duel.player_id;
                p_context = 1.0 - snap.p_context;  // target attacks; p_context is defender-side
                p_win_target = target_recorded ? snap.p_win_own : 1.0 - snap.p_win_own;
                target_rating = glicko_display(target_recorded ? snap.own.mu : snap.opponent.mu);
                opp_rating = glicko_display(target_recorded ? snap.opponent.mu : snap.own.mu);
            }
            a.apriori += p_context;
            a.win_duel += p_win_target;
            a.rating += target_rating;
            a.opp_rating += opp_rating;
            a.duel_epv += epv_duel_avg(models, view, i + 1, snapshots, ev.team_id);
            a.epv_ind += epv_duel_ind(models, view, i + 1, snapshots, ev.team_id);
        }
    }

    std::vector<DuelReportRow> rows;
    for (const auto& [key, a] : acc) {
        DuelReportRow r;
        auto n = names.find(key.first);
        r.player = n == names.end() ? key.first : n->second;
        r.duel = key.second == DuelKind::aerial ? "aerial" : "ground";
        r.duels = a.duels;
        const double cnt = static_cast<double>(a.duels);
        r.saved_pct = 100.0 * static_cast<double>(a.saved) / cnt;
        r.apriori_pct = 100.0 * a.apriori / cnt;
        r.win_duel_pct = 100.0 * a.win_duel / cnt;
        r.rating = a.rating / cnt;
        r.opp_rating = a.opp_rating / cnt;
        r.duel_epv = a.duel_epv / cnt;
        r.epv_ind_duel = a.epv_ind / cnt;
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const DuelReportRow& a, const DuelReportRow& b) {
        if (a.player != b.player) return a.player < b.player;
        return a.duel < b.duel;
    });
    return rows;
}

}  // namespace epv
