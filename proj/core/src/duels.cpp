#include "epv/duels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epv/error.hpp"
#include "epv/possession.hpp"
#include "epv/xg.hpp"

namespace epv {

std::vector<DuelOutcomeRecord> resolve_duels(const PossessionView& view) {
    std::vector<DuelOutcomeRecord> out;
    const auto& evs = view.events;

    int cur_half = -1;
    std::optional<std::string> owner;  // team of the last control action in this half
    std::optional<std::size_t> last_control;

    for (std::size_t i = 0; i < evs.size(); ++i) {
        const Event& ev = evs[i].ev;
        if (ev.half != cur_half) {
            cur_half = ev.half;
            owner.reset();
            last_control.reset();
        }
        if (is_control(ev.action)) {
            owner = ev.team_id;
            last_control = i;
            continue;
        }
        if (!is_duel(ev.action)) continue;
        if (!ev.opponent_id) continue;  // both participants must be resolvable

        // Next control action in the half decides winner rule 3.
        std::optional<std::string> next_team;
        for (std::size_t k = i + 1; k < evs.size(); ++k) {
            if (evs[k].ev.half != ev.half) break;
            if (is_control(evs[k].ev.action)) {
                next_team = evs[k].ev.team_id;
                break;
            }
        }
        auto winner = duel_winner(ev, next_team);
        if (!winner) continue;
        if (*winner != ev.player_id && *winner != *ev.opponent_id) continue;  // malformed marker

        DuelOutcomeRecord rec;
        rec.match_id = ev.match_id;
        rec.event_index = ev.event_index;
        rec.kind = std::get<DuelKind>(ev.action);
        // The attacker is the participant on the team that possessed the
        // ball going into the duel; without a prior control action the
        // recorded participant is taken as the attacker.
        const bool recorded_attacks = !owner || *owner == ev.team_id;
        rec.attacker = recorded_attacks ? ev.player_id : *ev.opponent_id;
        rec.defender = recorded_attacks ? *ev.opponent_id : ev.player_id;
        rec.recorded_is_defender = !recorded_attacks;
        rec.winner = *winner;
        rec.loser = *winner == ev.player_id ? *ev.opponent_id : ev.player_id;

        rec.context.duel_x = ev.x;
        rec.context.duel_y = ev.y;
        if (last_control) {
            const Event& pass = evs[*last_control].ev;
            rec.context.pass_x = pass.x;
            rec.context.pass_y = pass.y;
            rec.context.has_pass = true;
            rec.context.pass_set_piece = pass.set_piece;
        }
        rec.context.n_opponents_nearby = 0;  // not observable from event data
        rec.context.defending_side = true;
        out.push_back(std::move(rec));
    }
    return out;
}

const std::vector<std::string>& duel_context_feature_names() {
    static const std::vector<std::string> names = {
        "duel_x", "duel_y", "pass_x", "pass_y", "has_pass",
        "pass_sp_penalty", "pass_sp_free_kick", "pass_sp_corner",
        "pass_sp_goal_kick", "pass_sp_throw_in", "pass_sp_kickoff",
        "n_opponents_nearby",
    };
    return names;
}

std::vector<double> duel_context_feature_vector(const DuelContext& ctx) {
    std::vector<double> v = {ctx.duel_x,
                             ctx.duel_y,
                             ctx.has_pass ? ctx.pass_x : -1.0,
                             ctx.has_pass ? ctx.pass_y : -1.0,
                             ctx.has_pass ? 1.0 : 0.0,
                             0, 0, 0, 0, 0, 0,
                             static_cast<double>(ctx.n_opponents_nearby)};
    if (ctx.pass_set_piece) {
        v[5 + static_cast<std::size_t>(*ctx.pass_set_piece)] = 1.0;
    }
    return v;
}

Model train_context_model(const std::vector<DuelOutcomeRecord>& records,
                          const std::map<std::string, PositionGroup>& positions,
                          const GbtConfig& config) {
    audit_feature_names(duel_context_feature_names());

    std::vector<TrainingRow> rows;
    for (const auto& rec : records) {
        auto pa = positions.find(rec.attacker);
        auto pd = positions.find(rec.defender);
        // Mixed-position duels leak positional skill into the context model;
        // only same-group pairs train it.
        if (pa == positions.end() || pd == positions.end()) continue;
        if (pa->second != pd->second) continue;
        TrainingRow row;
        row.features = duel_context_feature_vector(rec.context);
        row.target = rec.winner == rec.defender ? 1.0 : 0.0;
        row.player_id = rec.defender;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ValidationError("train_context_model: no same-position duels in input");
    }
    bool has0 = false, has1 = false;
    for (const auto& r : rows) (r.target == 1.0 ? has1 : has0) = true;
    if (!has0 || !has1) {
        throw ValidationError("train_context_model: outcomes are single-class");
    }
    assign_per_player_weights(rows);
    return train_gbt(rows, Objective::weighted_logloss(), config, duel_context_feature_names());
}

double advantage_of(double context_probability) {
    if (!(context_probability > 0.0 && context_probability < 1.0)) {
        throw std::domain_error("advantage_of: probability must lie strictly inside (0, 1)");
    }
    return std::log(context_probability / (1.0 - context_probability));
}

double advantage_of(const Model& context_model, const DuelContext& context) {
    return advantage_of(context_model.predict(duel_context_feature_vector(context)));
}

GlickoState RatingPipelineResult::state_of(DuelKind kind, const std::string& player) const {
    auto kit = states.find(kind);
    if (kit != states.end()) {
        auto pit = kit->second.find(player);
        if (pit != kit->second.end()) return pit->second;
    }
    return GlickoState{};
}

RatingPipelineResult run_rating_pipeline(const std::vector<DuelOutcomeRecord>& records,
                                         const std::map<std::string, MatchMeta>& match_meta,
                                         const std::map<DuelKind, Model>& context_models,
                                         const RatingPipelineConfig& config) {
    // Rating periods: (season, round) when metadata exists, otherwise one
    // period per match in first-appearance order.
    struct PeriodKey {
        std::string season;
        int round;
        bool operator<(const PeriodKey& o) const {
            return season != o.season ? season < o.season : round < o.round;
        }
    };
    std::map<std::string, PeriodKey> match_period;
    if (!match_meta.empty()) {
        for (const auto& rec : records) {
            auto it = match_meta.find(rec.match_id);
            if (it == match_meta.end()) {
                throw ValidationError("run_rating_pipeline: no match metadata for " + rec.match_id);
            }
            match_period[rec.match_id] = {it->second.season_id, it->second.round};
        }
    } else {
        int next = 0;
        for (const auto& rec : records) {
            if (match_period.emplace(rec.match_id, PeriodKey{"", next}).second) ++next;
        }
    }

    std::map<PeriodKey, std::vector<const DuelOutcomeRecord*>> periods;
    for (const auto& rec : records) {
        periods[match_period[rec.match_id]].push_back(&rec);
    }

    // Optional strict-reading mode: one mean advantage per duel kind.
    std::map<DuelKind, double> mean_advantage;
    if (config.advantage_mode == AdvantageMode::global_mean) {
        std::map<DuelKind, std::pair<double, std::int64_t>> acc;
        for (const auto& rec : records) {
            auto mit = context_models.find(rec.kind);
            if (mit == context_models.end()) continue;
            auto& a = acc[rec.kind];
            a.first += advantage_of(mit->second, rec.context);
            a.second += 1;
        }
        for (const auto& [kind, a] : acc) {
            mean_advantage[kind] = a.second ? a.first / static_cast<double>(a.second) : 0.0;
        }
    }

    RatingPipelineResult result;
    auto& states = result.states;

    std::optional<std::string> cur_season;
    for (const auto& [key, recs] : periods) {
        if (cur_season && *cur_season != key.season) {
            result.season_end_states[*cur_season] = states;
        }
        cur_season = key.season;
        // Collect matchups against pre-period states.
        std::map<DuelKind, std::map<std::string, std::vector<GlickoMatchup>>> matchups;
        for (const DuelOutcomeRecord* rec : recs) {
            auto mit = context_models.find(rec->kind);
            if (mit == context_models.end()) {
                throw ValidationError("run_rating_pipeline: missing context model for duel kind");
            }
            const double p_context = mit->second.predict(duel_context_feature_vector(rec->context));
            const double adv = config.advantage_mode == AdvantageMode::per_duel
                                   ? advantage_of(p_context)
                                   : mean_advantage[rec->kind];

            const GlickoState att = result.state_of(rec->kind, rec->attacker);
            const GlickoState def = result.state_of(rec->kind, rec->defender);
            const double def_score = rec->winner == rec->defender ? 1.0 : 0.0;

            matchups[rec->kind][rec->defender].push_back(
                {att.mu, att.phi, def_score, adv});
            matchups[rec->kind][rec->attacker].push_back(
                {def.mu, def.phi, 1.0 - def_score, -adv});

            DuelRatingSnapshot snap;
            const bool own_is_def = rec->recorded_is_defender;
            snap.own = own_is_def ? def : att;
            snap.opponent = own_is_def ? att : def;
            snap.p_context = p_context;
            snap.advantage = adv;
            snap.p_win_own = glicko_e(snap.own.mu + (own_is_def ? adv : -adv),
                                      snap.opponent.mu, snap.opponent.phi);
            result.snapshots[{rec->match_id, rec->event_index}] = snap;

            auto bump = [&](const std::string& player, bool won) {
                auto& dw = result.duel_wins[rec->kind][player];
                dw.first += 1;
                if (won) dw.second += 1;
            };
            bump(rec->attacker, rec->winner == rec->attacker);
            bump(rec->defender, rec->winner == rec->defender);
        }

        // Apply the period: players with games get the full step, everyone
        // else already tracked gets the idle step.
        for (auto& [kind, per_player] : states) {
            for (auto& [player, st] : per_player) {
                auto kit = matchups.find(kind);
                const bool has_games =
                    kit != matchups.end() && kit->second.find(player) != kit->second.end();
                if (!has_games) st = glicko_update(st, {}, config.glicko);
            }
        }
        for (const auto& [kind, per_player] : matchups) {
            for (const auto& [player, games] : per_player) {
                GlickoState pre = result.state_of(kind, player);
                states[kind][player] = glicko_update(pre, games, config.glicko);
            }
        }
    }
    if (cur_season) result.season_end_states[*cur_season] = states;
    return result;
}

double win_probability(const GlickoState& a, const GlickoState& b, double context_p_defender,
                       bool a_is_defending) {
    const double adv = advantage_of(context_p_defender);
    return glicko_e(a.mu + (a_is_defending ? adv : -adv), b.mu, b.phi);
}

double win_probability(const GlickoState& a, const GlickoState& b, const DuelContext& context,
                       const Model& context_model) {
    const double p = context_model.predict(duel_context_feature_vector(context));
    return win_probability(a, b, p, context.defending_side);
}

std::vector<RatingTableRow> rating_table(const RatingPipelineResult& result, DuelKind kind,
                                         const std::map<std::string, PositionGroup>& positions) {
    std::vector<RatingTableRow> rows;
    auto sit = result.states.find(kind);
    if (sit == result.states.end()) return rows;
    auto wit = result.duel_wins.find(kind);
    for (const auto& [player, st] : sit->second) {
        RatingTableRow row;
        row.player_id = player;
        auto pit = positions.find(player);
        row.position = pit == positions.end() ? "unknown" : position_name(pit->second);
        row.rating = glicko_display(st.mu);
        if (wit != result.duel_wins.end()) {
            auto dw = wit->second.find(player);
            if (dw != wit->second.end()) {
                row.duels = dw->second.first;
                row.win_pct = dw->second.first
                                  ? 100.0 * static_cast<double>(dw->second.second) /
                                        static_cast<double>(dw->second.first)
                                  : 0.0;
            }
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const RatingTableRow& a, const RatingTableRow& b) {
        if (a.rating != b.rating) return a.rating > b.rating;
        if (a.duels != b.duels) return a.duels > b.duels;
        return a.player_id < b.player_id;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
    return rows;
}

}  // namespace epv
