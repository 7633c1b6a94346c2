#include "epv/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "epv/error.hpp"
#include "epv/geometry.hpp"
#include "epv/rng.hpp"

namespace epv::testkit {

using nlohmann::ordered_json;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

std::string pad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

PositionGroup slot_position(int slot) {
    if (slot == 0) return PositionGroup::goalkeeper;
    static const PositionGroup cycle[10] = {
        PositionGroup::central_def,     PositionGroup::central_def, PositionGroup::full_back,
        PositionGroup::full_back,       PositionGroup::midfielder,  PositionGroup::midfielder,
        PositionGroup::midfielder,      PositionGroup::central_forward,
        PositionGroup::wing,            PositionGroup::wing,
    };
    return cycle[(slot - 1) % 10];
}

/// circle-method round robin; returns rounds of (home idx, away idx)
std::vector<std::vector<std::pair<int, int>>> round_robin(int n_teams, bool double_leg) {
    std::vector<int> arr;
    for (int i = 1; i < n_teams; ++i) arr.push_back(i);
    std::vector<std::vector<std::pair<int, int>>> rounds;
    for (int r = 0; r < n_teams - 1; ++r) {
        std::vector<std::pair<int, int>> games;
        games.emplace_back(0, arr.back());
        for (int i = 0; i + 1 < static_cast<int>(arr.size()) - i; ++i) {
            games.emplace_back(arr[static_cast<std::size_t>(i)],
                               arr[arr.size() - 2 - static_cast<std::size_t>(i)]);
        }
        rounds.push_back(games);
        std::rotate(arr.begin(), arr.begin() + static_cast<std::ptrdiff_t>(arr.size()) - 1,
                    arr.end());
    }
    if (double_leg) {
        const std::size_t first_leg = rounds.size();
        for (std::size_t r = 0; r < first_leg; ++r) {
            auto games = rounds[r];
            for (auto& g : games) std::swap(g.first, g.second);
            rounds.push_back(games);
        }
    }
    return rounds;
}

}  // namespace

double shot_goal_probability(double dist_m, double angle_rad,
                             const std::optional<SetPiece>& set_piece,
                             double penalty_conversion) {
    if (set_piece == SetPiece::penalty) return penalty_conversion;
    double p = 1.15 * (angle_rad / 3.14159265358979323846) * std::exp(-dist_m / 16.0);
    if (set_piece == SetPiece::free_kick) p *= 0.45;
    return std::clamp(p, 0.01, 0.9);
}

// ---------------------------------------------------------------------------
// league generator
// ---------------------------------------------------------------------------

namespace {

struct League {
    const SynthLeagueSpec& spec;
    std::vector<std::string> teams;
    std::vector<std::vector<std::string>> squads;  // [team][slot]
    SynthLeague out;

    explicit League(const SynthLeagueSpec& s) : spec(s) {}

    const std::string& keeper(int t) const { return squads[static_cast<std::size_t>(t)][0]; }

    std::string random_outfielder(int t, Rng& rng) const {
        const auto& sq = squads[static_cast<std::size_t>(t)];
        return sq[static_cast<std::size_t>(rng.uniform_int(1, static_cast<int>(sq.size()) - 1))];
    }

    std::string random_defender(int t, Rng& rng) const {
        const auto& sq = squads[static_cast<std::size_t>(t)];
        // slots 1..2 are central defenders for squads of >= 3
        if (sq.size() >= 3) {
            return sq[static_cast<std::size_t>(rng.uniform_int(1, 2))];
        }
        return sq.back();
    }

    std::string forward_biased(int t, Rng& rng) const {
        const auto& sq = squads[static_cast<std::size_t>(t)];
        if (sq.size() >= 11 && rng.bernoulli(0.6)) {
            return sq[static_cast<std::size_t>(rng.uniform_int(8, 10))];  // CF / wings
        }
        return random_outfielder(t, rng);
    }
};

class MatchSim {
public:
    MatchSim(League& lg, Rng& rng, std::string match_id, int home, int away)
        : lg_(lg), rng_(rng), home_(home), away_(away) {
        events_.match_id = std::move(match_id);
    }

    MatchEvents run(int* home_goals, int* away_goals) {
        for (half_ = 1; half_ <= 2; ++half_) {
            wall_ = 0.0;
            const int kicking = half_ == 1 ? home_ : away_;
            emit_kickoff(kicking, /*dead_gap=*/false);
            int owner = kicking;
            const int chains = static_cast<int>(
                lg_.spec.possessions_per_half * rng_.uniform(0.85, 1.15));
            for (int c = 0; c < chains; ++c) owner = run_chain(owner);
        }
        *home_goals = goals_[0];
        *away_goals = goals_[1];
        return std::move(events_);
    }

private:
    League& lg_;
    Rng& rng_;
    int home_, away_;
    MatchEvents events_;
    std::int64_t idx_ = 0;
    int half_ = 1;
    double wall_ = 0.0;
    double bx_ = 52.5, by_ = 34.0;  // owner attack frame
    int goals_[2] = {0, 0};

    int opp(int team) const { return team == home_ ? away_ : home_; }
    int goal_slot(int team) const { return team == home_ ? 0 : 1; }
    const std::string& tid(int team) const { return lg_.teams[static_cast<std::size_t>(team)]; }

    Event base(int team, const std::string& player, ActionKind action, double x, double y) {
        Event ev;
        ev.match_id = events_.match_id;
        ev.event_index = idx_++;
        ev.wall_clock_s = wall_;
        ev.half = half_;
        ev.team_id = tid(team);
        ev.player_id = player;
        ev.action = action;
        ev.x = std::clamp(x, 0.0, kPitchLength);
        ev.y = std::clamp(y, 0.0, kPitchWidth);
        return ev;
    }

    void emit(Event ev) { events_.events.push_back(std::move(ev)); }

    void mirror_ball() {
        bx_ = kPitchLength - bx_;
        by_ = kPitchWidth - by_;
    }

    void emit_kickoff(int team, bool dead_gap) {
        if (dead_gap) wall_ += rng_.uniform(30.0, 60.0);
        auto ev = base(team, lg_.random_outfielder(team, rng_), ControlKind::pass, 52.5, 34.0);
        ev.set_piece = SetPiece::kickoff;
        emit(std::move(ev));
        bx_ = 50.0;
        by_ = 34.0;
    }

    /// Contested duel; returns the team owning the ball afterwards.
    int run_duel(int att_team, const std::string& attacker, const std::string& defender,
                 DuelKind kind, double x, double y) {
        const auto& skills =
            kind == DuelKind::aerial ? lg_.out.aerial_skill : lg_.out.ground_skill;
        const double edge = kind == DuelKind::aerial ? lg_.spec.defender_aerial_edge : 0.0;
        const double p_att = sigmoid(skills.at(attacker) - skills.at(defender) - edge);
        const bool att_wins = rng_.bernoulli(p_att);
        const std::string& winner = att_wins ? attacker : defender;

        auto ev = base(att_team, attacker, kind, x, y);
        ev.opponent_id = defender;
        bool marker = false;
        if (rng_.bernoulli(0.10)) {
            ev.foul_suffered_by = winner;
            marker = true;
        } else if (rng_.bernoulli(0.30)) {
            ev.first_touch_by = winner;
            marker = true;
        }
        emit(std::move(ev));
        wall_ += rng_.uniform(1.0, 3.0);

        int next = att_wins ? att_team : opp(att_team);
        // Without a marker the possession rule is the only way to resolve
        // the winner, so the ball must go to the winning side.
        if (marker && rng_.bernoulli(0.15)) next = opp(next);
        if (next != att_team) {
            bx_ = kPitchLength - x;
            by_ = kPitchWidth - y;
        } else {
            bx_ = x;
            by_ = y;
        }
        return next;
    }

    int keeper_launch(int owner) {
        bx_ = 10.0;
        by_ = 34.0;
        wall_ += rng_.uniform(3.0, 7.0);
        const double ex = 55.0 + rng_.uniform(0.0, 18.0);
        const double ey = rng_.uniform(20.0, 48.0);
        auto pass = base(owner, lg_.keeper(owner), ControlKind::pass, bx_, by_);
        pass.end_x = ex;
        pass.end_y = ey;
        pass.body_part = BodyPart::foot;
        emit(std::move(pass));
        wall_ += rng_.uniform(1.5, 3.5);

        const std::string& team = tid(owner);
        const std::string target = rng_.bernoulli(0.5) ? lg_.out.strong_target_of.at(team)
                                                       : lg_.out.weak_target_of.at(team);
        const DuelKind kind = rng_.bernoulli(0.85) ? DuelKind::aerial : DuelKind::ground;
        return run_duel(owner, target, lg_.random_defender(opp(owner), rng_), kind, ex, ey);
    }

    int finish_with_shot(int owner, bool from_corner) {
        const std::string shooter = lg_.forward_biased(owner, rng_);
        const double sx = std::clamp(std::max(bx_, rng_.uniform(78.0, 104.0)), 0.0, 104.5);
        const double sy = rng_.uniform(22.0, 46.0);
        const bool headed = from_corner ? rng_.bernoulli(0.6) : rng_.bernoulli(0.15);
        const double p = shot_goal_probability(distance_to_goal(sx, sy), goal_angle(sx, sy),
                                               std::nullopt, lg_.spec.penalty_conversion);
        const bool goal = rng_.bernoulli(p);
        auto shot = base(owner, shooter, ControlKind::shot, sx, sy);
        shot.body_part = headed ? BodyPart::head : BodyPart::foot;
        shot.is_goal = goal;
        emit(std::move(shot));

        if (goal) {
            goals_[goal_slot(owner)] += 1;
            emit_kickoff(opp(owner), /*dead_gap=*/true);
            return opp(owner);
        }
        wall_ += rng_.uniform(1.0, 2.0);
        if (rng_.bernoulli(lg_.spec.save_prob)) {
            auto save = base(opp(owner), lg_.keeper(opp(owner)), OtherKind::save, 3.0, 34.0);
            emit(std::move(save));
            wall_ += rng_.uniform(1.0, 2.0);
            if (rng_.bernoulli(lg_.spec.save_corner_prob)) {
                // corner keeps the attacking possession alive
                wall_ += rng_.uniform(20.0, 45.0);
                const double cy = rng_.bernoulli(0.5) ? 0.5 : 67.5;
                const double ex = rng_.uniform(88.0, 100.0);
                const double ey = rng_.uniform(26.0, 42.0);
                auto corner =
                    base(owner, lg_.random_outfielder(owner, rng_), ControlKind::corner_kick,
                         104.5, cy);
                corner.set_piece = SetPiece::corner;
                corner.end_x = ex;
                corner.end_y = ey;
                emit(std::move(corner));
                bx_ = ex;
                by_ = ey;
                if (rng_.bernoulli(0.6)) return finish_with_shot(owner, /*from_corner=*/true);
                return owner;
            }
        }
        // out of play; goal kick for the defending side
        wall_ += rng_.uniform(15.0, 35.0);
        auto gk = base(opp(owner), lg_.keeper(opp(owner)), ControlKind::goal_kick, 6.0, 34.0);
        gk.set_piece = SetPiece::goal_kick;
        emit(std::move(gk));
        bx_ = 12.0;
        by_ = 34.0;
        return opp(owner);
    }

    int run_chain(int owner) {
        if (bx_ < 35.0 && rng_.bernoulli(lg_.spec.long_pass_prob)) {
            return keeper_launch(owner);
        }

        int steps = 1;
        while (steps < 7 && rng_.bernoulli(0.65)) ++steps;
        for (int s = 0; s < steps; ++s) {
            wall_ += rng_.uniform(2.0, 7.0);
            const double u = rng_.uniform();
            ActionKind kind = ControlKind::pass;
            if (u > 0.60) kind = u > 0.85 ? ActionKind(ControlKind::dribble)
                                          : ActionKind(ControlKind::carry);
            const double nx = std::clamp(bx_ + rng_.uniform(-2.0, 12.0), 2.0, 103.0);
            const double ny = std::clamp(by_ + rng_.uniform(-8.0, 8.0), 2.0, 66.0);
            auto ev = base(owner, lg_.random_outfielder(owner, rng_), kind, bx_, by_);
            if (std::holds_alternative<ControlKind>(kind) &&
                std::get<ControlKind>(kind) == ControlKind::pass) {
                ev.end_x = nx;
                ev.end_y = ny;
                ev.outcome = Outcome::complete;
                ev.body_part = BodyPart::foot;
            }
            emit(std::move(ev));
            bx_ = nx;
            by_ = ny;
            if (rng_.bernoulli(lg_.spec.interception_prob)) {
                wall_ += rng_.uniform(1.0, 3.0);
                auto touch = base(opp(owner), lg_.random_outfielder(opp(owner), rng_),
                                  OtherKind::interception, kPitchLength - bx_, kPitchWidth - by_);
                emit(std::move(touch));
            }
        }

        const double strength_diff =
            lg_.out.team_strength.at(tid(owner)) - lg_.out.team_strength.at(tid(opp(owner)));
        const double shot_p =
            std::min(0.45, lg_.spec.shot_prob * (1.0 + 0.35 * std::tanh(strength_diff)));
        double u = rng_.uniform();
        if (u < shot_p) {
            if (bx_ > 62.0) return finish_with_shot(owner, /*from_corner=*/false);
            mirror_ball();
            return opp(owner);  // attack fizzles out deep in midfield
        }
        u -= shot_p;
        if (u < lg_.spec.penalty_prob) {
            // drawn penalty: long dead-ball pause, then the spot kick
            wall_ += rng_.uniform(25.0, 50.0);
            const std::string taker = lg_.forward_biased(owner, rng_);
            const bool goal = rng_.bernoulli(lg_.spec.penalty_conversion);
            auto pen = base(owner, taker, ControlKind::shot, 94.0, 34.0);
            pen.set_piece = SetPiece::penalty;
            pen.body_part = BodyPart::foot;
            pen.is_goal = goal;
            emit(std::move(pen));
            if (goal) {
                goals_[goal_slot(owner)] += 1;
                emit_kickoff(opp(owner), /*dead_gap=*/true);
            } else {
                wall_ += rng_.uniform(1.0, 2.0);
                emit(base(opp(owner), lg_.keeper(opp(owner)), OtherKind::save, 3.0, 34.0));
                bx_ = 8.0;
                by_ = 34.0;
            }
            return opp(owner);
        }
        u -= lg_.spec.penalty_prob;
        if (u < 0.015 && bx_ > 68.0) {
            // direct free kick on goal
            wall_ += rng_.uniform(20.0, 45.0);
            const double fx = std::clamp(bx_, 72.0, 92.0);
            const double fy = std::clamp(by_, 20.0, 48.0);
            const double p = shot_goal_probability(distance_to_goal(fx, fy), goal_angle(fx, fy),
                                                   SetPiece::free_kick, lg_.spec.penalty_conversion);
            const bool goal = rng_.bernoulli(p);
            auto fk = base(owner, lg_.forward_biased(owner, rng_), ControlKind::shot, fx, fy);
            fk.set_piece = SetPiece::free_kick;
            fk.body_part = BodyPart::foot;
            fk.is_goal = goal;
            emit(std::move(fk));
            if (goal) {
                goals_[goal_slot(owner)] += 1;
                emit_kickoff(opp(owner), /*dead_gap=*/true);
            } else {
                mirror_ball();
            }
            return opp(owner);
        }
        u -= 0.015;
        if (u < lg_.spec.duel_prob) {
            const DuelKind kind = rng_.bernoulli(0.3) ? DuelKind::aerial : DuelKind::ground;
            return run_duel(owner, lg_.random_outfielder(owner, rng_),
                            lg_.random_outfielder(opp(owner), rng_), kind, bx_, by_);
        }
        // plain turnover
        mirror_ball();
        return opp(owner);
    }
};

}  // namespace

SynthLeague generate(const SynthLeagueSpec& spec) {
    if (spec.n_teams < 2 || spec.n_teams % 2 != 0) {
        throw ValidationError("synth: n_teams must be even and >= 2");
    }
    if (spec.players_per_team < 4) {
        throw ValidationError("synth: players_per_team must be >= 4");
    }
    Rng rng(spec.seed);
    League lg(spec);

    int player_counter = 0;
    for (int t = 0; t < spec.n_teams; ++t) {
        const std::string team = "T" + pad(t + 1, 2);
        lg.teams.push_back(team);
        const double tier = t < spec.n_teams / 2 ? spec.team_strength_gap / 2.0
                                                 : -spec.team_strength_gap / 2.0;
        lg.out.team_strength[team] = tier + rng.normal(0.0, 0.1);

        std::vector<std::string> squad;
        for (int s = 0; s < spec.players_per_team; ++s) {
            const std::string pid = "P" + pad(player_counter++, 4);
            squad.push_back(pid);
            PlayerMeta meta;
            meta.player_id = pid;
            meta.name = pid;
            meta.position = slot_position(s);
            meta.birth_year = spec.first_season_year - static_cast<int>(rng.uniform_int(18, 34));
            meta.height_cm = 168.0 + rng.uniform(0.0, 28.0);
            if (rng.bernoulli(0.8)) {
                meta.contract_months = static_cast<int>(rng.uniform_int(3, 48));
            }
            lg.out.players.push_back(meta);

            const PositionGroup pos = meta.position;
            double aerial = rng.normal(-0.1, 0.3);
            if (pos == PositionGroup::central_def) aerial += 0.6;
            if (pos == PositionGroup::central_forward) aerial += 0.4;
            lg.out.aerial_skill[pid] = aerial;
            lg.out.ground_skill[pid] = rng.normal(0.0, 0.5);
            lg.out.pass_skill[pid] = rng.normal(0.0, 0.5);
        }
        lg.squads.push_back(squad);
        lg.out.keeper_of[team] = squad[0];
        const std::size_t strong_slot = squad.size() > 8 ? 8 : squad.size() - 2;
        const std::size_t weak_slot = squad.size() > 9 ? 9 : squad.size() - 1;
        lg.out.strong_target_of[team] = squad[strong_slot];
        lg.out.weak_target_of[team] = squad[weak_slot];
        lg.out.aerial_skill[squad[strong_slot]] = spec.duel_skill_gap;
        lg.out.aerial_skill[squad[weak_slot]] = -spec.duel_skill_gap;
        lg.out.ground_skill[squad[strong_slot]] = spec.duel_skill_gap * 0.75;
        lg.out.ground_skill[squad[weak_slot]] = -spec.duel_skill_gap * 0.75;
    }

    const auto schedule = round_robin(spec.n_teams, /*double_leg=*/true);
    const int rounds = spec.rounds_per_season > 0
                           ? spec.rounds_per_season
                           : static_cast<int>(schedule.size());

    // squad churn between seasons: replaced players leave the data, fresh
    // ones arrive; keeper and the planted targets never rotate out
    auto churn_squads = [&](Rng& churn_rng) {
        for (int t = 0; t < spec.n_teams; ++t) {
            auto& squad = lg.squads[static_cast<std::size_t>(t)];
            if (squad.size() < 6) continue;
            for (int c = 0; c < spec.squad_churn_per_season; ++c) {
                std::size_t slot;
                do {
                    slot = static_cast<std::size_t>(
                        churn_rng.uniform_int(1, static_cast<int>(squad.size()) - 1));
                } while (slot == 8 || slot == 9);
                const std::string pid = "P" + pad(player_counter++, 4);
                PlayerMeta meta;
                meta.player_id = pid;
                meta.name = pid;
                meta.position = slot_position(static_cast<int>(slot));
                meta.birth_year =
                    spec.first_season_year - static_cast<int>(churn_rng.uniform_int(18, 24));
                meta.height_cm = 168.0 + churn_rng.uniform(0.0, 28.0);
                if (churn_rng.bernoulli(0.8)) {
                    meta.contract_months = static_cast<int>(churn_rng.uniform_int(3, 48));
                }
                lg.out.players.push_back(meta);
                double aerial = churn_rng.normal(-0.1, 0.3);
                if (meta.position == PositionGroup::central_def) aerial += 0.6;
                if (meta.position == PositionGroup::central_forward) aerial += 0.4;
                lg.out.aerial_skill[pid] = aerial;
                lg.out.ground_skill[pid] = churn_rng.normal(0.0, 0.5);
                lg.out.pass_skill[pid] = churn_rng.normal(0.0, 0.5);
                squad[slot] = pid;
            }
        }
    };

    for (int season = 0; season < spec.n_seasons; ++season) {
        if (season > 0) churn_squads(rng);
        const std::string season_id = std::to_string(spec.first_season_year + season);
        for (int r = 0; r < rounds; ++r) {
            const auto& games = schedule[static_cast<std::size_t>(r) % schedule.size()];
            for (std::size_t g = 0; g < games.size(); ++g) {
                const std::string match_id =
                    "M" + season_id + "_" + pad(r + 1, 2) + "_" + pad(static_cast<int>(g), 2);
                const int home = games[g].first;
                const int away = games[g].second;
                MatchSim sim(lg, rng, match_id, home, away);
                int hg = 0, ag = 0;
                lg.out.matches.push_back(sim.run(&hg, &ag));

                MatchMeta meta;
                meta.match_id = match_id;
                meta.season_id = season_id;
                meta.round = r + 1;
                meta.league_id = spec.league_id;
                meta.home_team = lg.teams[static_cast<std::size_t>(home)];
                meta.away_team = lg.teams[static_cast<std::size_t>(away)];
                lg.out.match_meta.push_back(meta);

                MatchResult res;
                res.match_id = match_id;
                res.season_id = season_id;
                res.round = r + 1;
                res.league_id = spec.league_id;
                res.home_team = meta.home_team;
                res.away_team = meta.away_team;
                res.home_goals = hg;
                res.away_goals = ag;
                lg.out.results.push_back(res);
            }
        }
    }
    return std::move(lg.out);
}

std::string SynthLeague::truth_json() const {
    ordered_json j;
    j["team_strength"] = team_strength;
    j["pass_skill"] = pass_skill;
    j["aerial_skill"] = aerial_skill;
    j["ground_skill"] = ground_skill;
    j["keeper_of"] = keeper_of;
    j["strong_target_of"] = strong_target_of;
    j["weak_target_of"] = weak_target_of;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// spec file parsing
// ---------------------------------------------------------------------------

SynthLeagueSpec parse_league_spec(const std::string& text) {
    SynthLeagueSpec spec;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (blank) continue;
            throw ValidationError("spec line " + std::to_string(lineno) + ": expected key = value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "n_teams") spec.n_teams = std::stoi(val);
            else if (key == "players_per_team") spec.players_per_team = std::stoi(val);
            else if (key == "n_seasons") spec.n_seasons = std::stoi(val);
            else if (key == "rounds_per_season") spec.rounds_per_season = std::stoi(val);
            else if (key == "seed") spec.seed = std::stoull(val);
            else if (key == "first_season_year") spec.first_season_year = std::stoi(val);
            else if (key == "league_id") spec.league_id = val;
            else if (key == "possessions_per_half") spec.possessions_per_half = std::stod(val);
            else if (key == "shot_prob") spec.shot_prob = std::stod(val);
            else if (key == "duel_prob") spec.duel_prob = std::stod(val);
            else if (key == "interception_prob") spec.interception_prob = std::stod(val);
            else if (key == "save_prob") spec.save_prob = std::stod(val);
            else if (key == "save_corner_prob") spec.save_corner_prob = std::stod(val);
            else if (key == "penalty_prob") spec.penalty_prob = std::stod(val);
            else if (key == "penalty_conversion") spec.penalty_conversion = std::stod(val);
            else if (key == "defender_aerial_edge") spec.defender_aerial_edge = std::stod(val);
            else if (key == "duel_skill_gap") spec.duel_skill_gap = std::stod(val);
            else if (key == "long_pass_prob") spec.long_pass_prob = std::stod(val);
            else if (key == "team_strength_gap") spec.team_strength_gap = std::stod(val);
            else throw ValidationError("spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ValidationError("spec line " + std::to_string(lineno) + ": bad value '" + val + "'");
        }
    }
    return spec;
}

std::string league_spec_to_string(const SynthLeagueSpec& s) {
    std::ostringstream out;
    out << "n_teams = " << s.n_teams << "\n";
    out << "players_per_team = " << s.players_per_team << "\n";
    out << "n_seasons = " << s.n_seasons << "\n";
    out << "rounds_per_season = " << s.rounds_per_season << "\n";
    out << "seed = " << s.seed << "\n";
    out << "first_season_year = " << s.first_season_year << "\n";
    out << "league_id = " << s.league_id << "\n";
    out << "possessions_per_half = " << s.possessions_per_half << "\n";
    out << "shot_prob = " << s.shot_prob << "\n";
    out << "duel_prob = " << s.duel_prob << "\n";
    out << "interception_prob = " << s.interception_prob << "\n";
    out << "save_prob = " << s.save_prob << "\n";
    out << "save_corner_prob = " << s.save_corner_prob << "\n";
    out << "penalty_prob = " << s.penalty_prob << "\n";
    out << "penalty_conversion = " << s.penalty_conversion << "\n";
    out << "defender_aerial_edge = " << s.defender_aerial_edge << "\n";
    out << "duel_skill_gap = " << s.duel_skill_gap << "\n";
    out << "long_pass_prob = " << s.long_pass_prob << "\n";
    out << "team_strength_gap = " << s.team_strength_gap << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// adversarial random streams
// ---------------------------------------------------------------------------

MatchEvents random_soup_match(std::uint64_t seed, int n_events, const std::string& match_id) {
    Rng rng(seed);
    MatchEvents out;
    out.match_id = match_id;
    const int half_split = n_events / 2 + static_cast<int>(rng.uniform_int(-3, 3));
    double wall = 0.0;
    for (int i = 0; i < n_events; ++i) {
        Event ev;
        ev.match_id = match_id;
        ev.event_index = i;
        ev.half = i < half_split ? 1 : 2;
        if (i == half_split) wall = 0.0;
        wall += rng.uniform(0.0, 22.0);
        ev.wall_clock_s = wall;
        ev.team_id = rng.bernoulli(0.5) ? "A" : "B";
        ev.player_id = (ev.team_id == "A" ? "a" : "b") + std::to_string(rng.uniform_int(1, 9));
        ev.x = rng.uniform(0.0, kPitchLength);
        ev.y = rng.uniform(0.0, kPitchWidth);

        const double u = rng.uniform();
        if (u < 0.55) {
            static const ControlKind kinds[] = {
                ControlKind::pass,     ControlKind::pass,        ControlKind::shot,
                ControlKind::dribble,  ControlKind::carry,       ControlKind::free_kick,
                ControlKind::goal_kick, ControlKind::corner_kick, ControlKind::throw_in,
            };
            ev.action = kinds[rng.uniform_int(0, 8)];
            if (rng.bernoulli(0.18)) {
                static const SetPiece sps[] = {SetPiece::penalty,   SetPiece::free_kick,
                                               SetPiece::corner,    SetPiece::goal_kick,
                                               SetPiece::throw_in,  SetPiece::kickoff};
                ev.set_piece = sps[rng.uniform_int(0, 5)];
            }
            if (is_shot(ev.action)) ev.is_goal = rng.bernoulli(0.15);
            if (rng.bernoulli(0.5)) {
                ev.end_x = rng.uniform(0.0, kPitchLength);
                ev.end_y = rng.uniform(0.0, kPitchWidth);
            }
            if (rng.bernoulli(0.5)) {
                ev.body_part = rng.bernoulli(0.8) ? BodyPart::foot : BodyPart::head;
            }
        } else if (u < 0.72) {
            ev.action = rng.bernoulli(0.5) ? DuelKind::aerial : DuelKind::ground;
            const std::string opp_team = ev.team_id == "A" ? "b" : "a";
            if (rng.bernoulli(0.9)) {
                ev.opponent_id = opp_team + std::to_string(rng.uniform_int(1, 9));
            }
            if (rng.bernoulli(0.1)) {
                ev.foul_suffered_by = rng.bernoulli(0.5) ? ev.player_id : ev.opponent_id.value_or(ev.player_id);
            } else if (rng.bernoulli(0.25)) {
                ev.first_touch_by = rng.bernoulli(0.5) ? ev.player_id : ev.opponent_id.value_or(ev.player_id);
            }
        } else {
            static const OtherKind kinds[] = {OtherKind::interception, OtherKind::clearance_touch,
                                              OtherKind::save, OtherKind::block, OtherKind::other};
            ev.action = kinds[rng.uniform_int(0, 4)];
        }
        out.events.push_back(std::move(ev));
    }
    return out;
}

double hashed_xg(const std::string& match_id, std::int64_t event_index) {
    std::uint64_t h = fnv1a64(match_id);
    h = fnv1a64(&event_index, sizeof(event_index), h);
    const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
    return 0.02 + 0.88 * unit;
}

XgTable hashed_xg_table(const PossessionView& view) {
    XgTable xg(view.events.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < view.events.size(); ++i) {
        const auto& ev = view.events[i].ev;
        if (is_shot(ev.action)) xg[i] = hashed_xg(ev.match_id, ev.event_index);
    }
    return xg;
}

// ---------------------------------------------------------------------------
// oracles
// ---------------------------------------------------------------------------

std::vector<int> oracle_segment_possessions(const std::vector<Event>& events) {
    std::vector<int> idx(events.size(), 0);
    for (std::size_t k = 0; k < events.size(); ++k) {
        // halves that have started by event k
        int halves = 0;
        int seen_half = -1;
        for (std::size_t j = 0; j <= k; ++j) {
            if (events[j].half != seen_half) {
                seen_half = events[j].half;
                ++halves;
            }
        }
        // team changes between consecutive control actions of one half, for
        // controls at or before k
        int changes = 0;
        int cur_half = -1;
        const Event* prev_control = nullptr;
        for (std::size_t j = 0; j <= k; ++j) {
            if (events[j].half != cur_half) {
                cur_half = events[j].half;
                prev_control = nullptr;
            }
            if (!is_control(events[j].action)) continue;
            if (prev_control && prev_control->team_id != events[j].team_id) ++changes;
            prev_control = &events[j];
        }
        idx[k] = halves - 1 + changes;
    }
    return idx;
}

double oracle_pv(const PossessionView& view, std::span<const double> xg, const PvConfig& config,
                 std::size_t i) {
    const auto& ei = view.events.at(i);
    if (!is_control(ei.ev.action)) {
        throw std::invalid_argument("oracle_pv: not a control action");
    }
    const double gamma = config.variant == PvVariant::basic ? 1.0 : config.gamma;

    if (config.variant != PvVariant::risk) {
        double prod = 1.0;
        for (std::size_t j = 0; j < view.events.size(); ++j) {
            const auto& ej = view.events[j];
            if (!is_shot(ej.ev.action)) continue;
            if (!(ej.t >= ei.t)) continue;
            if (ej.possession != ei.possession) continue;
            prod = prod * (1.0 - std::pow(gamma, ej.t - ei.t) * xg[j]);
        }
        return 1.0 - prod;
    }

    double team = 1.0, opponent = 1.0;
    for (std::size_t j = 0; j < view.events.size(); ++j) {
        const auto& ej = view.events[j];
        if (!is_shot(ej.ev.action)) continue;
        if (ej.ev.half != ei.ev.half) continue;
        if (!(ej.t >= ei.t)) continue;
        if (ej.t - ei.t > config.horizon_s) continue;
        const double term = 1.0 - std::pow(gamma, ej.t - ei.t) * xg[j];
        if (ej.ev.team_id == ei.ev.team_id) team *= term;
        else opponent *= term;
    }
    return (1.0 - team) - (1.0 - opponent);
}

std::vector<LabeledAction> oracle_label(const PossessionView& view, std::span<const double> xg,
                                        const PvConfig& config) {
    std::vector<LabeledAction> out;
    for (std::size_t i = 0; i < view.events.size(); ++i) {
        const auto& ae = view.events[i];
        if (is_control(ae.ev.action)) {
            out.push_back({i, ae.ev.match_id, ae.ev.event_index, LabeledAction::Kind::control,
                           oracle_pv(view, xg, config, i), std::nullopt});
        } else if (is_duel(ae.ev.action)) {
            for (std::size_t k = i + 1; k < view.events.size(); ++k) {
                if (view.events[k].ev.half != ae.ev.half) break;
                if (!is_control(view.events[k].ev.action)) continue;
                const double value = oracle_pv(view, xg, config, k);
                const double sign = view.events[k].ev.team_id == ae.ev.team_id ? 1.0 : -1.0;
                out.push_back({i, ae.ev.match_id, ae.ev.event_index, LabeledAction::Kind::duel,
                               sign * value, std::nullopt});
                break;
            }
        }
    }
    return out;
}

GlickoState oracle_glicko(const GlickoState& state, std::span<const GlickoMatchup> matchups,
                          const GlickoConfig& config) {
    for (const auto& m : matchups) {
        if (m.advantage != 0.0) {
            throw std::invalid_argument("oracle_glicko: advantage-free reference only");
        }
    }
    // Step 1-2: the state is already on the internal scale.
    const double mu = state.mu;
    const double phi = state.phi;
    const double sigma = state.sigma;
    const double tau = config.tau;
    const double pi2 = 3.14159265358979323846 * 3.14159265358979323846;

    if (matchups.empty()) {
        // Step 6 note: deviation grows by the volatility when idle.
        GlickoState out = state;
        out.phi = std::sqrt(phi * phi + sigma * sigma);
        return out;
    }

    // Step 3: estimated variance v.
    double v_inv = 0.0;
    for (const auto& m : matchups) {
        const double g = 1.0 / std::sqrt(1.0 + 3.0 * m.opponent_phi * m.opponent_phi / pi2);
        const double e = 1.0 / (1.0 + std::exp(-g * (mu - m.opponent_mu)));
        v_inv += g * g * e * (1.0 - e);
    }
    const double v = 1.0 / v_inv;

    // Step 4: estimated improvement delta.
    double sum = 0.0;
    for (const auto& m : matchups) {
        const double g = 1.0 / std::sqrt(1.0 + 3.0 * m.opponent_phi * m.opponent_phi / pi2);
        const double e = 1.0 / (1.0 + std::exp(-g * (mu - m.opponent_mu)));
        sum += g * (m.score - e);
    }
    const double delta = v * sum;

    // Step 5: new volatility by the Illinois iteration.
    const double a = std::log(sigma * sigma);
    auto f = [&](double x) {
        const double ex = std::exp(x);
        return (ex * (delta * delta - phi * phi - v - ex)) /
                   (2.0 * (phi * phi + v + ex) * (phi * phi + v + ex)) -
               (x - a) / (tau * tau);
    };
    double A = a;
    double B;
    if (delta * delta > phi * phi + v) {
        B = std::log(delta * delta - phi * phi - v);
    } else {
        double k = 1.0;
        while (f(a - k * tau) < 0.0) k += 1.0;
        B = a - k * tau;
    }
    double fa = f(A), fb = f(B);
    while (std::abs(B - A) > config.volatility_tol) {
        const double C = A + (A - B) * fa / (fb - fa);
        const double fc = f(C);
        if (fc * fb < 0.0) {
            A = B;
            fa = fb;
        } else {
            fa = fa / 2.0;
        }
        B = C;
        fb = fc;
    }
    const double sigma_new = std::exp(A / 2.0);

    // Step 6: pre-period deviation.
    const double phi_star = std::sqrt(phi * phi + sigma_new * sigma_new);

    // Step 7: new deviation and rating.
    const double phi_new = 1.0 / std::sqrt(1.0 / (phi_star * phi_star) + 1.0 / v);
    const double mu_new = mu + phi_new * phi_new * sum;

    GlickoState out;
    out.mu = mu_new;
    out.phi = phi_new;
    out.sigma = sigma_new;
    out.games = state.games + static_cast<std::int64_t>(matchups.size());
    return out;
}

// ---------------------------------------------------------------------------
// targeted generators
// ---------------------------------------------------------------------------

Model neutral_context_model() {
    Model m;
    m.kind = Model::Kind::gbt;
    m.objective = ObjectiveKind::weighted_logloss;
    m.feature_names = duel_context_feature_names();
    m.base_score = 0.0;  // sigmoid(0) = 0.5 everywhere
    return m;
}

namespace {

DuelContext random_context(Rng& rng) {
    DuelContext ctx;
    ctx.duel_x = rng.uniform(10.0, 95.0);
    ctx.duel_y = rng.uniform(5.0, 63.0);
    ctx.pass_x = rng.uniform(5.0, 90.0);
    ctx.pass_y = rng.uniform(5.0, 63.0);
    ctx.has_pass = rng.bernoulli(0.8);
    ctx.defending_side = true;
    return ctx;
}

DuelOutcomeRecord make_record(const std::string& match_id, std::int64_t index, DuelKind kind,
                              const std::string& attacker, const std::string& defender,
                              bool defender_wins, Rng& rng) {
    DuelOutcomeRecord rec;
    rec.match_id = match_id;
    rec.event_index = index;
    rec.kind = kind;
    rec.attacker = attacker;
    rec.defender = defender;
    rec.winner = defender_wins ? defender : attacker;
    rec.loser = defender_wins ? attacker : defender;
    rec.recorded_is_defender = false;
    rec.context = random_context(rng);
    return rec;
}

}  // namespace

DuelPopulation generate_two_tier_duels(const TwoTierDuelSpec& spec) {
    Rng rng(spec.seed);
    DuelPopulation pop;
    const int n = spec.players_per_tier;
    const double skill = logit(spec.cross_tier_win_prob) / 2.0;
    std::vector<std::string> strong, weak;
    for (int i = 0; i < n; ++i) {
        strong.push_back("S" + pad(i, 2));
        weak.push_back("W" + pad(i, 2));
        pop.positions[strong.back()] = PositionGroup::central_def;
        pop.positions[weak.back()] = PositionGroup::central_def;
        pop.strong.insert(strong.back());
        pop.weak.insert(weak.back());
    }
    auto win_prob = [&](const std::string& a, const std::string& b) {
        const double sa = pop.strong.count(a) ? skill : -skill;
        const double sb = pop.strong.count(b) ? skill : -skill;
        return sigmoid(sa - sb);
    };

    std::int64_t index = 0;
    for (int r = 0; r < spec.rounds; ++r) {
        const std::string match_id = "TT_" + pad(r, 3);
        MatchMeta meta;
        meta.match_id = match_id;
        meta.season_id = "2020";
        meta.round = r + 1;
        meta.league_id = "DL";
        meta.home_team = "TA";
        meta.away_team = "TB";
        pop.match_meta[match_id] = meta;

        auto duel = [&](const std::string& a, const std::string& b) {
            const bool a_attacks = rng.bernoulli(0.5);
            const std::string& att = a_attacks ? a : b;
            const std::string& def = a_attacks ? b : a;
            const bool def_wins = rng.bernoulli(1.0 - win_prob(att, def));
            pop.records.push_back(
                make_record(match_id, index++, spec.kind, att, def, def_wins, rng));
        };
        for (int i = 0; i < n; ++i) {
            duel(strong[static_cast<std::size_t>(i)],
                 weak[static_cast<std::size_t>((i + r) % n)]);
        }
        for (int i = 0; i + 1 < n; i += 2) {
            duel(strong[static_cast<std::size_t>((i + r) % n)],
                 strong[static_cast<std::size_t>((i + 1 + r) % n)]);
            duel(weak[static_cast<std::size_t>((i + r) % n)],
                 weak[static_cast<std::size_t>((i + 1 + r) % n)]);
        }
    }
    return pop;
}

DuelPopulation generate_context_duels(int n, double p_defender, std::uint64_t seed) {
    Rng rng(seed);
    DuelPopulation pop;
    std::vector<std::string> players;
    for (int i = 0; i < 40; ++i) {
        players.push_back("X" + pad(i, 2));
        pop.positions[players.back()] = PositionGroup::central_def;
    }
    std::int64_t index = 0;
    for (int d = 0; d < n; ++d) {
        const int r = d / 40;
        const std::string match_id = "CX_" + pad(r, 3);
        if (!pop.match_meta.count(match_id)) {
            MatchMeta meta;
            meta.match_id = match_id;
            meta.season_id = "2020";
            meta.round = r + 1;
            meta.league_id = "DL";
            meta.home_team = "TA";
            meta.away_team = "TB";
            pop.match_meta[match_id] = meta;
        }
        const auto a = static_cast<std::size_t>(rng.uniform_int(0, 39));
        auto b = static_cast<std::size_t>(rng.uniform_int(0, 39));
        if (b == a) b = (b + 1) % 40;
        pop.records.push_back(make_record(match_id, index++, DuelKind::aerial, players[a],
                                          players[b], rng.bernoulli(p_defender), rng));
    }
    return pop;
}

std::vector<MatchResult> generate_two_tier_results(int clubs_per_tier, int n_seasons,
                                                   double strong_win_prob, std::uint64_t seed) {
    Rng rng(seed);
    const int n = clubs_per_tier * 2;
    std::vector<std::string> clubs;
    std::vector<double> strength;
    const double s = logit(strong_win_prob) / 2.0;
    for (int i = 0; i < n; ++i) {
        clubs.push_back("C" + pad(i, 2));
        strength.push_back(i < clubs_per_tier ? s : -s);
    }
    const auto schedule = round_robin(n, /*double_leg=*/true);
    std::vector<MatchResult> out;
    for (int season = 0; season < n_seasons; ++season) {
        const std::string season_id = std::to_string(2020 + season);
        for (std::size_t r = 0; r < schedule.size(); ++r) {
            for (std::size_t g = 0; g < schedule[r].size(); ++g) {
                const auto [h, a] = schedule[r][g];
                MatchResult res;
                res.match_id = "TC" + season_id + "_" + pad(static_cast<int>(r), 2) + "_" +
                               pad(static_cast<int>(g), 2);
                res.season_id = season_id;
                res.round = static_cast<int>(r) + 1;
                res.league_id = "E1";
                res.home_team = clubs[static_cast<std::size_t>(h)];
                res.away_team = clubs[static_cast<std::size_t>(a)];
                if (rng.bernoulli(0.18)) {
                    res.home_goals = res.away_goals = 1;
                } else {
                    const double p =
                        sigmoid(strength[static_cast<std::size_t>(h)] -
                                strength[static_cast<std::size_t>(a)]);
                    if (rng.bernoulli(p)) {
                        res.home_goals = 2;
                        res.away_goals = 0;
                    } else {
                        res.home_goals = 0;
                        res.away_goals = 2;
                    }
                }
                out.push_back(res);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// forecast panel
// ---------------------------------------------------------------------------

SynthPanel generate_forecast_panel(const SynthPanelSpec& spec) {
    Rng rng(spec.seed);
    SynthPanel panel;

    const int n_teams = spec.n_leagues * spec.teams_per_league;
    std::vector<std::string> teams;
    std::vector<double> club_strength;
    std::vector<int> league_of_team;  // current assignment, mutated at boundaries
    for (int t = 0; t < n_teams; ++t) {
        const int league = t / spec.teams_per_league;
        teams.push_back("F" + pad(league, 1) + "_" + pad(t % spec.teams_per_league, 2));
        league_of_team.push_back(league);
        // stronger leagues have higher indices
        club_strength.push_back(static_cast<double>(league) * 0.9 + rng.normal(0.0, 0.2));
    }
    auto league_id = [](int k) { return "LG" + std::to_string(k); };

    struct P {
        std::string id;
        int team;
        double quality;
        double base_minutes;
        bool left = false;
    };
    std::vector<P> players;
    const int n_players = n_teams * spec.players_per_team;
    for (int i = 0; i < n_players; ++i) {
        P p;
        p.id = "Q" + pad(i, 5);
        p.team = i % n_teams;
        p.quality = rng.normal(spec.quality_mean, spec.quality_sd);
        p.base_minutes = rng.uniform(300.0, 2600.0);
        players.push_back(p);

        PlayerMeta meta;
        meta.player_id = p.id;
        meta.name = p.id;
        meta.position = slot_position(i % 11);
        meta.birth_year = spec.first_season_year - static_cast<int>(rng.uniform_int(18, 34));
        meta.height_cm = 168.0 + rng.uniform(0.0, 28.0);
        if (rng.bernoulli(0.7)) meta.contract_months = static_cast<int>(rng.uniform_int(3, 48));
        panel.players[p.id] = meta;
    }

    const auto schedule = round_robin(spec.teams_per_league, /*double_leg=*/false);
    for (int season = 0; season < spec.n_seasons; ++season) {
        const std::string season_id = std::to_string(spec.first_season_year + season);

        // schedule per league with this season's membership
        std::vector<std::vector<int>> members(static_cast<std::size_t>(spec.n_leagues));
        for (int t = 0; t < n_teams; ++t) {
            members[static_cast<std::size_t>(league_of_team[static_cast<std::size_t>(t)])]
                .push_back(t);
        }
        auto play = [&](const std::string& match_id, int round, const std::string& league,
                        int home, int away) {
            MatchResult res;
            res.match_id = match_id;
            res.season_id = season_id;
            res.round = round;
            res.league_id = league;
            res.home_team = teams[static_cast<std::size_t>(home)];
            res.away_team = teams[static_cast<std::size_t>(away)];
            if (rng.bernoulli(0.2)) {
                res.home_goals = res.away_goals = 1;
            } else {
                const double p = sigmoid(club_strength[static_cast<std::size_t>(home)] -
                                         club_strength[static_cast<std::size_t>(away)]);
                res.home_goals = rng.bernoulli(p) ? 2 : 0;
                res.away_goals = res.home_goals ? 0 : 2;
            }
            panel.results.push_back(res);
        };
        for (int k = 0; k < spec.n_leagues; ++k) {
            const auto& ms = members[static_cast<std::size_t>(k)];
            for (std::size_t r = 0; r < schedule.size(); ++r) {
                for (std::size_t g = 0; g < schedule[r].size(); ++g) {
                    const auto [h, a] = schedule[r][g];
                    if (h >= static_cast<int>(ms.size()) || a >= static_cast<int>(ms.size())) {
                        continue;
                    }
                    play("FP" + season_id + "_" + std::to_string(k) + "_" +
                             pad(static_cast<int>(r), 2) + "_" + pad(static_cast<int>(g), 2),
                         static_cast<int>(r) + 1, league_id(k), ms[h], ms[a]);
                }
            }
        }
        // cross-league cup rounds make league strengths comparable; without
        // them the rating graph is disconnected and every league floats at
        // the 1500 anchor
        const int cup_base_round = static_cast<int>(schedule.size()) + 1;
        for (int c = 0; c < 3; ++c) {
            for (int k = 0; k + 1 < spec.n_leagues; ++k) {
                const auto& lo = members[static_cast<std::size_t>(k)];
                const auto& hi = members[static_cast<std::size_t>(k + 1)];
                for (std::size_t i2 = 0; i2 < lo.size() && i2 < hi.size(); ++i2) {
                    const int home = c % 2 ? lo[i2] : hi[(i2 + static_cast<std::size_t>(c)) %
                                                         hi.size()];
                    const int away = c % 2 ? hi[(i2 + static_cast<std::size_t>(c)) % hi.size()]
                                           : lo[i2];
                    play("FPCUP" + season_id + "_" + std::to_string(c) + "_" +
                             std::to_string(k) + "_" + pad(static_cast<int>(i2), 2),
                         cup_base_round + c, "CUP", home, away);
                }
            }
        }

        // A league's PCR difficulty tracks its members' current mean strength
        // (stronger league, harder possession game). Ratings recover member
        // strength, so the shift stays learnable even after promotions mix
        // the leagues up.
        std::vector<double> league_mean_strength(static_cast<std::size_t>(spec.n_leagues), 0.0);
        for (int k = 0; k < spec.n_leagues; ++k) {
            const auto& ms = members[static_cast<std::size_t>(k)];
            double sum = 0.0;
            for (int t : ms) sum += club_strength[static_cast<std::size_t>(t)];
            league_mean_strength[static_cast<std::size_t>(k)] =
                ms.empty() ? 0.0 : sum / static_cast<double>(ms.size());
        }

        // season lines
        std::map<std::string, double> team_xg_total;
        std::vector<std::size_t> line_start(players.size());
        for (std::size_t i = 0; i < players.size(); ++i) {
            auto& p = players[i];
            const int league = league_of_team[static_cast<std::size_t>(p.team)];
            SeasonLine l;
            l.player_id = p.id;
            l.season_id = season_id;
            l.team_id = teams[static_cast<std::size_t>(p.team)];
            l.competition_id = league_id(league);
            l.effective_minutes =
                p.left ? rng.uniform(10.0, 95.0) : p.base_minutes * rng.uniform(0.75, 1.25);
            l.pcr = spec.quality_mean + spec.reversion * (p.quality - spec.quality_mean) -
                    spec.league_shift * league_mean_strength[static_cast<std::size_t>(league)] +
                    rng.normal(0.0, spec.season_noise_sd);
            l.sum_pcr_delta = l.pcr * l.effective_minutes / 60.0;
            l.matches = std::max<std::int64_t>(1, static_cast<std::int64_t>(l.effective_minutes / 70.0));
            l.xg_sum = std::max(0.0, (0.05 + p.quality) * l.effective_minutes / 900.0 *
                                         rng.uniform(0.6, 1.4));
            l.goals = static_cast<std::int64_t>(l.xg_sum * rng.uniform(0.5, 1.5));
            l.shots = l.goals * 9 + static_cast<std::int64_t>(rng.uniform_int(0, 20));
            l.passes = static_cast<std::int64_t>(l.effective_minutes * rng.uniform(6.0, 11.0));
            l.carries = static_cast<std::int64_t>(l.effective_minutes * rng.uniform(2.0, 5.0));
            l.duels_aerial = rng.uniform_int(5, 60);
            l.duel_wins_aerial = static_cast<std::int64_t>(
                static_cast<double>(l.duels_aerial) * rng.uniform(0.3, 0.7));
            l.duels_ground = rng.uniform_int(5, 60);
            l.duel_wins_ground = static_cast<std::int64_t>(
                static_cast<double>(l.duels_ground) * rng.uniform(0.3, 0.7));
            team_xg_total[l.team_id] += l.xg_sum;
            line_start[i] = panel.lines.size();
            panel.lines.push_back(std::move(l));
        }
        for (std::size_t i = 0; i < players.size(); ++i) {
            auto& l = panel.lines[line_start[i]];
            l.team_xg_on_pitch = team_xg_total[l.team_id];
        }

        // season boundary: departures, transfers, league swaps
        if (season + 1 < spec.n_seasons && spec.n_leagues >= 1) {
            for (std::size_t pi = 0; pi < players.size(); ++pi) {
                auto& p = players[pi];
                if (p.left) continue;
                const int age = spec.first_season_year + season -
                                panel.players[p.id].birth_year;
                const double minutes = panel.lines[line_start[pi]].effective_minutes;
                const double p_leave =
                    sigmoid(-3.2 + 0.22 * (static_cast<double>(age) - 29.0) +
                            (minutes < 500.0 ? 1.8 : 0.0));
                if (rng.bernoulli(p_leave)) {
                    p.left = true;
                    continue;
                }
                if (rng.bernoulli(spec.transfer_rate)) {
                    const int cur_league = league_of_team[static_cast<std::size_t>(p.team)];
                    const bool same_league = rng.bernoulli(0.55);
                    int dest = p.team;
                    for (int tries = 0; tries < 50; ++tries) {
                        dest = static_cast<int>(rng.uniform_int(0, n_teams - 1));
                        if (dest == p.team) continue;
                        const bool dl =
                            league_of_team[static_cast<std::size_t>(dest)] == cur_league;
                        if (dl == same_league) break;
                    }
                    p.team = dest;
                }
            }
            for (int swap = 0; spec.n_leagues > 1 && swap < spec.league_swaps_per_boundary;
                 ++swap) {
                const int k = (swap + season) % (spec.n_leagues - 1);
                // move one team down and one team up between leagues k and k+1
                std::vector<int> lo, hi;
                for (int t = 0; t < n_teams; ++t) {
                    if (league_of_team[static_cast<std::size_t>(t)] == k) lo.push_back(t);
                    if (league_of_team[static_cast<std::size_t>(t)] == k + 1) hi.push_back(t);
                }
                if (lo.empty() || hi.empty()) continue;
                const int down = hi[static_cast<std::size_t>(rng.uniform_int(
                    0, static_cast<int>(hi.size()) - 1))];
                const int up = lo[static_cast<std::size_t>(rng.uniform_int(
                    0, static_cast<int>(lo.size()) - 1))];
                league_of_team[static_cast<std::size_t>(down)] = k;
                league_of_team[static_cast<std::size_t>(up)] = k + 1;
            }
        }
    }
    std::sort(panel.results.begin(), panel.results.end(),
              [](const MatchResult& a, const MatchResult& b) {
                  if (a.season_id != b.season_id) return a.season_id < b.season_id;
                  if (a.round != b.round) return a.round < b.round;
                  return a.match_id < b.match_id;
              });
    return panel;
}

}  // namespace epv::testkit
