#include "epv/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epv/error.hpp"

namespace epv {

// ---------------------------------------------------------------------------
// club ratings
// ---------------------------------------------------------------------------

double ClubRatingBook::rating_at_start(const std::string& season, const std::string& team) const {
    auto sit = season_start.find(season);
    const std::map<std::string, GlickoState>* states = nullptr;
    if (sit != season_start.end()) {
        states = &sit->second;
    } else {
        states = &final_states;  // a season after the last processed one
    }
    auto tit = states->find(team);
    return tit == states->end() ? kGlickoBase : glicko_display(tit->second.mu);
}

namespace {

/// Seasons at or before `season`, newest first. An unknown season counts as
/// later than everything processed.
std::vector<std::string> seasons_up_to(const std::vector<std::string>& seasons,
                                       const std::string& season) {
    std::size_t end = seasons.size();
    for (std::size_t i = 0; i < seasons.size(); ++i) {
        if (seasons[i] == season) {
            end = i + 1;
            break;
        }
    }
    std::vector<std::string> out(seasons.begin(),
                                 seasons.begin() + static_cast<std::ptrdiff_t>(end));
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

std::string ClubRatingBook::league_of(const std::string& season, const std::string& team) const {
    for (const auto& s : seasons_up_to(seasons, season)) {
        auto sit = team_league.find(s);
        if (sit == team_league.end()) continue;
        auto tit = sit->second.find(team);
        if (tit != sit->second.end()) return tit->second;
    }
    return "";
}

std::vector<std::string> ClubRatingBook::league_teams(const std::string& season,
                                                      const std::string& league) const {
    for (const auto& s : seasons_up_to(seasons, season)) {
        auto sit = team_league.find(s);
        if (sit == team_league.end()) continue;
        std::vector<std::string> teams;
        for (const auto& [team, lg] : sit->second) {
            if (lg == league) teams.push_back(team);
        }
        if (!teams.empty()) return teams;
    }
    return {};
}

bool ClubRatingBook::knows_team(const std::string& team) const {
    return final_states.find(team) != final_states.end();
}

void ClubRatingBook::register_membership(const std::string& season,
                                         const std::map<std::string, std::string>& memberships) {
    if (std::find(seasons.begin(), seasons.end(), season) == seasons.end()) {
        seasons.push_back(season);
    }
    auto& entry = team_league[season];
    for (const auto& [team, league] : memberships) entry[team] = league;
}

ClubRatingBook rate_clubs(const std::vector<MatchResult>& results, const GlickoConfig& config) {
    ClubRatingBook book;
    std::map<std::string, GlickoState> states;
    // (season, team) -> competition appearance counts; a team's league for a
    // season is the competition it appeared in most (cup fixtures are rare)
    std::map<std::pair<std::string, std::string>, std::map<std::string, int>> league_votes;

    std::pair<std::string, int> prev_key{"", -1};
    bool first = true;
    std::size_t i = 0;
    while (i < results.size()) {
        const std::pair<std::string, int> key{results[i].season_id, results[i].round};
        if (!first && (key < prev_key)) {
            throw ValidationError("rate_clubs: results out of chronological order at match " +
                                  results[i].match_id);
        }
        if (key.first != prev_key.first) {
            // season boundary: freeze the snapshot before any of its matches
            book.seasons.push_back(key.first);
            book.season_start[key.first] = states;
        }
        prev_key = key;
        first = false;

        // one rating period = one (season, round) block
        std::map<std::string, std::vector<GlickoMatchup>> matchups;
        std::size_t j = i;
        for (; j < results.size(); ++j) {
            const auto& r = results[j];
            if (std::pair<std::string, int>{r.season_id, r.round} != key) break;
            league_votes[{r.season_id, r.home_team}][r.league_id] += 1;
            league_votes[{r.season_id, r.away_team}][r.league_id] += 1;
            const GlickoState home = states.count(r.home_team) ? states[r.home_team] : GlickoState{};
            const GlickoState away = states.count(r.away_team) ? states[r.away_team] : GlickoState{};
            double home_score = 0.5;
            if (r.home_goals > r.away_goals) home_score = 1.0;
            else if (r.home_goals < r.away_goals) home_score = 0.0;
            matchups[r.home_team].push_back({away.mu, away.phi, home_score, 0.0});
            matchups[r.away_team].push_back({home.mu, home.phi, 1.0 - home_score, 0.0});
        }
        for (auto& [team, st] : states) {
            if (matchups.find(team) == matchups.end()) st = glicko_update(st, {}, config);
        }
        for (const auto& [team, games] : matchups) {
            const GlickoState pre = states.count(team) ? states[team] : GlickoState{};
            states[team] = glicko_update(pre, games, config);
        }
        i = j;
    }
    book.final_states = std::move(states);
    for (const auto& [key, votes] : league_votes) {
        int best = 0;
        std::string league;
        for (const auto& [lg, n] : votes) {
            if (n > best) {
                best = n;
                league = lg;
            }
        }
        book.team_league[key.first][key.second] = league;
    }
    return book;
}

double league_strength(std::vector<double> club_ratings, int n) {
    if (n < 1) throw ValidationError("league_strength: n must be >= 1");
    if (static_cast<int>(club_ratings.size()) < n) {
        throw ValidationError("league_strength: league has fewer than " + std::to_string(n) +
                              " clubs");
    }
    std::sort(club_ratings.begin(), club_ratings.end(), std::greater<double>());
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += club_ratings[static_cast<std::size_t>(k)];
    return sum / static_cast<double>(n);
}

double league_strength(const ClubRatingBook& book, const std::string& season,
                       const std::string& league, int n) {
    std::vector<double> ratings;
    for (const auto& team : book.league_teams(season, league)) {
        ratings.push_back(book.rating_at_start(season, team));
    }
    return league_strength(std::move(ratings), n);
}

// ---------------------------------------------------------------------------
// feature registry
// ---------------------------------------------------------------------------

namespace {

const SeasonLine* hist(const FeatureContext& c, std::size_t k) {
    return k < c.history.size() ? c.history[k] : nullptr;
}

double avg_over(const FeatureContext& c, std::size_t k, double (*field)(const SeasonLine&)) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < k && i < c.history.size(); ++i) {
        sum += field(*c.history[i]);
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double f_pcr(const SeasonLine& l) { return l.pcr; }
double f_minutes(const SeasonLine& l) { return l.effective_minutes; }
double f_xg(const SeasonLine& l) { return l.xg_sum; }
double f_goals(const SeasonLine& l) { return static_cast<double>(l.goals); }

bool is_pos(const FeatureContext& c, PositionGroup g) { return c.meta && c.meta->position == g; }

}  // namespace

const std::vector<FeatureDef>& forecast_feature_registry() {
    using G = FeatureGroup;
    static const std::vector<FeatureDef> registry = {
        // -- player-specific -------------------------------------------------
        {"age", G::player_specific, false,
         [](const FeatureContext& c) {
             return c.meta && c.meta->birth_year > 0
                        ? static_cast<double>(c.next_season_year - c.meta->birth_year)
                        : 25.0;
         }},
        {"height_cm", G::player_specific, false,
         [](const FeatureContext& c) { return c.meta && c.meta->height_cm > 0 ? c.meta->height_cm : 180.0; }},
        {"pos_central_def", G::player_specific, false,
         [](const FeatureContext& c) { return is_pos(c, PositionGroup::central_def) ? 1.0 : 0.0; }},
        {"pos_lateral", G::player_specific, false,
         [](const FeatureContext& c) { return is_pos(c, PositionGroup::full_back) ? 1.0 : 0.0; }},
        {"pos_midfielder", G::player_specific, false,
         [](const FeatureContext& c) { return is_pos(c, PositionGroup::midfielder) ? 1.0 : 0.0; }},
        {"pos_central_forward", G::player_specific, false,
         [](const FeatureContext& c) { return is_pos(c, PositionGroup::central_forward) ? 1.0 : 0.0; }},
        {"pos_wing", G::player_specific, false,
         [](const FeatureContext& c) { return is_pos(c, PositionGroup::wing) ? 1.0 : 0.0; }},
        {"pos_goalkeeper", G::player_specific, false,
         [](const FeatureContext& c) { return is_pos(c, PositionGroup::goalkeeper) ? 1.0 : 0.0; }},
        {"contract_months", G::player_specific, false,
         [](const FeatureContext& c) { return c.contract_months; }},
        {"contract_known", G::player_specific, false,
         [](const FeatureContext& c) { return c.contract_known ? 1.0 : 0.0; }},
        // -- performance -----------------------------------------------------
        {"pcr_last1", G::performance, false,
         [](const FeatureContext& c) { return hist(c, 0)->pcr; }},
        {"pcr_prev2", G::performance, false,
         [](const FeatureContext& c) { return hist(c, 1) ? hist(c, 1)->pcr : hist(c, 0)->pcr; }},
        {"pcr_avg3", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 3, f_pcr); }},
        {"pcr_avg5", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 5, f_pcr); }},
        {"pcr_delta_1", G::performance, false,
         [](const FeatureContext& c) { return hist(c, 1) ? hist(c, 0)->pcr - hist(c, 1)->pcr : 0.0; }},
        {"minutes_last1", G::performance, false,
         [](const FeatureContext& c) { return hist(c, 0)->effective_minutes; }},
        {"minutes_avg3", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 3, f_minutes); }},
        {"minutes_avg5", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 5, f_minutes); }},
        {"xg_last1", G::performance, false,
         [](const FeatureContext& c) { return hist(c, 0)->xg_sum; }},
        {"xg_avg3", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 3, f_xg); }},
        {"xg_avg5", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 5, f_xg); }},
        {"goals_last1", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(hist(c, 0)->goals); }},
        {"goals_avg3", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 3, f_goals); }},
        {"goals_avg5", G::performance, false,
         [](const FeatureContext& c) { return avg_over(c, 5, f_goals); }},
        {"shots_last1", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(hist(c, 0)->shots); }},
        {"passes_last1", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(hist(c, 0)->passes); }},
        {"carries_last1", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(hist(c, 0)->carries); }},
        {"duels_aerial_last1", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(hist(c, 0)->duels_aerial); }},
        {"duel_win_rate_aerial", G::performance, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->duels_aerial ? static_cast<double>(l->duel_wins_aerial) /
                                          static_cast<double>(l->duels_aerial)
                                    : 0.5;
         }},
        {"duels_ground_last1", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(hist(c, 0)->duels_ground); }},
        {"duel_win_rate_ground", G::performance, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->duels_ground ? static_cast<double>(l->duel_wins_ground) /
                                          static_cast<double>(l->duels_ground)
                                    : 0.5;
         }},
        {"aerial_duel_rating", G::performance, false,
         [](const FeatureContext& c) { return c.aerial_rating; }},
        {"ground_duel_rating", G::performance, false,
         [](const FeatureContext& c) { return c.ground_rating; }},
        {"history_len", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(c.history.size()); }},
        {"has_hist3", G::performance, false,
         [](const FeatureContext& c) { return c.history.size() >= 3 ? 1.0 : 0.0; }},
        {"has_hist5", G::performance, false,
         [](const FeatureContext& c) { return c.history.size() >= 5 ? 1.0 : 0.0; }},
        {"xg_per_60", G::performance, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->effective_minutes > 0 ? 60.0 * l->xg_sum / l->effective_minutes : 0.0;
         }},
        {"goals_per_60", G::performance, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->effective_minutes > 0
                        ? 60.0 * static_cast<double>(l->goals) / l->effective_minutes
                        : 0.0;
         }},
        {"matches_last1", G::performance, false,
         [](const FeatureContext& c) { return static_cast<double>(hist(c, 0)->matches); }},
        {"minutes_per_match", G::performance, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->matches ? l->effective_minutes / static_cast<double>(l->matches) : 0.0;
         }},
        // -- contribution to team success -------------------------------------
        {"share_team_xg", G::team_contribution, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->team_xg_on_pitch > 0 ? l->xg_sum / l->team_xg_on_pitch : 0.0;
         }},
        {"goals_minus_xg", G::team_contribution, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return static_cast<double>(l->goals) - l->xg_sum;
         }},
        {"passes_per_60", G::team_contribution, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->effective_minutes > 0
                        ? 60.0 * static_cast<double>(l->passes) / l->effective_minutes
                        : 0.0;
         }},
        {"carries_per_60", G::team_contribution, false,
         [](const FeatureContext& c) {
             const auto* l = hist(c, 0);
             return l->effective_minutes > 0
                        ? 60.0 * static_cast<double>(l->carries) / l->effective_minutes
                        : 0.0;
         }},
        // -- league style ------------------------------------------------------
        {"league_mean_pcr_prev", G::league_style, false,
         [](const FeatureContext& c) { return c.league_mean_pcr_prev; }},
        {"league_team_count", G::league_style, false,
         [](const FeatureContext& c) { return c.league_team_count; }},
        // -- team & league strength -------------------------------------------
        {"old_team_rating", G::strength, false,
         [](const FeatureContext& c) { return c.old_team_rating; }},
        {"old_league_rating", G::strength, false,
         [](const FeatureContext& c) { return c.old_league_rating; }},
        {"mean_opponent_rating", G::strength, false,
         [](const FeatureContext& c) { return c.mean_opponent_rating; }},
        {"new_team_rating", G::strength, true,
         [](const FeatureContext& c) { return c.new_team_rating; }},
        {"new_league_rating", G::strength, true,
         [](const FeatureContext& c) { return c.new_league_rating; }},
        {"delta_ratings", G::strength, true,
         [](const FeatureContext& c) {
             return (c.new_league_rating - c.old_league_rating) / 1500.0;
         }},
        {"team_rating_delta", G::strength, true,
         [](const FeatureContext& c) {
             return (c.new_team_rating - c.old_team_rating) / 1500.0;
         }},
        {"changed_team", G::strength, true,
         [](const FeatureContext& c) { return c.changed_team ? 1.0 : 0.0; }},
        {"changed_league", G::strength, true,
         [](const FeatureContext& c) { return c.changed_league ? 1.0 : 0.0; }},
    };
    return registry;
}

const std::vector<std::string>& forecast_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& def : forecast_feature_registry()) n.push_back(def.name);
        return n;
    }();
    return names;
}

const std::vector<std::size_t>& stay_feature_indices() {
    static const std::vector<std::size_t> idx = [] {
        std::vector<std::size_t> v;
        const auto& reg = forecast_feature_registry();
        for (std::size_t i = 0; i < reg.size(); ++i) {
            if (!reg[i].uses_new_side) v.push_back(i);
        }
        return v;
    }();
    return idx;
}

const std::vector<std::string>& stay_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        const auto& reg = forecast_feature_registry();
        for (std::size_t i : stay_feature_indices()) n.push_back(reg[i].name);
        return n;
    }();
    return names;
}

// ---------------------------------------------------------------------------
// dataset and feature building
// ---------------------------------------------------------------------------

ForecastDataset build_forecast_dataset(const std::vector<SeasonLine>& lines,
                                       const std::map<std::string, PlayerMeta>& players,
                                       const std::vector<MatchResult>& results,
                                       const ForecastConfig& config) {
    ForecastDataset data;
    data.config = config;
    data.players = players;
    data.clubs = rate_clubs(results);

    std::set<std::string> season_set;
    for (const auto& l : lines) {
        season_set.insert(l.season_id);
        data.lines[{l.player_id, l.season_id}] = l;
    }
    data.seasons.assign(season_set.begin(), season_set.end());

    // League style: mean PCR over qualifying lines.
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> style;
    for (const auto& l : lines) {
        if (l.effective_minutes < config.min_minutes_data) continue;
        auto& s = style[{l.season_id, l.competition_id}];
        s.first += l.pcr;
        s.second += 1;
    }
    for (const auto& [key, s] : style) {
        data.league_mean_pcr[key] = s.second ? s.first / static_cast<double>(s.second) : 0.0;
    }

    // Mean opponent rating per (season, team), frozen at season start.
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> opp;
    for (const auto& r : results) {
        const double home = data.clubs.rating_at_start(r.season_id, r.home_team);
        const double away = data.clubs.rating_at_start(r.season_id, r.away_team);
        auto& ah = opp[{r.season_id, r.home_team}];
        ah.first += away;
        ah.second += 1;
        auto& aa = opp[{r.season_id, r.away_team}];
        aa.first += home;
        aa.second += 1;
    }
    for (const auto& [key, s] : opp) {
        data.mean_opponent_rating[key] = s.second ? s.first / static_cast<double>(s.second)
                                                  : kGlickoBase;
    }
    return data;
}

namespace {

int season_year(const std::string& season_id, const std::vector<std::string>& seasons) {
    try {
        std::size_t pos = 0;
        int y = std::stoi(season_id, &pos);
        if (pos == season_id.size()) return y;
    } catch (const std::exception&) {
    }
    // fall back to the season's ordinal position
    for (std::size_t i = 0; i < seasons.size(); ++i) {
        if (seasons[i] == season_id) return 2000 + static_cast<int>(i);
    }
    return 2000;
}

int clamped_top_n(const ForecastDataset& data, const std::string& league, std::size_t available) {
    int n = data.config.league_top_n;
    auto it = data.config.league_top_n_override.find(league);
    if (it != data.config.league_top_n_override.end()) n = it->second;
    return std::max(1, std::min<int>(n, static_cast<int>(available)));
}

/// League strength at the rating boundary, with the league's membership
/// resolved as of the feature season (so the lookup never peeks forward).
double league_rating_for(const ForecastDataset& data, const std::string& boundary_season,
                         const std::string& membership_season, const std::string& league) {
    if (league.empty()) return kGlickoBase;
    const auto teams = data.clubs.league_teams(membership_season, league);
    if (teams.empty()) return kGlickoBase;
    std::vector<double> ratings;
    ratings.reserve(teams.size());
    for (const auto& t : teams) ratings.push_back(data.clubs.rating_at_start(boundary_season, t));
    return league_strength(std::move(ratings), clamped_top_n(data, league, teams.size()));
}

}  // namespace

ForecastRow build_features(const ForecastDataset& data, const std::string& player,
                           const std::string& season,
                           const std::optional<std::string>& destination) {
    auto lit = data.lines.find({player, season});
    if (lit == data.lines.end()) {
        throw ValidationError("build_features: missing season aggregate for player " + player +
                              " season " + season + " (required fields: pcr, effective_minutes)");
    }
    const SeasonLine& line = lit->second;

    auto spos = std::find(data.seasons.begin(), data.seasons.end(), season);
    if (spos == data.seasons.end()) {
        throw ValidationError("build_features: unknown season " + season);
    }
    const std::size_t sidx = static_cast<std::size_t>(spos - data.seasons.begin());

    ForecastRow row;
    row.player_id = player;
    row.season_id = season;
    row.next_season_observed = sidx + 1 < data.seasons.size();
    row.next_season_id = row.next_season_observed ? data.seasons[sidx + 1] : "";
    row.prev_minutes = line.effective_minutes;
    row.old_team = line.team_id;
    row.old_league = line.competition_id;

    FeatureContext ctx;
    auto mit = data.players.find(player);
    ctx.meta = mit == data.players.end() ? nullptr : &mit->second;
    if (ctx.meta && ctx.meta->contract_months) {
        ctx.contract_months = static_cast<double>(*ctx.meta->contract_months);
        ctx.contract_known = true;
    }
    for (std::size_t back = 0; back <= sidx && ctx.history.size() < 5; ++back) {
        auto h = data.lines.find({player, data.seasons[sidx - back]});
        if (h != data.lines.end()) ctx.history.push_back(&h->second);
    }

    // Target side.
    const SeasonLine* next_line = nullptr;
    if (row.next_season_observed) {
        auto nit = data.lines.find({player, row.next_season_id});
        if (nit != data.lines.end()) next_line = &nit->second;
    }
    if (destination) {
        row.new_team = *destination;
    } else if (next_line) {
        row.new_team = next_line->team_id;
    } else {
        row.new_team = row.old_team;
    }
    if (next_line) {
        row.target = next_line->pcr;
        row.has_target = true;
        row.next_minutes = next_line->effective_minutes;
    }

    // Ratings are frozen at the target-season boundary (for the final panel
    // season that degrades to the post-season states); memberships resolve
    // at the boundary too, walking backward when the upcoming season's
    // assignments are not registered.
    const std::string boundary =
        row.next_season_observed ? row.next_season_id : season + "+1";
    row.new_league = data.clubs.league_of(boundary, row.new_team);
    if (row.new_league.empty()) row.new_league = row.old_league;

    ctx.next_season_year = season_year(season, data.seasons) + 1;
    ctx.old_team_rating = data.clubs.rating_at_start(boundary, row.old_team);
    ctx.new_team_rating = data.clubs.rating_at_start(boundary, row.new_team);
    ctx.old_league_rating = league_rating_for(data, boundary, boundary, row.old_league);
    ctx.new_league_rating = league_rating_for(data, boundary, boundary, row.new_league);
    ctx.changed_team = row.new_team != row.old_team;
    ctx.changed_league = row.new_league != row.old_league;

    auto lm = data.league_mean_pcr.find({season, row.old_league});
    ctx.league_mean_pcr_prev = lm == data.league_mean_pcr.end() ? 0.0 : lm->second;
    ctx.league_team_count =
        static_cast<double>(data.clubs.league_teams(boundary, row.old_league).size());
    auto orr = data.mean_opponent_rating.find({season, row.old_team});
    ctx.mean_opponent_rating = orr == data.mean_opponent_rating.end() ? kGlickoBase : orr->second;
    auto ar = data.duel_rating_aerial.find({player, season});
    ctx.aerial_rating = ar == data.duel_rating_aerial.end() ? kGlickoBase : ar->second;
    auto gr = data.duel_rating_ground.find({player, season});
    ctx.ground_rating = gr == data.duel_rating_ground.end() ? kGlickoBase : gr->second;

    row.delta_ratings = delta_ratings(ctx.new_league_rating, ctx.old_league_rating);

    const auto& registry = forecast_feature_registry();
    row.features.reserve(registry.size());
    for (const auto& def : registry) row.features.push_back(def.fn(ctx));
    return row;
}

std::vector<ForecastRow> build_training_rows(const ForecastDataset& data) {
    std::vector<ForecastRow> rows;
    for (const auto& [key, line] : data.lines) {
        if (line.effective_minutes < data.config.min_minutes_data) continue;
        ForecastRow row = build_features(data, key.first, key.second);
        if (!row.next_season_observed) continue;
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// models
// ---------------------------------------------------------------------------

Model train_stay_model(const std::vector<ForecastRow>& rows, const ForecastConfig& config) {
    std::vector<TrainingRow> training;
    for (const auto& r : rows) {
        if (!r.next_season_observed) continue;
        TrainingRow tr;
        for (std::size_t i : stay_feature_indices()) tr.features.push_back(r.features[i]);
        tr.target = r.next_minutes >= config.min_minutes_data ? 1.0 : 0.0;
        tr.player_id = r.player_id;
        tr.weight = 1.0;
        training.push_back(std::move(tr));
    }
    if (training.empty()) throw ValidationError("train_stay_model: no training rows");
    bool has0 = false, has1 = false;
    for (const auto& t : training) (t.target == 1.0 ? has1 : has0) = true;
    if (!has0 || !has1) {
        throw ValidationError("train_stay_model: labels are single-class");
    }
    return train_gbt(training, Objective::weighted_logloss(), config.stay_gbt,
                     stay_feature_names());
}

Model train_pcr_model(const std::vector<ForecastRow>& rows, const ForecastConfig& config) {
    std::vector<TrainingRow> training;
    for (const auto& r : rows) {
        if (!r.has_target) continue;
        if (r.prev_minutes < config.min_minutes_data) continue;
        if (r.next_minutes < config.min_minutes_data) continue;
        TrainingRow tr;
        tr.features = r.features;
        tr.target = r.target;
        tr.player_id = r.player_id;
        training.push_back(std::move(tr));
    }
    if (training.empty()) {
        throw ValidationError("train_pcr_model: no rows pass the two-season minutes filter");
    }
    assign_per_player_weights(training);
    return train_gbt(training, Objective::weighted_mse(), config.pcr_gbt,
                     forecast_feature_names());
}

double predict_stay(const Model& stay_model, const ForecastRow& row) {
    std::vector<double> features;
    for (std::size_t i : stay_feature_indices()) features.push_back(row.features[i]);
    return stay_model.predict(features);
}

double predict_pcr(const Model& pcr_model, const ForecastRow& row) {
    return pcr_model.predict(row.features);
}

double delta_ratings(double new_league_rating, double old_league_rating) {
    return (new_league_rating - old_league_rating) / 1500.0;
}

double adjust_pcr(double pcr_pred, double delta_ratings_value, double pl) {
    return pcr_pred * std::pow(0.8, delta_ratings_value + pl);
}

ShortlistRow what_if_transfer(const ForecastDataset& data, const ForecastModels& models,
                              const std::string& player, const std::string& season,
                              const std::string& destination_team) {
    if (!data.clubs.knows_team(destination_team)) {
        throw ValidationError("what_if_transfer: unknown destination team " + destination_team);
    }
    ForecastRow row = build_features(data, player, season, destination_team);
    ShortlistRow out;
    auto mit = data.players.find(player);
    out.player = mit == data.players.end() ? player : mit->second.name;
    out.team = row.old_team;
    const auto& ctx_line = data.lines.at({player, season});
    out.pcr = ctx_line.pcr;
    if (mit != data.players.end() && mit->second.birth_year > 0) {
        out.age = static_cast<double>(season_year(season, data.seasons) + 1 -
                                      mit->second.birth_year);
    }
    out.pcr_pred = predict_pcr(models.pcr, row);
    out.stay_proba = predict_stay(models.stay, row);
    out.pcr_adj = adjust_pcr(out.pcr_pred, row.delta_ratings, 1.0 - out.stay_proba);
    return out;
}

std::vector<ShortlistRow> build_shortlist(const ForecastDataset& data,
                                          const ForecastModels& models, const std::string& season,
                                          const std::string& destination_team) {
    std::vector<ShortlistRow> rows;
    for (const auto& [key, line] : data.lines) {
        if (key.second != season) continue;
        if (line.effective_minutes < data.config.min_minutes_data) continue;
        rows.push_back(what_if_transfer(data, models, key.first, season, destination_team));
    }
    std::sort(rows.begin(), rows.end(), [](const ShortlistRow& a, const ShortlistRow& b) {
        if (a.pcr_adj != b.pcr_adj) return a.pcr_adj > b.pcr_adj;
        if (a.pcr_pred != b.pcr_pred) return a.pcr_pred > b.pcr_pred;
        return a.player < b.player;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
    return rows;
}

// ---------------------------------------------------------------------------
// evaluation harness
// ---------------------------------------------------------------------------

namespace {

struct Accum {
    double se = 0.0, ae = 0.0;
    std::size_t n = 0;
    void add(double err) {
        se += err * err;
        ae += std::abs(err);
        n += 1;
    }
};

EvalGroupMetrics metrics_for(const std::string& sample, const std::vector<EvalInput>& rows,
                             bool use_model, bool (*pred)(const EvalInput&)) {
    Accum all, big;
    for (const auto& r : rows) {
        if (!pred(r)) continue;
        const double err = (use_model ? r.model : r.baseline) - r.actual;
        all.add(err);
        if (r.prev_minutes > 1000.0) big.add(err);
    }
    EvalGroupMetrics m;
    m.sample = sample;
    m.n_100 = all.n;
    if (all.n) {
        m.rmse_100 = std::sqrt(all.se / static_cast<double>(all.n));
        m.mae_100 = all.ae / static_cast<double>(all.n);
    }
    m.n_1000 = big.n;
    if (big.n) {
        m.rmse_1000 = std::sqrt(big.se / static_cast<double>(big.n));
        m.mae_1000 = big.ae / static_cast<double>(big.n);
    }
    return m;
}

}  // namespace

EvalReport evaluate(const std::vector<EvalInput>& rows) {
    struct GroupDef {
        const char* name;
        bool (*pred)(const EvalInput&);
    };
    static const GroupDef groups[] = {
        {"all data", [](const EvalInput&) { return true; }},
        {"same team, same league", [](const EvalInput& r) { return r.same_team && r.same_league; }},
        {"same team, new league", [](const EvalInput& r) { return r.same_team && !r.same_league; }},
        {"new team, same league", [](const EvalInput& r) { return !r.same_team && r.same_league; }},
        {"new team, new league", [](const EvalInput& r) { return !r.same_team && !r.same_league; }},
    };

    EvalReport report;
    for (const auto& g : groups) {
        EvalGroupMetrics base = metrics_for(g.name, rows, false, g.pred);
        if (base.n_100 == 0) {
            report.notes.push_back(std::string("omitted: ") + g.name + " (no rows)");
            continue;
        }
        report.baseline.push_back(base);
        report.model.push_back(metrics_for(g.name, rows, true, g.pred));
    }
    return report;
}

EvalReport evaluate_forecast(const ForecastDataset& data, const ForecastModels& models) {
    std::vector<EvalInput> inputs;
    for (const auto& [key, line] : data.lines) {
        if (line.effective_minutes < data.config.min_minutes_data) continue;
        ForecastRow row = build_features(data, key.first, key.second);
        if (!row.has_target) continue;
        if (row.next_minutes < data.config.min_minutes_data) continue;
        EvalInput in;
        in.actual = row.target;
        in.baseline = line.pcr;
        in.model = predict_pcr(models.pcr, row);
        in.same_team = row.new_team == row.old_team;
        in.same_league = row.new_league == row.old_league;
        in.prev_minutes = row.prev_minutes;
        inputs.push_back(in);
    }
    return evaluate(inputs);
}

}  // namespace epv
