#include "epv/possession.hpp"

#include <algorithm>
#include <stdexcept>

#include "epv/error.hpp"

namespace epv {

PossessionView segment_possessions(const std::vector<Event>& events) {
    PossessionView view;
    if (!events.empty()) view.match_id = events.front().match_id;
    view.events.reserve(events.size());

    int s = -1;
    int cur_half = -1;
    std::optional<std::string> owner;
    for (const Event& ev : events) {
        if (ev.half != cur_half) {
            cur_half = ev.half;
            owner.reset();
            ++s;  // fresh possession slot per half
        }
        if (is_control(ev.action)) {
            if (!owner) {
                owner = ev.team_id;
            } else if (*owner != ev.team_id) {
                ++s;
                owner = ev.team_id;
            }
        }
        view.events.push_back({ev, s, 0.0});
    }
    return view;
}

PossessionView compute_effective_time(const std::vector<Event>& events, double stoppage_gap_s) {
    PossessionView view;
    if (!events.empty()) view.match_id = events.front().match_id;
    view.events.reserve(events.size());

    int cur_half = -1;
    double t = 0.0;
    double prev_wall = 0.0;
    for (const Event& ev : events) {
        if (ev.half != cur_half) {
            cur_half = ev.half;
            t = 0.0;
            prev_wall = ev.wall_clock_s;
        } else {
            const double dt = ev.wall_clock_s - prev_wall;
            if (dt < 0.0) {
                throw ValidationError("match " + ev.match_id + " event " +
                                      std::to_string(ev.event_index) +
                                      ": wall clock goes backwards");
            }
            // The gap before a set-piece restart is dead-ball time.
            t += ev.set_piece ? 0.0 : std::min(dt, stoppage_gap_s);
            prev_wall = ev.wall_clock_s;
        }
        view.events.push_back({ev, 0, t});
    }
    return view;
}

PossessionView annotate(const std::vector<Event>& events, double stoppage_gap_s) {
    PossessionView view = segment_possessions(events);
    PossessionView timed = compute_effective_time(events, stoppage_gap_s);
    for (std::size_t i = 0; i < view.events.size(); ++i) {
        view.events[i].t = timed.events[i].t;
    }
    return view;
}

PossessionView filter_noncore(const PossessionView& view) {
    PossessionView out;
    out.match_id = view.match_id;
    out.events.reserve(view.events.size());
    for (const auto& ae : view.events) {
        if (!is_other(ae.ev.action)) out.events.push_back(ae);
    }
    return out;
}

std::optional<std::string> duel_winner(const Event& duel,
                                       const std::optional<std::string>& next_possession_team) {
    if (!is_duel(duel.action)) {
        throw std::invalid_argument("duel_winner: event is not a symmetrical duel");
    }
    if (duel.foul_suffered_by) return *duel.foul_suffered_by;
    if (duel.first_touch_by) return *duel.first_touch_by;
    if (next_possession_team) {
        if (*next_possession_team == duel.team_id) return duel.player_id;
        if (duel.opponent_id) return *duel.opponent_id;
    }
    return std::nullopt;
}

double match_effective_seconds(const PossessionView& view) {
    double total = 0.0;
    int cur_half = -1;
    double half_last = 0.0;
    for (const auto& ae : view.events) {
        if (ae.ev.half != cur_half) {
            total += half_last;
            half_last = 0.0;
            cur_half = ae.ev.half;
        }
        half_last = ae.t;
    }
    total += half_last;
    return total;
}

}  // namespace epv
