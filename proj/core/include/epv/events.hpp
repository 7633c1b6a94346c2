#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace epv {

/// Actions where a single player unambiguously possesses the ball.
enum class ControlKind {
    pass,
    shot,
    dribble,
    carry,
    free_kick,
    goal_kick,
    penalty,
    corner_kick,
    throw_in,
};

/// Contested 50/50 actions between two players. Dribbles are control
/// actions, never duels.
enum class DuelKind { aerial, ground };

/// Touches that neither establish possession nor form a duel.
enum class OtherKind { interception, clearance_touch, save, block, other };

using ActionKind = std::variant<ControlKind, DuelKind, OtherKind>;

enum class BodyPart { foot, head, other };
enum class Outcome { complete, incomplete };
enum class SetPiece { penalty, free_kick, corner, goal_kick, throw_in, kickoff };

/// Six-way position taxonomy. full_back serializes as "lateral".
enum class PositionGroup { central_def, full_back, midfielder, central_forward, wing, goalkeeper };

inline bool is_control(const ActionKind& a) { return std::holds_alternative<ControlKind>(a); }
inline bool is_duel(const ActionKind& a) { return std::holds_alternative<DuelKind>(a); }
inline bool is_other(const ActionKind& a) { return std::holds_alternative<OtherKind>(a); }

inline bool is_shot(const ActionKind& a) {
    return is_control(a) && std::get<ControlKind>(a) == ControlKind::shot;
}

std::string action_name(const ActionKind& a);
/// Unknown strings map to Other(other); never throws.
ActionKind parse_action(const std::string& name);

std::string body_part_name(BodyPart b);
std::optional<BodyPart> parse_body_part(const std::string& name);
std::string outcome_name(Outcome o);
std::optional<Outcome> parse_outcome(const std::string& name);
std::string set_piece_name(SetPiece s);
std::optional<SetPiece> parse_set_piece(const std::string& name);
std::string position_name(PositionGroup p);
std::optional<PositionGroup> parse_position(const std::string& name);

/// One timestamped on-pitch action. Coordinates are meters on a 105x68
/// pitch with the origin at the acting team's own goal-line corner, so x
/// always grows toward the goal the team attacks.
struct Event {
    std::string match_id;
    std::int64_t event_index = 0;
    double wall_clock_s = 0.0;  // seconds from half start
    int half = 1;
    std::string team_id;
    std::string player_id;
    ActionKind action = OtherKind::other;
    double x = 0.0;
    double y = 0.0;
    std::optional<double> end_x;
    std::optional<double> end_y;
    std::optional<BodyPart> body_part;
    std::optional<Outcome> outcome;
    std::optional<SetPiece> set_piece;
    bool is_goal = false;                          // shots only
    std::optional<std::string> foul_suffered_by;   // duels only
    std::optional<std::string> first_touch_by;     // duels only
    std::optional<std::string> opponent_id;        // duels: the opposite participant
};

/// Events of one match, sorted by event_index.
struct MatchEvents {
    std::string match_id;
    std::vector<Event> events;
};

/// Event plus possession index and effective playing time.
struct AnnotatedEvent {
    Event ev;
    int possession = 0;  // non-decreasing; fresh index per half
    double t = 0.0;      // effective seconds from half start
};

struct PossessionView {
    std::string match_id;
    std::vector<AnnotatedEvent> events;
};

/// Per-player static metadata (sidecar input; see README for the schema).
struct PlayerMeta {
    std::string player_id;
    std::string name;  // defaults to player_id
    PositionGroup position = PositionGroup::midfielder;
    int birth_year = 0;
    double height_cm = 0.0;
    std::optional<int> contract_months;
};

/// Per-match scheduling metadata (sidecar input).
struct MatchMeta {
    std::string match_id;
    std::string season_id;
    int round = 0;
    std::string league_id;
    std::string home_team;
    std::string away_team;
};

}  // namespace epv
