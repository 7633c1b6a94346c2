#include "epv/events.hpp"

namespace epv {

std::string action_name(const ActionKind& a) {
    if (is_control(a)) {
        switch (std::get<ControlKind>(a)) {
            case ControlKind::pass: return "pass";
            case ControlKind::shot: return "shot";
            case ControlKind::dribble: return "dribble";
            case ControlKind::carry: return "carry";
            case ControlKind::free_kick: return "free_kick";
            case ControlKind::goal_kick: return "goal_kick";
            case ControlKind::penalty: return "penalty";
            case ControlKind::corner_kick: return "corner_kick";
            case ControlKind::throw_in: return "throw_in";
        }
    }
    if (is_duel(a)) {
        return std::get<DuelKind>(a) == DuelKind::aerial ? "aerial_duel" : "ground_duel";
    }
    switch (std::get<OtherKind>(a)) {
        case OtherKind::interception: return "interception";
        case OtherKind::clearance_touch: return "clearance_touch";
        case OtherKind::save: return "save";
        case OtherKind::block: return "block";
        case OtherKind::other: return "other";
    }
    return "other";
}

ActionKind parse_action(const std::string& name) {
    if (name == "pass") return ControlKind::pass;
    if (name == "shot") return ControlKind::shot;
    if (name == "dribble") return ControlKind::dribble;
    if (name == "carry") return ControlKind::carry;
    if (name == "free_kick") return ControlKind::free_kick;
    if (name == "goal_kick") return ControlKind::goal_kick;
    if (name == "penalty") return ControlKind::penalty;
    if (name == "corner_kick") return ControlKind::corner_kick;
    if (name == "throw_in") return ControlKind::throw_in;
    if (name == "aerial_duel") return DuelKind::aerial;
    if (name == "ground_duel") return DuelKind::ground;
    if (name == "interception") return OtherKind::interception;
    if (name == "clearance_touch") return OtherKind::clearance_touch;
    if (name == "save") return OtherKind::save;
    if (name == "block") return OtherKind::block;
    return OtherKind::other;
}

std::string body_part_name(BodyPart b) {
    switch (b) {
        case BodyPart::foot: return "foot";
        case BodyPart::head: return "head";
        case BodyPart::other: return "other";
    }
    return "other";
}

std::optional<BodyPart> parse_body_part(const std::string& name) {
    if (name == "foot") return BodyPart::foot;
    if (name == "head") return BodyPart::head;
    if (name == "other") return BodyPart::other;
    return std::nullopt;
}

std::string outcome_name(Outcome o) {
    return o == Outcome::complete ? "complete" : "incomplete";
}

std::optional<Outcome> parse_outcome(const std::string& name) {
    if (name == "complete") return Outcome::complete;
    if (name == "incomplete") return Outcome::incomplete;
    return std::nullopt;
}

std::string set_piece_name(SetPiece s) {
    switch (s) {
        case SetPiece::penalty: return "penalty";
        case SetPiece::free_kick: return "free_kick";
        case SetPiece::corner: return "corner";
        case SetPiece::goal_kick: return "goal_kick";
        case SetPiece::throw_in: return "throw_in";
        case SetPiece::kickoff: return "kickoff";
    }
    return "free_kick";
}

std::optional<SetPiece> parse_set_piece(const std::string& name) {
    if (name == "penalty") return SetPiece::penalty;
    if (name == "free_kick") return SetPiece::free_kick;
    if (name == "corner") return SetPiece::corner;
    if (name == "goal_kick") return SetPiece::goal_kick;
    if (name == "throw_in") return SetPiece::throw_in;
    if (name == "kickoff") return SetPiece::kickoff;
    return std::nullopt;
}

std::string position_name(PositionGroup p) {
    switch (p) {
        case PositionGroup::central_def: return "central_def";
        case PositionGroup::full_back: return "lateral";
        case PositionGroup::midfielder: return "midfielder";
        case PositionGroup::central_forward: return "central_forward";
        case PositionGroup::wing: return "wing";
        case PositionGroup::goalkeeper: return "goalkeeper";
    }
    return "midfielder";
}

std::optional<PositionGroup> parse_position(const std::string& name) {
    if (name == "central_def") return PositionGroup::central_def;
    if (name == "lateral" || name == "full_back") return PositionGroup::full_back;
    if (name == "midfielder") return PositionGroup::midfielder;
    if (name == "central_forward") return PositionGroup::central_forward;
    if (name == "wing") return PositionGroup::wing;
    if (name == "goalkeeper") return PositionGroup::goalkeeper;
    return std::nullopt;
}

}  // namespace epv
