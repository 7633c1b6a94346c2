#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epv/events.hpp"

namespace epv {

inline constexpr double kDefaultStoppageGapS = 15.0;

/// Assign possession indices. A possession is a maximal run of one team's
/// control actions; touches by the other team (interceptions, saves, ...)
/// do not break it unless that team's own control action follows. Duels and
/// other non-control events carry the index of the preceding possession.
/// Each half opens a fresh possession index.
PossessionView segment_possessions(const std::vector<Event>& events);

/// Assign effective playing time: the clock starts at 0 in each half,
/// advances by min(wall-clock delta, stoppage_gap_s) between consecutive
/// events, and does not advance at all across the dead-ball gap before a
/// set-piece restart.
///
/// Throws ValidationError on a negative wall-clock delta within a half.
PossessionView compute_effective_time(const std::vector<Event>& events,
                                      double stoppage_gap_s = kDefaultStoppageGapS);

/// Both annotations in one pass.
PossessionView annotate(const std::vector<Event>& events,
                        double stoppage_gap_s = kDefaultStoppageGapS);

/// Drop Other-kind events; control actions and duels survive with their
/// possession indices and times intact. Idempotent.
PossessionView filter_noncore(const PossessionView& view);

/// Resolve the winner of a symmetrical duel:
///   1. the fouled player, if any;
///   2. the player with the first touch, if any;
///   3. the participant whose team owns the next possession.
/// Returns nullopt when no rule applies (the caller drops the duel from
/// rating updates). Throws std::invalid_argument for non-duel events.
std::optional<std::string> duel_winner(const Event& duel,
                                       const std::optional<std::string>& next_possession_team);

/// Effective duration of the match in seconds (sum over halves of the last
/// event's effective time).
double match_effective_seconds(const PossessionView& view);

}  // namespace epv
