#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "epv/events.hpp"

namespace epv {

enum class EventFormat { jsonl, csv };

struct IngestOptions {
    EventFormat format = EventFormat::jsonl;
    // Input pitch dimensions; coordinates are rescaled onto 105x68.
    double pitch_length = 105.0;
    double pitch_width = 68.0;
};

/// Parse an event stream. Events come back grouped by match_id (first
/// appearance order) and sorted by event_index within each match.
///
/// Throws ValidationError naming the line and field for malformed records,
/// out-of-range coordinates, or duplicate (match_id, event_index) pairs.
std::vector<MatchEvents> ingest_events(std::istream& in, const IngestOptions& opts = {});
std::vector<MatchEvents> ingest_events_file(const std::string& path, const IngestOptions& opts = {});

std::string event_to_jsonl(const Event& ev);
std::string events_to_jsonl(const std::vector<MatchEvents>& matches);

std::vector<PlayerMeta> read_players_file(const std::string& path);
std::string players_to_jsonl(const std::vector<PlayerMeta>& players);

std::vector<MatchMeta> read_matches_file(const std::string& path);
std::string matches_to_jsonl(const std::vector<MatchMeta>& matches);

std::map<std::string, PlayerMeta> player_index(const std::vector<PlayerMeta>& players);
std::map<std::string, MatchMeta> match_index(const std::vector<MatchMeta>& matches);

}  // namespace epv
