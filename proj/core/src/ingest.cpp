#include "epv/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epv/csv.hpp"
#include "epv/error.hpp"
#include "epv/geometry.hpp"

namespace epv {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ": " + what);
}

double require_number(const ordered_json& j, const char* field, std::size_t line) {
    if (!j.contains(field) || !j[field].is_number()) {
        fail(line, std::string("missing or non-numeric field '") + field + "'");
    }
    return j[field].get<double>();
}

std::string require_string(const ordered_json& j, const char* field, std::size_t line) {
    if (!j.contains(field) || !j[field].is_string()) {
        fail(line, std::string("missing or non-string field '") + field + "'");
    }
    return j[field].get<std::string>();
}

struct Scaler {
    double sx, sy;
    double max_x, max_y;
};

double check_coord(double v, double max, const char* field, std::size_t line) {
    if (!(v >= 0.0 && v <= max)) {
        fail(line, std::string("field '") + field + "' = " + std::to_string(v) +
                       " outside [0, " + std::to_string(max) + "]");
    }
    return v;
}

Event event_from_json(const ordered_json& j, std::size_t line, const Scaler& sc) {
    Event ev;
    ev.match_id = require_string(j, "match_id", line);
    ev.event_index = static_cast<std::int64_t>(require_number(j, "event_index", line));
    ev.wall_clock_s = require_number(j, "wall_clock_s", line);
    const int half = static_cast<int>(require_number(j, "half", line));
    if (half != 1 && half != 2) fail(line, "field 'half' must be 1 or 2");
    ev.half = half;
    ev.team_id = require_string(j, "team_id", line);
    ev.player_id = require_string(j, "player_id", line);
    ev.action = parse_action(require_string(j, "action", line));
    ev.x = check_coord(require_number(j, "x", line), sc.max_x, "x", line) * sc.sx;
    ev.y = check_coord(require_number(j, "y", line), sc.max_y, "y", line) * sc.sy;
    if (j.contains("end_x") && !j["end_x"].is_null()) {
        ev.end_x = check_coord(j["end_x"].get<double>(), sc.max_x, "end_x", line) * sc.sx;
    }
    if (j.contains("end_y") && !j["end_y"].is_null()) {
        ev.end_y = check_coord(j["end_y"].get<double>(), sc.max_y, "end_y", line) * sc.sy;
    }
    if (j.contains("body_part") && !j["body_part"].is_null()) {
        ev.body_part = parse_body_part(j["body_part"].get<std::string>());
        if (!ev.body_part) fail(line, "unknown body_part '" + j["body_part"].get<std::string>() + "'");
    }
    if (j.contains("outcome") && !j["outcome"].is_null()) {
        ev.outcome = parse_outcome(j["outcome"].get<std::string>());
        if (!ev.outcome) fail(line, "unknown outcome '" + j["outcome"].get<std::string>() + "'");
    }
    if (j.contains("set_piece") && !j["set_piece"].is_null()) {
        ev.set_piece = parse_set_piece(j["set_piece"].get<std::string>());
        if (!ev.set_piece) fail(line, "unknown set_piece '" + j["set_piece"].get<std::string>() + "'");
    }
    if (j.contains("is_goal") && !j["is_goal"].is_null()) {
        if (!j["is_goal"].is_boolean()) fail(line, "field 'is_goal' must be boolean");
        ev.is_goal = j["is_goal"].get<bool>();
    }
    if (ev.is_goal && !is_shot(ev.action)) fail(line, "is_goal set on a non-shot action");
    if (j.contains("foul_suffered_by") && !j["foul_suffered_by"].is_null()) {
        ev.foul_suffered_by = j["foul_suffered_by"].get<std::string>();
    }
    if (j.contains("first_touch_by") && !j["first_touch_by"].is_null()) {
        ev.first_touch_by = j["first_touch_by"].get<std::string>();
    }
    if (j.contains("opponent_id") && !j["opponent_id"].is_null()) {
        ev.opponent_id = j["opponent_id"].get<std::string>();
    }
    return ev;
}

const char* kCsvFields[] = {"match_id", "event_index", "wall_clock_s", "half",
                            "team_id",  "player_id",   "action",       "x",
                            "y",        "end_x",       "end_y",        "body_part",
                            "outcome",  "set_piece",   "is_goal",      "foul_suffered_by",
                            "first_touch_by", "opponent_id"};

Event event_from_csv_row(const std::vector<std::string>& header,
                         const std::vector<std::string>& row, std::size_t line,
                         const Scaler& sc) {
    if (row.size() != header.size()) {
        fail(line, "expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(row.size()));
    }
    ordered_json j = ordered_json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& name = header[i];
        const std::string& val = row[i];
        if (val.empty()) continue;
        if (name == "event_index" || name == "wall_clock_s" || name == "half" ||
            name == "x" || name == "y" || name == "end_x" || name == "end_y") {
            try {
                std::size_t pos = 0;
                double d = std::stod(val, &pos);
                if (pos != val.size()) throw std::invalid_argument(val);
                j[name] = d;
            } catch (const std::exception&) {
                fail(line, "field '" + name + "' is not numeric: '" + val + "'");
            }
        } else if (name == "is_goal") {
            if (val == "true" || val == "1") j[name] = true;
            else if (val == "false" || val == "0") j[name] = false;
            else fail(line, "field 'is_goal' must be true/false");
        } else {
            j[name] = val;
        }
    }
    return event_from_json(j, line, sc);
}

}  // namespace

std::vector<MatchEvents> ingest_events(std::istream& in, const IngestOptions& opts) {
    if (opts.pitch_length <= 0 || opts.pitch_width <= 0) {
        throw ValidationError("pitch dimensions must be positive");
    }
    const Scaler sc{kPitchLength / opts.pitch_length, kPitchWidth / opts.pitch_width,
                    opts.pitch_length, opts.pitch_width};

    std::vector<MatchEvents> matches;
    std::map<std::string, std::size_t> match_pos;
    std::set<std::pair<std::string, std::int64_t>> seen;

    auto push = [&](Event ev, std::size_t line) {
        if (!seen.insert({ev.match_id, ev.event_index}).second) {
            fail(line, "duplicate (match_id, event_index) = (" + ev.match_id + ", " +
                           std::to_string(ev.event_index) + ")");
        }
        auto it = match_pos.find(ev.match_id);
        if (it == match_pos.end()) {
            match_pos.emplace(ev.match_id, matches.size());
            matches.push_back({ev.match_id, {}});
            it = match_pos.find(ev.match_id);
        }
        matches[it->second].events.push_back(std::move(ev));
    };

    std::string line;
    std::size_t lineno = 0;
    if (opts.format == EventFormat::jsonl) {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            ordered_json j = ordered_json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object()) fail(lineno, "malformed JSON object");
            push(event_from_json(j, lineno, sc), lineno);
        }
    } else {
        std::vector<std::string> header;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') continue;
            auto fields = csv_parse(line).header;  // single-line split
            if (header.empty()) {
                header = fields;
                for (const auto& h : header) {
                    bool known = false;
                    for (const char* f : kCsvFields) {
                        if (h == f) { known = true; break; }
                    }
                    if (!known) fail(lineno, "unknown CSV column '" + h + "'");
                }
                continue;
            }
            push(event_from_csv_row(header, fields, lineno, sc), lineno);
        }
    }

    for (auto& m : matches) {
        std::stable_sort(m.events.begin(), m.events.end(),
                         [](const Event& a, const Event& b) { return a.event_index < b.event_index; });
    }
    return matches;
}

std::vector<MatchEvents> ingest_events_file(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    return ingest_events(in, opts);
}

std::string event_to_jsonl(const Event& ev) {
    ordered_json j;
    j["match_id"] = ev.match_id;
    j["event_index"] = ev.event_index;
    j["wall_clock_s"] = ev.wall_clock_s;
    j["half"] = ev.half;
    j["team_id"] = ev.team_id;
    j["player_id"] = ev.player_id;
    j["action"] = action_name(ev.action);
    j["x"] = ev.x;
    j["y"] = ev.y;
    if (ev.end_x) j["end_x"] = *ev.end_x;
    if (ev.end_y) j["end_y"] = *ev.end_y;
    if (ev.body_part) j["body_part"] = body_part_name(*ev.body_part);
    if (ev.outcome) j["outcome"] = outcome_name(*ev.outcome);
    if (ev.set_piece) j["set_piece"] = set_piece_name(*ev.set_piece);
    if (ev.is_goal) j["is_goal"] = true;
    if (ev.foul_suffered_by) j["foul_suffered_by"] = *ev.foul_suffered_by;
    if (ev.first_touch_by) j["first_touch_by"] = *ev.first_touch_by;
    if (ev.opponent_id) j["opponent_id"] = *ev.opponent_id;
    return j.dump();
}

std::string events_to_jsonl(const std::vector<MatchEvents>& matches) {
    std::string out;
    for (const auto& m : matches) {
        for (const auto& ev : m.events) {
            out += event_to_jsonl(ev);
            out += '\n';
        }
    }
    return out;
}

std::vector<PlayerMeta> read_players_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::vector<PlayerMeta> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) fail(lineno, "malformed JSON object");
        PlayerMeta p;
        p.player_id = require_string(j, "player_id", lineno);
        p.name = j.value("name", p.player_id);
        auto pos = parse_position(j.value("position", "midfielder"));
        if (!pos) fail(lineno, "unknown position '" + j["position"].get<std::string>() + "'");
        p.position = *pos;
        p.birth_year = j.value("birth_year", 0);
        p.height_cm = j.value("height_cm", 0.0);
        if (j.contains("contract_months") && !j["contract_months"].is_null()) {
            p.contract_months = j["contract_months"].get<int>();
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::string players_to_jsonl(const std::vector<PlayerMeta>& players) {
    std::string out;
    for (const auto& p : players) {
        ordered_json j;
        j["player_id"] = p.player_id;
        j["name"] = p.name;
        j["position"] = position_name(p.position);
        j["birth_year"] = p.birth_year;
        j["height_cm"] = p.height_cm;
        if (p.contract_months) j["contract_months"] = *p.contract_months;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<MatchMeta> read_matches_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::vector<MatchMeta> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) fail(lineno, "malformed JSON object");
        MatchMeta m;
        m.match_id = require_string(j, "match_id", lineno);
        m.season_id = require_string(j, "season_id", lineno);
        m.round = static_cast<int>(require_number(j, "round", lineno));
        m.league_id = require_string(j, "league_id", lineno);
        m.home_team = require_string(j, "home_team", lineno);
        m.away_team = require_string(j, "away_team", lineno);
        out.push_back(std::move(m));
    }
    return out;
}

std::string matches_to_jsonl(const std::vector<MatchMeta>& matches) {
    std::string out;
    for (const auto& m : matches) {
        ordered_json j;
        j["match_id"] = m.match_id;
        j["season_id"] = m.season_id;
        j["round"] = m.round;
        j["league_id"] = m.league_id;
        j["home_team"] = m.home_team;
        j["away_team"] = m.away_team;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::map<std::string, PlayerMeta> player_index(const std::vector<PlayerMeta>& players) {
    std::map<std::string, PlayerMeta> idx;
    for (const auto& p : players) idx[p.player_id] = p;
    return idx;
}

std::map<std::string, MatchMeta> match_index(const std::vector<MatchMeta>& matches) {
    std::map<std::string, MatchMeta> idx;
    for (const auto& m : matches) idx[m.match_id] = m;
    return idx;
}

}  // namespace epv
