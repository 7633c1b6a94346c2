#include "epv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epv/csv.hpp"
#include "epv/epv_models.hpp"
#include "epv/error.hpp"
#include "epv/forecast.hpp"
#include "epv/geometry.hpp"
#include "epv/possession.hpp"
#include "epv/rewards.hpp"
#include "epv/rng.hpp"
#include "epv/season.hpp"
#include "epv/xg.hpp"

namespace epv {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

static constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

namespace {

ordered_json gbt_to_json(const GbtConfig& g) {
    return ordered_json{{"trees", g.trees},
                        {"max_depth", g.max_depth},
                        {"learning_rate", g.learning_rate},
                        {"lambda", g.lambda}};
}

GbtConfig gbt_from_json(const ordered_json& j, std::uint64_t seed) {
    GbtConfig g;
    g.trees = j.at("trees").get<int>();
    g.max_depth = j.at("max_depth").get<int>();
    g.learning_rate = j.at("learning_rate").get<double>();
    g.lambda = j.at("lambda").get<double>();
    g.seed = seed;
    return g;
}

}  // namespace

std::string config_to_json(const PipelineConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["gamma"] = c.gamma;
    j["horizon_s"] = c.horizon_s;
    j["stoppage_gap_s"] = c.stoppage_gap_s;
    j["variant"] = pv_variant_name(c.variant);
    j["glicko_tau"] = c.glicko_tau;
    j["glicko_sigma0"] = c.glicko_sigma0;
    j["advantage_mode"] = c.advantage_mode == AdvantageMode::per_duel ? "per_duel" : "global_mean";
    j["xg_gbt"] = gbt_to_json(c.xg_gbt);
    j["context_gbt"] = gbt_to_json(c.context_gbt);
    j["epv_gbt"] = gbt_to_json(c.epv_gbt);
    j["stay_gbt"] = gbt_to_json(c.stay_gbt);
    j["pcr_gbt"] = gbt_to_json(c.pcr_gbt);
    j["min_minutes_rank"] = c.min_minutes_rank;
    j["min_minutes_data"] = c.min_minutes_data;
    j["league_top_n"] = c.league_top_n;
    j["league_top_n_override"] = c.league_top_n_override;
    return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError("config.json: malformed JSON");
    PipelineConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.gamma = j.at("gamma").get<double>();
    c.horizon_s = j.at("horizon_s").get<double>();
    c.stoppage_gap_s = j.at("stoppage_gap_s").get<double>();
    auto variant = parse_pv_variant(j.at("variant").get<std::string>());
    if (!variant) throw ValidationError("config.json: unknown variant");
    c.variant = *variant;
    c.glicko_tau = j.at("glicko_tau").get<double>();
    c.glicko_sigma0 = j.at("glicko_sigma0").get<double>();
    c.advantage_mode = j.at("advantage_mode").get<std::string>() == "global_mean"
                           ? AdvantageMode::global_mean
                           : AdvantageMode::per_duel;
    c.xg_gbt = gbt_from_json(j.at("xg_gbt"), c.seed);
    c.context_gbt = gbt_from_json(j.at("context_gbt"), c.seed);
    c.epv_gbt = gbt_from_json(j.at("epv_gbt"), c.seed);
    c.stay_gbt = gbt_from_json(j.at("stay_gbt"), c.seed);
    c.pcr_gbt = gbt_from_json(j.at("pcr_gbt"), c.seed);
    c.min_minutes_rank = j.at("min_minutes_rank").get<double>();
    c.min_minutes_data = j.at("min_minutes_data").get<double>();
    c.league_top_n = j.at("league_top_n").get<int>();
    c.league_top_n_override =
        j.at("league_top_n_override").get<std::map<std::string, int>>();
    return c;
}

std::string config_hash(const PipelineConfig& config) {
    const std::uint64_t h = fnv1a64(config_to_json(config));
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

PipelineConfig load_or_init_config(const std::string& workdir,
                                   const std::optional<PipelineConfig>& override_config) {
    fs::create_directories(workdir);
    const std::string path = workdir + "/config.json";
    PipelineConfig config;
    if (override_config) {
        config = *override_config;
    } else if (fs::exists(path)) {
        config = config_from_json(read_text_file(path));
    }
    write_text_file(path, config_to_json(config));
    return config;
}

std::uint64_t file_hash(const std::string& path) {
    return fnv1a64(read_text_file(path));
}

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::train_xg: return "train-xg";
        case Stage::label: return "label";
        case Stage::rate: return "rate-duels";
        case Stage::train_epv: return "train-epv";
        case Stage::rewards: return "rewards";
        case Stage::pcr: return "pcr";
        case Stage::report: return "duel-report";
        case Stage::forecast: return "forecast";
        case Stage::evaluate: return "evaluate";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// artifact helpers
// ---------------------------------------------------------------------------

namespace {

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

struct Workspace {
    std::string dir;
    PipelineConfig config;
    std::string hash;
    std::vector<std::pair<std::string, std::string>> inputs;  // (path, hash)
    std::vector<std::string> outputs;

    std::string path(const std::string& name) const { return dir + "/" + name; }

    std::string require(const std::string& name, const std::string& produced_by) {
        const std::string p = path(name);
        if (!fs::exists(p)) {
            throw DependencyError("missing artifact " + name + "; run the '" + produced_by +
                                  "' stage first");
        }
        inputs.emplace_back(name, hex_hash(file_hash(p)));
        return p;
    }

    void verify_csv_hash(const CsvTable& table, const std::string& name) const {
        for (const auto& c : table.comments) {
            if (c.rfind("config=", 0) == 0) {
                if (c.substr(7) != hash) {
                    throw DependencyError("artifact " + name +
                                          " was produced under a different config; rerun "
                                          "upstream stages");
                }
                return;
            }
        }
        throw DependencyError("artifact " + name + " carries no config hash");
    }

    void verify_json_hash(const ordered_json& j, const std::string& name) const {
        if (!j.contains("config_hash") || j["config_hash"].get<std::string>() != hash) {
            throw DependencyError("artifact " + name +
                                  " was produced under a different config; rerun upstream "
                                  "stages");
        }
    }

    void write_csv(const std::string& name, CsvTable table) {
        table.comments.insert(table.comments.begin(), "config=" + hash);
        csv_write_file(table, path(name));
        outputs.push_back(name);
    }

    CsvTable read_csv(const std::string& name, const std::string& produced_by) {
        CsvTable t = csv_read_file(require(name, produced_by));
        verify_csv_hash(t, name);
        return t;
    }

    void write_json(const std::string& name, ordered_json j) {
        j["config_hash"] = hash;
        write_text_file(path(name), j.dump(2) + "\n");
        outputs.push_back(name);
    }

    ordered_json read_json(const std::string& name, const std::string& produced_by) {
        ordered_json j = ordered_json::parse(read_text_file(require(name, produced_by)),
                                             nullptr, false);
        if (j.is_discarded()) throw ValidationError("artifact " + name + ": malformed JSON");
        verify_json_hash(j, name);
        return j;
    }

    void write_model(const std::string& name, const Model& model) {
        ordered_json j = ordered_json::parse(model_to_json(model));
        write_json(name, std::move(j));
    }

    Model read_model(const std::string& name, const std::string& produced_by) {
        ordered_json j = read_json(name, produced_by);
        return model_from_json(j.dump());
    }

    void finish_manifest(Stage stage) const {
        const std::string mpath = path("manifest.json");
        ordered_json m;
        if (fs::exists(mpath)) {
            m = ordered_json::parse(read_text_file(mpath), nullptr, false);
            if (m.is_discarded() || !m.is_object()) m = ordered_json::object();
        } else {
            m = ordered_json::object();
        }
        m["tool_version"] = kToolVersion;
        m["config_hash"] = hash;
        m["config"] = ordered_json::parse(config_to_json(config));
        if (!m.contains("stages") || !m["stages"].is_object()) {
            m["stages"] = ordered_json::object();
        }
        ordered_json entry;
        ordered_json in = ordered_json::object();
        for (const auto& [p, h] : inputs) in[p] = h;
        entry["inputs"] = std::move(in);
        entry["outputs"] = outputs;
        m["stages"][stage_name(stage)] = std::move(entry);
        write_text_file(mpath, m.dump(2) + "\n");
    }
};

GlickoConfig glicko_config_of(const PipelineConfig& c) {
    GlickoConfig g;
    g.tau = c.glicko_tau;
    g.initial_sigma = c.glicko_sigma0;
    return g;
}

struct LoadedEvents {
    std::vector<MatchEvents> matches;
    std::vector<PossessionView> annotated;
    std::vector<PossessionView> filtered;
};

LoadedEvents load_events(Workspace& ws) {
    LoadedEvents le;
    const std::string path = ws.require("events.jsonl", "ingest");
    le.matches = ingest_events_file(path);
    for (const auto& m : le.matches) {
        le.annotated.push_back(annotate(m.events, ws.config.stoppage_gap_s));
        le.filtered.push_back(filter_noncore(le.annotated.back()));
    }
    return le;
}

std::vector<PlayerMeta> load_players(Workspace& ws) {
    return read_players_file(ws.require("players.jsonl", "ingest"));
}

std::vector<MatchMeta> load_matches(Workspace& ws) {
    return read_matches_file(ws.require("matches.jsonl", "ingest"));
}

XgModelPair load_xg(Workspace& ws) {
    XgModelPair pair;
    pair.open_play = ws.read_model("xg.open.json", "train-xg");
    pair.set_piece = ws.read_model("xg.set_piece.json", "train-xg");
    return pair;
}

ordered_json state_to_json(const GlickoState& s) {
    return ordered_json{s.mu, s.phi, s.sigma, s.games};
}

GlickoState state_from_json(const ordered_json& j) {
    GlickoState s;
    s.mu = j.at(0).get<double>();
    s.phi = j.at(1).get<double>();
    s.sigma = j.at(2).get<double>();
    s.games = j.at(3).get<std::int64_t>();
    return s;
}

void save_rating_state(Workspace& ws, const RatingPipelineResult& result) {
    ordered_json j;
    for (const auto& [kind, per_player] : result.states) {
        const char* key = kind == DuelKind::aerial ? "aerial" : "ground";
        ordered_json states = ordered_json::object();
        for (const auto& [player, st] : per_player) states[player] = state_to_json(st);
        j["states"][key] = std::move(states);
    }
    for (const auto& [kind, per_player] : result.duel_wins) {
        const char* key = kind == DuelKind::aerial ? "aerial" : "ground";
        ordered_json wins = ordered_json::object();
        for (const auto& [player, dw] : per_player) {
            wins[player] = ordered_json{dw.first, dw.second};
        }
        j["duel_wins"][key] = std::move(wins);
    }
    ordered_json season_end = ordered_json::object();
    for (const auto& [season, per_kind] : result.season_end_states) {
        ordered_json by_kind = ordered_json::object();
        for (const auto& [kind, per_player] : per_kind) {
            const char* key = kind == DuelKind::aerial ? "aerial" : "ground";
            ordered_json states = ordered_json::object();
            for (const auto& [player, st] : per_player) states[player] = state_to_json(st);
            by_kind[key] = std::move(states);
        }
        season_end[season] = std::move(by_kind);
    }
    j["season_end_states"] = std::move(season_end);
    ordered_json snaps = ordered_json::array();
    for (const auto& [key, snap] : result.snapshots) {
        ordered_json s;
        s["match_id"] = key.first;
        s["event_index"] = key.second;
        s["own"] = state_to_json(snap.own);
        s["opponent"] = state_to_json(snap.opponent);
        s["p_context"] = snap.p_context;
        s["p_win_own"] = snap.p_win_own;
        s["advantage"] = snap.advantage;
        snaps.push_back(std::move(s));
    }
    j["snapshots"] = std::move(snaps);
    ws.write_json("rating_state.json", std::move(j));
}

RatingPipelineResult load_rating_state(Workspace& ws) {
    ordered_json j = ws.read_json("rating_state.json", "rate-duels");
    RatingPipelineResult result;
    if (j.contains("states")) {
        for (const auto& [key, per_player] : j["states"].items()) {
            const DuelKind kind = key == "aerial" ? DuelKind::aerial : DuelKind::ground;
            for (const auto& [player, st] : per_player.items()) {
                result.states[kind][player] = state_from_json(st);
            }
        }
    }
    if (j.contains("duel_wins")) {
        for (const auto& [key, per_player] : j["duel_wins"].items()) {
            const DuelKind kind = key == "aerial" ? DuelKind::aerial : DuelKind::ground;
            for (const auto& [player, dw] : per_player.items()) {
                result.duel_wins[kind][player] = {dw.at(0).get<std::int64_t>(),
                                                  dw.at(1).get<std::int64_t>()};
            }
        }
    }
    if (j.contains("season_end_states")) {
        for (const auto& [season, by_kind] : j["season_end_states"].items()) {
            for (const auto& [key, per_player] : by_kind.items()) {
                const DuelKind kind = key == "aerial" ? DuelKind::aerial : DuelKind::ground;
                for (const auto& [player, st] : per_player.items()) {
                    result.season_end_states[season][kind][player] = state_from_json(st);
                }
            }
        }
    }
    for (const auto& s : j.value("snapshots", ordered_json::array())) {
        DuelRatingSnapshot snap;
        snap.own = state_from_json(s.at("own"));
        snap.opponent = state_from_json(s.at("opponent"));
        snap.p_context = s.at("p_context").get<double>();
        snap.p_win_own = s.at("p_win_own").get<double>();
        snap.advantage = s.at("advantage").get<double>();
        result.snapshots[{s.at("match_id").get<std::string>(),
                          s.at("event_index").get<std::int64_t>()}] = snap;
    }
    return result;
}

std::map<std::string, PositionGroup> positions_of(const std::vector<PlayerMeta>& players) {
    std::map<std::string, PositionGroup> positions;
    for (const auto& p : players) positions[p.player_id] = p.position;
    return positions;
}

std::map<std::string, std::string> names_of(const std::vector<PlayerMeta>& players) {
    std::map<std::string, std::string> names;
    for (const auto& p : players) names[p.player_id] = p.name;
    return names;
}

/// xG per (match_id, event_index), computed on the filtered views so model
/// features match the training-time extraction.
std::map<std::pair<std::string, std::int64_t>, double> xg_by_event(
    const XgModelPair& pair, const std::vector<PossessionView>& filtered) {
    std::map<std::pair<std::string, std::int64_t>, double> out;
    for (const auto& view : filtered) {
        for (std::size_t i = 0; i < view.events.size(); ++i) {
            if (!is_shot(view.events[i].ev.action)) continue;
            out[{view.match_id, view.events[i].ev.event_index}] = xg_of(pair, view, i);
        }
    }
    return out;
}

std::vector<XgTable> xg_tables_for(
    const std::vector<PossessionView>& views,
    const std::map<std::pair<std::string, std::int64_t>, double>& by_event) {
    std::vector<XgTable> tables;
    for (const auto& view : views) {
        XgTable t(view.events.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < view.events.size(); ++i) {
            auto it = by_event.find({view.match_id, view.events[i].ev.event_index});
            if (it != by_event.end()) t[i] = it->second;
        }
        tables.push_back(std::move(t));
    }
    return tables;
}

std::vector<MatchResult> results_from_events(const LoadedEvents& le,
                                             const std::vector<MatchMeta>& meta) {
    auto midx = match_index(meta);
    std::vector<MatchResult> results;
    for (const auto& m : le.matches) {
        auto it = midx.find(m.match_id);
        if (it == midx.end()) {
            throw ValidationError("no match metadata for " + m.match_id +
                                  "; provide matches.jsonl at ingest");
        }
        MatchResult r;
        r.match_id = m.match_id;
        r.season_id = it->second.season_id;
        r.round = it->second.round;
        r.league_id = it->second.league_id;
        r.home_team = it->second.home_team;
        r.away_team = it->second.away_team;
        for (const auto& ev : m.events) {
            if (!ev.is_goal) continue;
            if (ev.team_id == r.home_team) r.home_goals += 1;
            else r.away_goals += 1;
        }
        results.push_back(std::move(r));
    }
    std::sort(results.begin(), results.end(), [](const MatchResult& a, const MatchResult& b) {
        if (a.season_id != b.season_id) return a.season_id < b.season_id;
        if (a.round != b.round) return a.round < b.round;
        return a.match_id < b.match_id;
    });
    return results;
}

std::vector<LabeledAction> labels_for_view(const CsvTable& table, const PossessionView& view) {
    std::map<std::int64_t, std::size_t> index_of;
    for (std::size_t i = 0; i < view.events.size(); ++i) {
        index_of[view.events[i].ev.event_index] = i;
    }
    std::vector<LabeledAction> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.at(r, "match_id") != view.match_id) continue;
        LabeledAction la;
        la.match_id = view.match_id;
        la.event_index = std::stoll(table.at(r, "event_index"));
        auto it = index_of.find(la.event_index);
        if (it == index_of.end()) {
            throw ValidationError("labels.csv references unknown event " + view.match_id + "/" +
                                  std::to_string(la.event_index));
        }
        la.view_index = it->second;
        la.kind = table.at(r, "kind") == "duel" ? LabeledAction::Kind::duel
                                                : LabeledAction::Kind::control;
        la.pv = std::stod(table.at(r, "pv"));
        out.push_back(la);
    }
    return out;
}

// ---------------------------------------------------------------------------
// stages
// ---------------------------------------------------------------------------

void stage_ingest(Workspace& ws, const StageOptions& options) {
    if (options.input.empty()) {
        throw ValidationError("ingest: --input is required");
    }
    IngestOptions opts;
    opts.format = options.format;
    auto matches = ingest_events_file(options.input, opts);
    ws.inputs.emplace_back(options.input, hex_hash(file_hash(options.input)));
    write_text_file(ws.path("events.jsonl"), events_to_jsonl(matches));
    ws.outputs.push_back("events.jsonl");

    auto sibling = [&](const std::string& name) -> std::string {
        const fs::path p = fs::path(options.input).parent_path() / name;
        return fs::exists(p) ? p.string() : std::string();
    };
    std::string players_src =
        !options.players_file.empty() ? options.players_file : sibling("players.jsonl");
    std::string matches_src =
        !options.matches_file.empty() ? options.matches_file : sibling("matches.jsonl");

    std::vector<PlayerMeta> players;
    if (!players_src.empty()) {
        players = read_players_file(players_src);
        ws.inputs.emplace_back(players_src, hex_hash(file_hash(players_src)));
    }
    write_text_file(ws.path("players.jsonl"), players_to_jsonl(players));
    ws.outputs.push_back("players.jsonl");

    std::vector<MatchMeta> meta;
    if (!matches_src.empty()) {
        meta = read_matches_file(matches_src);
        ws.inputs.emplace_back(matches_src, hex_hash(file_hash(matches_src)));
    }
    write_text_file(ws.path("matches.jsonl"), matches_to_jsonl(meta));
    ws.outputs.push_back("matches.jsonl");
}

void stage_train_xg(Workspace& ws) {
    LoadedEvents le = load_events(ws);
    XgTrainConfig cfg;
    cfg.gbt = ws.config.xg_gbt;
    XgModelPair pair = train_xg(le.filtered, cfg);
    ws.write_model("xg.open.json", pair.open_play);
    ws.write_model("xg.set_piece.json", pair.set_piece);
}

void stage_label(Workspace& ws) {
    LoadedEvents le = load_events(ws);
    XgModelPair pair = load_xg(ws);
    PvConfig pv;
    pv.gamma = ws.config.gamma;
    pv.horizon_s = ws.config.horizon_s;
    pv.variant = ws.config.variant;

    CsvTable table;
    table.header = {"match_id", "event_index", "kind", "pv"};
    for (const auto& view : le.filtered) {
        const XgTable xg = assign_xg(pair, view);
        for (const auto& la : label_dataset(view, xg, pv)) {
            table.rows.push_back(
                {la.match_id, std::to_string(la.event_index),
                 la.kind == LabeledAction::Kind::duel ? "duel" : "control", format_full(la.pv)});
        }
    }
    ws.write_csv("labels.csv", std::move(table));
}

void stage_rate(Workspace& ws) {
    LoadedEvents le = load_events(ws);
    auto players = load_players(ws);
    auto meta = load_matches(ws);
    auto positions = positions_of(players);

    std::vector<DuelOutcomeRecord> records;
    for (const auto& view : le.annotated) {
        auto recs = resolve_duels(view);
        records.insert(records.end(), recs.begin(), recs.end());
    }

    std::map<DuelKind, Model> context_models;
    for (DuelKind kind : {DuelKind::aerial, DuelKind::ground}) {
        std::vector<DuelOutcomeRecord> of_kind;
        for (const auto& r : records) {
            if (r.kind == kind) of_kind.push_back(r);
        }
        context_models[kind] = train_context_model(of_kind, positions, ws.config.context_gbt);
    }
    ws.write_model("context_aerial.json", context_models[DuelKind::aerial]);
    ws.write_model("context_ground.json", context_models[DuelKind::ground]);

    RatingPipelineConfig rp;
    rp.glicko = glicko_config_of(ws.config);
    rp.advantage_mode = ws.config.advantage_mode;
    RatingPipelineResult result =
        run_rating_pipeline(records, match_index(meta), context_models, rp);
    save_rating_state(ws, result);

    for (DuelKind kind : {DuelKind::aerial, DuelKind::ground}) {
        CsvTable table;
        table.header = {"rank", "player", "position", "rating", "duels", "win_pct"};
        auto names = names_of(players);
        for (const auto& row : rating_table(result, kind, positions)) {
            auto n = names.find(row.player_id);
            table.rows.push_back({std::to_string(row.rank),
                                  n == names.end() ? row.player_id : n->second, row.position,
                                  format_fixed(row.rating, 0), std::to_string(row.duels),
                                  format_fixed(row.win_pct, 4)});
        }
        ws.write_csv(kind == DuelKind::aerial ? "ratings_aerial.csv" : "ratings_ground.csv",
                     std::move(table));
    }
}

void stage_train_epv(Workspace& ws) {
    LoadedEvents le = load_events(ws);
    CsvTable labels_csv = ws.read_csv("labels.csv", "label");
    RatingPipelineResult rating = load_rating_state(ws);

    std::vector<std::vector<LabeledAction>> labels;
    for (const auto& view : le.filtered) labels.push_back(labels_for_view(labels_csv, view));

    EpvTrainConfig cfg;
    cfg.gbt = ws.config.epv_gbt;
    EpvModelSet set = train_epv(le.filtered, labels, rating.snapshots, cfg);

    // weighted training RMSE per model, for the operator's eyes only
    {
        std::map<std::string, std::pair<double, double>> acc;  // name -> (sum se, n)
        for (std::size_t m = 0; m < le.filtered.size(); ++m) {
            const auto& view = le.filtered[m];
            for (const auto& la : labels[m]) {
                const auto& ev = view.events[la.view_index].ev;
                double pred = 0.0;
                std::string name;
                if (la.kind == LabeledAction::Kind::control) {
                    name = ev.set_piece ? "control_set_piece" : "control_open";
                    pred = epv_control(set, view, la.view_index);
                } else {
                    name = std::get<DuelKind>(ev.action) == DuelKind::aerial ? "duel_ind_aerial"
                                                                             : "duel_ind_ground";
                    pred = epv_duel_ind(set, view, la.view_index, rating.snapshots, ev.team_id);
                }
                auto& a = acc[name];
                a.first += (pred - la.pv) * (pred - la.pv);
                a.second += 1.0;
            }
        }
        std::string line = "train-epv training RMSE:";
        for (const auto& [name, a] : acc) {
            line += " " + name + "=" +
                    format_fixed(a.second > 0 ? std::sqrt(a.first / a.second) : 0.0, 4);
        }
        std::printf("%s\n", line.c_str());
    }

    fs::create_directories(ws.path("epv_models"));
    ws.write_model("epv_models/control_open.json", set.control_open);
    ws.write_model("epv_models/control_set_piece.json", set.control_set_piece);
    ws.write_model("epv_models/duel_avg_aerial.json", set.duel_avg_aerial);
    ws.write_model("epv_models/duel_avg_ground.json", set.duel_avg_ground);
    ws.write_model("epv_models/duel_ind_aerial.json", set.duel_ind_aerial);
    ws.write_model("epv_models/duel_ind_ground.json", set.duel_ind_ground);
}

EpvModelSet load_epv(Workspace& ws) {
    EpvModelSet set;
    set.control_open = ws.read_model("epv_models/control_open.json", "train-epv");
    set.control_set_piece = ws.read_model("epv_models/control_set_piece.json", "train-epv");
    set.duel_avg_aerial = ws.read_model("epv_models/duel_avg_aerial.json", "train-epv");
    set.duel_avg_ground = ws.read_model("epv_models/duel_avg_ground.json", "train-epv");
    set.duel_ind_aerial = ws.read_model("epv_models/duel_ind_aerial.json", "train-epv");
    set.duel_ind_ground = ws.read_model("epv_models/duel_ind_ground.json", "train-epv");
    return set;
}

void stage_rewards(Workspace& ws) {
    LoadedEvents le = load_events(ws);
    EpvModelSet models = load_epv(ws);
    RatingPipelineResult rating = load_rating_state(ws);

    CsvTable table;
    table.header = {"match_id", "event_index", "player_id", "scenario", "delta_epv"};
    for (const auto& view : le.filtered) {
        for (const auto& rec : compute_rewards(models, view, rating.snapshots)) {
            table.rows.push_back({rec.match_id, std::to_string(rec.event_index), rec.player_id,
                                  scenario_name(rec.scenario), format_full(rec.delta_epv)});
        }
    }
    ws.write_csv("rewards.csv", std::move(table));
}

std::vector<SeasonLine> season_lines_from_csv(const CsvTable& t) {
    std::vector<SeasonLine> lines;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        SeasonLine l;
        l.player_id = t.at(r, "player_id");
        l.season_id = t.at(r, "season_id");
        l.team_id = t.at(r, "team_id");
        l.competition_id = t.at(r, "competition_id");
        l.sum_pcr_delta = std::stod(t.at(r, "sum_pcr_delta"));
        l.effective_minutes = std::stod(t.at(r, "effective_minutes"));
        l.pcr = std::stod(t.at(r, "pcr"));
        l.duels_aerial = std::stoll(t.at(r, "duels_aerial"));
        l.duel_wins_aerial = std::stoll(t.at(r, "duel_wins_aerial"));
        l.duels_ground = std::stoll(t.at(r, "duels_ground"));
        l.duel_wins_ground = std::stoll(t.at(r, "duel_wins_ground"));
        l.xg_sum = std::stod(t.at(r, "xg_sum"));
        l.goals = std::stoll(t.at(r, "goals"));
        l.shots = std::stoll(t.at(r, "shots"));
        l.passes = std::stoll(t.at(r, "passes"));
        l.carries = std::stoll(t.at(r, "carries"));
        l.matches = std::stoll(t.at(r, "matches"));
        l.team_xg_on_pitch = std::stod(t.at(r, "team_xg_on_pitch"));
        lines.push_back(std::move(l));
    }
    return lines;
}

void stage_pcr(Workspace& ws, const StageOptions& options) {
    LoadedEvents le = load_events(ws);
    XgModelPair pair = load_xg(ws);
    CsvTable rewards_csv = ws.read_csv("rewards.csv", "rewards");
    auto meta = load_matches(ws);
    auto players = load_players(ws);

    std::vector<RewardRecord> rewards;
    for (std::size_t r = 0; r < rewards_csv.rows.size(); ++r) {
        RewardRecord rec;
        rec.match_id = rewards_csv.at(r, "match_id");
        rec.event_index = std::stoll(rewards_csv.at(r, "event_index"));
        rec.player_id = rewards_csv.at(r, "player_id");
        rec.delta_epv = std::stod(rewards_csv.at(r, "delta_epv"));
        rewards.push_back(std::move(rec));
    }

    std::vector<DuelOutcomeRecord> duel_records;
    for (const auto& view : le.annotated) {
        auto recs = resolve_duels(view);
        duel_records.insert(duel_records.end(), recs.begin(), recs.end());
    }

    const auto by_event = xg_by_event(pair, le.filtered);
    const auto xg_tables = xg_tables_for(le.annotated, by_event);
    auto lines = aggregate_season_lines(le.annotated, xg_tables, rewards, duel_records,
                                        match_index(meta));

    CsvTable lines_csv;
    lines_csv.header = {"player_id", "season_id", "team_id", "competition_id", "sum_pcr_delta",
                        "effective_minutes", "pcr", "duels_aerial", "duel_wins_aerial",
                        "duels_ground", "duel_wins_ground", "xg_sum", "goals", "shots",
                        "passes", "carries", "matches", "team_xg_on_pitch"};
    for (const auto& l : lines) {
        lines_csv.rows.push_back(
            {l.player_id, l.season_id, l.team_id, l.competition_id, format_full(l.sum_pcr_delta),
             format_full(l.effective_minutes), format_full(l.pcr),
             std::to_string(l.duels_aerial), std::to_string(l.duel_wins_aerial),
             std::to_string(l.duels_ground), std::to_string(l.duel_wins_ground),
             format_full(l.xg_sum), std::to_string(l.goals), std::to_string(l.shots),
             std::to_string(l.passes), std::to_string(l.carries), std::to_string(l.matches),
             format_full(l.team_xg_on_pitch)});
    }
    ws.write_csv("season_lines.csv", std::move(lines_csv));

    std::vector<SeasonLine> selected;
    for (const auto& l : lines) {
        if (options.season.empty() || l.season_id == options.season) selected.push_back(l);
    }
    const double min_minutes = options.min_minutes.value_or(ws.config.min_minutes_rank);
    CsvTable rank_csv;
    rank_csv.header = {"rank", "player", "team", "competition", "season", "pcr", "eff_time"};
    for (const auto& row : season_rankings(selected, min_minutes, names_of(players))) {
        rank_csv.rows.push_back({std::to_string(row.rank), row.player, row.team, row.competition,
                                 row.season, format_fixed(row.pcr, 4),
                                 format_fixed(row.eff_time, 0)});
    }
    ws.write_csv("rankings.csv", std::move(rank_csv));
}

void stage_report(Workspace& ws, const StageOptions& options) {
    if (options.player.empty()) {
        throw ValidationError("duel-report: --player is required");
    }
    LoadedEvents le = load_events(ws);
    EpvModelSet models = load_epv(ws);
    RatingPipelineResult rating = load_rating_state(ws);
    auto players = load_players(ws);

    auto rows = long_pass_duel_report(le.filtered, options.player, models, rating.snapshots,
                                      options.min_distance.value_or(40.0),
                                      options.min_forward_gain.value_or(10.0),
                                      names_of(players));
    CsvTable table;
    table.header = {"player", "duel", "duels", "saved", "apriori", "win_duel",
                    "rating", "opp_rating", "duel_epv", "epv_ind_duel"};
    for (const auto& r : rows) {
        table.rows.push_back({r.player, r.duel, std::to_string(r.duels),
                              format_fixed(r.saved_pct, 4), format_fixed(r.apriori_pct, 4),
                              format_fixed(r.win_duel_pct, 4), format_fixed(r.rating, 0),
                              format_fixed(r.opp_rating, 0), format_fixed(r.duel_epv, 4),
                              format_fixed(r.epv_ind_duel, 4)});
    }
    ws.write_csv("duel_report.csv", std::move(table));
}

ForecastConfig forecast_config_of(const PipelineConfig& c) {
    ForecastConfig fc;
    fc.league_top_n = c.league_top_n;
    fc.league_top_n_override = c.league_top_n_override;
    fc.min_minutes_data = c.min_minutes_data;
    fc.stay_gbt = c.stay_gbt;
    fc.pcr_gbt = c.pcr_gbt;
    return fc;
}

ForecastDataset dataset_for(Workspace& ws) {
    LoadedEvents le = load_events(ws);
    auto meta = load_matches(ws);
    auto players = load_players(ws);
    auto lines = season_lines_from_csv(ws.read_csv("season_lines.csv", "pcr"));
    auto results = results_from_events(le, meta);
    ForecastDataset data =
        build_forecast_dataset(lines, player_index(players), results, forecast_config_of(ws.config));

    // Duel-skill features for season S come from the rating state frozen at
    // the end of S (= start of the predicted season), never later.
    RatingPipelineResult rating = load_rating_state(ws);
    for (const auto& [season, by_kind] : rating.season_end_states) {
        auto ait = by_kind.find(DuelKind::aerial);
        if (ait != by_kind.end()) {
            for (const auto& [player, st] : ait->second) {
                data.duel_rating_aerial[{player, season}] = glicko_display(st.mu);
            }
        }
        auto git = by_kind.find(DuelKind::ground);
        if (git != by_kind.end()) {
            for (const auto& [player, st] : git->second) {
                data.duel_rating_ground[{player, season}] = glicko_display(st.mu);
            }
        }
    }
    return data;
}

void stage_forecast(Workspace& ws, const StageOptions& options) {
    ForecastDataset data = dataset_for(ws);

    CsvTable clubs_csv;
    clubs_csv.header = {"season", "team", "league", "rating"};
    for (const auto& season : data.clubs.seasons) {
        for (const auto& [team, league] : data.clubs.team_league.at(season)) {
            clubs_csv.rows.push_back({season, team, league,
                                      format_fixed(data.clubs.rating_at_start(season, team), 0)});
        }
    }
    ws.write_csv("club_ratings.csv", std::move(clubs_csv));

    auto rows = build_training_rows(data);
    ForecastModels models;
    models.stay = train_stay_model(rows, data.config);
    models.pcr = train_pcr_model(rows, data.config);
    ws.write_model("stay_model.json", models.stay);
    ws.write_model("pcr_model.json", models.pcr);

    if (!options.destination.empty()) {
        const std::string season =
            options.season.empty() ? data.seasons.back() : options.season;
        auto shortlist = build_shortlist(data, models, season, options.destination);
        CsvTable table;
        table.header = {"rank", "player", "team", "age", "pcr", "pcr_pred", "pcr_adj",
                        "stay_proba"};
        for (const auto& r : shortlist) {
            table.rows.push_back({std::to_string(r.rank), r.player, r.team,
                                  format_fixed(r.age, 1), format_fixed(r.pcr, 4),
                                  format_fixed(r.pcr_pred, 4), format_fixed(r.pcr_adj, 4),
                                  format_fixed(r.stay_proba, 4)});
        }
        ws.write_csv("shortlist.csv", std::move(table));
    }
}

void stage_evaluate(Workspace& ws) {
    ForecastDataset data = dataset_for(ws);
    ForecastModels models;
    models.stay = ws.read_model("stay_model.json", "forecast");
    models.pcr = ws.read_model("pcr_model.json", "forecast");

    EvalReport report = evaluate_forecast(data, models);
    CsvTable table;
    table.header = {"method", "data_sample", "n_100", "rmse_100", "mae_100",
                    "n_1000", "rmse_1000", "mae_1000"};
    auto emit = [&](const char* method, const std::vector<EvalGroupMetrics>& groups) {
        for (const auto& g : groups) {
            table.rows.push_back({method, g.sample, std::to_string(g.n_100),
                                  format_fixed(g.rmse_100, 4), format_fixed(g.mae_100, 4),
                                  std::to_string(g.n_1000), format_fixed(g.rmse_1000, 4),
                                  format_fixed(g.mae_1000, 4)});
        }
    };
    emit("baseline", report.baseline);
    emit("model", report.model);
    for (const auto& note : report.notes) table.comments.push_back(note);
    ws.write_csv("eval_report.csv", std::move(table));
}

}  // namespace

void run_pipeline(const PipelineConfig& config, Stage stage, const std::string& workdir,
                  const StageOptions& options) {
    fs::create_directories(workdir);
    Workspace ws{workdir, config, config_hash(config), {}, {}};

    switch (stage) {
        case Stage::ingest: stage_ingest(ws, options); break;
        case Stage::train_xg: stage_train_xg(ws); break;
        case Stage::label: stage_label(ws); break;
        case Stage::rate: stage_rate(ws); break;
        case Stage::train_epv: stage_train_epv(ws); break;
        case Stage::rewards: stage_rewards(ws); break;
        case Stage::pcr: stage_pcr(ws, options); break;
        case Stage::report: stage_report(ws, options); break;
        case Stage::forecast: stage_forecast(ws, options); break;
        case Stage::evaluate: stage_evaluate(ws); break;
    }
    // persist the effective config only after the stage succeeds, so a
    // failed run with overrides cannot poison the stored configuration
    write_text_file(ws.path("config.json"), config_to_json(config));
    ws.finish_manifest(stage);

    if (!options.out.empty()) {
        static const std::map<Stage, const char*> main_table = {
            {Stage::label, "labels.csv"},       {Stage::rewards, "rewards.csv"},
            {Stage::pcr, "rankings.csv"},       {Stage::report, "duel_report.csv"},
            {Stage::forecast, "shortlist.csv"}, {Stage::evaluate, "eval_report.csv"},
        };
        auto it = main_table.find(stage);
        if (it != main_table.end() && fs::exists(ws.path(it->second))) {
            write_text_file(options.out, read_text_file(ws.path(it->second)));
        }
    }
}

void run_all_stages(const PipelineConfig& config, const std::string& workdir,
                    const StageOptions& options) {
    StageOptions o = options;
    o.out.clear();  // per-stage table copies make no sense for a full run
    run_pipeline(config, Stage::ingest, workdir, o);
    run_pipeline(config, Stage::train_xg, workdir, o);
    run_pipeline(config, Stage::label, workdir, o);
    run_pipeline(config, Stage::rate, workdir, o);
    run_pipeline(config, Stage::train_epv, workdir, o);
    run_pipeline(config, Stage::rewards, workdir, o);
    run_pipeline(config, Stage::pcr, workdir, o);
    if (!o.player.empty()) run_pipeline(config, Stage::report, workdir, o);
    run_pipeline(config, Stage::forecast, workdir, o);
    run_pipeline(config, Stage::evaluate, workdir, o);
}

}  // namespace epv
