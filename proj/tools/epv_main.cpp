// epv: event-stream possession-value pipeline.
//
// Typical flow:
//   epv synth --spec league.spec --out data/events.jsonl
//   epv ingest --format jsonl --input data/events.jsonl --workdir work
//   epv train-xg --workdir work
//   epv label --gamma 0.95 --variant risk --horizon 300 --workdir work
//   epv rate-duels --workdir work --kind aerial --out ratings.csv
//   epv train-epv --workdir work
//   epv rewards --workdir work --out rewards.csv
//   epv pcr --workdir work --min-minutes 1000 --out table.csv
//   epv duel-report --workdir work --player P0001
//   epv forecast --workdir work --destination T01 --out shortlist.csv
//   epv evaluate --workdir work --out report.csv
//
// Exit codes: 0 success, 2 validation error, 3 missing/stale dependency.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "epv/csv.hpp"
#include "epv/error.hpp"
#include "epv/ingest.hpp"
#include "epv/pipeline.hpp"
#include "epv/testkit.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string workdir = "epv_work";
    std::string config_file;
    bool has_seed = false;
    std::uint64_t seed = 42;
    bool has_gamma = false;
    double gamma = 0.95;
    bool has_variant = false;
    std::string variant = "risk";
    bool has_horizon = false;
    double horizon = 300.0;
    bool has_stoppage = false;
    double stoppage = 15.0;
    bool has_advantage = false;
    std::string advantage = "per-duel";
    bool has_top_n = false;
    int top_n = 10;
    bool has_min_minutes_data = false;
    double min_minutes_data = 100.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--workdir", args.workdir, "pipeline work directory");
    cmd->add_option("--config", args.config_file, "config JSON to start from");
    cmd->add_option("--seed", args.seed, "master random seed")
        ->each([&](const std::string&) { args.has_seed = true; });
    cmd->add_option("--gamma", args.gamma, "decay factor per effective second")
        ->each([&](const std::string&) { args.has_gamma = true; });
    cmd->add_option("--variant", args.variant, "pv target variant: basic|decay|risk")
        ->each([&](const std::string&) { args.has_variant = true; });
    cmd->add_option("--horizon", args.horizon, "risk lookahead in effective seconds")
        ->each([&](const std::string&) { args.has_horizon = true; });
    cmd->add_option("--stoppage-gap", args.stoppage, "effective-time gap cap in seconds")
        ->each([&](const std::string&) { args.has_stoppage = true; });
    cmd->add_option("--advantage", args.advantage, "advantage mode: per-duel|global-mean")
        ->each([&](const std::string&) { args.has_advantage = true; });
    cmd->add_option("--league-top-n", args.top_n, "clubs counted into a league rating")
        ->each([&](const std::string&) { args.has_top_n = true; });
    cmd->add_option("--min-minutes-data", args.min_minutes_data,
                    "minutes needed for a player-season to enter the data")
        ->each([&](const std::string&) { args.has_min_minutes_data = true; });
}

epv::PipelineConfig effective_config(const CommonArgs& args) {
    std::optional<epv::PipelineConfig> base;
    if (!args.config_file.empty()) {
        base = epv::config_from_json(epv::read_text_file(args.config_file));
    } else {
        const std::string stored = args.workdir + "/config.json";
        if (fs::exists(stored)) base = epv::config_from_json(epv::read_text_file(stored));
    }
    epv::PipelineConfig config = base.value_or(epv::PipelineConfig{});
    if (args.has_seed) config.seed = args.seed;
    if (args.has_gamma) config.gamma = args.gamma;
    if (args.has_variant) {
        auto v = epv::parse_pv_variant(args.variant);
        if (!v) throw epv::ValidationError("unknown --variant '" + args.variant + "'");
        config.variant = *v;
    }
    if (args.has_horizon) config.horizon_s = args.horizon;
    if (args.has_stoppage) config.stoppage_gap_s = args.stoppage;
    if (args.has_advantage) {
        if (args.advantage == "per-duel") config.advantage_mode = epv::AdvantageMode::per_duel;
        else if (args.advantage == "global-mean")
            config.advantage_mode = epv::AdvantageMode::global_mean;
        else throw epv::ValidationError("unknown --advantage '" + args.advantage + "'");
    }
    if (args.has_top_n) config.league_top_n = args.top_n;
    if (args.has_min_minutes_data) config.min_minutes_data = args.min_minutes_data;
    config.xg_gbt.seed = config.seed;
    config.context_gbt.seed = config.seed;
    config.epv_gbt.seed = config.seed;
    config.stay_gbt.seed = config.seed;
    config.pcr_gbt.seed = config.seed;
    return config;
}

int run_synth(const std::string& spec_path, const std::string& out,
              std::optional<std::uint64_t> seed) {
    epv::testkit::SynthLeagueSpec spec;
    if (!spec_path.empty()) {
        spec = epv::testkit::parse_league_spec(epv::read_text_file(spec_path));
    }
    if (seed) spec.seed = *seed;
    const auto league = epv::testkit::generate(spec);

    const fs::path out_path(out);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    epv::write_text_file(out, epv::events_to_jsonl(league.matches));
    const fs::path dir = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
    epv::write_text_file((dir / "players.jsonl").string(),
                         epv::players_to_jsonl(league.players));
    epv::write_text_file((dir / "matches.jsonl").string(),
                         epv::matches_to_jsonl(league.match_meta));
    epv::write_text_file((dir / "truth.json").string(), league.truth_json());
    epv::write_text_file((dir / "league.spec").string(),
                         epv::testkit::league_spec_to_string(spec));
    std::size_t n_events = 0;
    for (const auto& m : league.matches) n_events += m.events.size();
    std::cout << "synth: " << league.matches.size() << " matches, " << n_events << " events -> "
              << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"expected possession value pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic league");
    std::string synth_spec, synth_out = "events.jsonl";
    std::uint64_t synth_seed = 0;
    bool synth_has_seed = false;
    synth->add_option("--spec", synth_spec, "league spec file (key = value lines)");
    synth->add_option("--out", synth_out, "output events.jsonl path");
    synth->add_option("--seed", synth_seed, "override the seed from the league spec file")
        ->each([&](const std::string&) { synth_has_seed = true; });

    struct Cmd {
        CLI::App* app = nullptr;
        CommonArgs common;
        epv::StageOptions options;
        std::string format = "jsonl";
        double min_minutes = -1.0;
        double min_distance = -1.0;
        double min_dy = -1.0;
        std::string models_dir;
        std::string kind = "aerial";
    };
    std::map<std::string, Cmd> cmds;
    auto make = [&](const std::string& name, const std::string& help) -> Cmd& {
        Cmd& c = cmds[name];
        c.app = app.add_subcommand(name, help);
        add_common(c.app, c.common);
        c.app->add_option("--out", c.options.out, "copy the stage's main table here");
        return c;
    };

    {
        Cmd& c = make("ingest", "validate and normalize an event stream");
        c.app->add_option("--input", c.options.input, "events file")->required();
        c.app->add_option("--format", c.format, "jsonl|csv");
        c.app->add_option("--players", c.options.players_file, "players metadata jsonl");
        c.app->add_option("--matches", c.options.matches_file, "match metadata jsonl");
    }
    {
        Cmd& c = make("train-xg", "train the two expected-goals models");
        c.app->add_option("--input", c.options.input, "events file (runs ingest first)");
    }
    make("label", "compute possession-value targets");
    {
        Cmd& c = make("rate-duels", "context models and duel ratings");
        c.app->add_option("--kind", c.kind, "aerial|ground (selects the --out table)");
    }
    make("train-epv", "train the six value models");
    {
        Cmd& c = make("rewards", "per-event credit from the scenario rules");
        c.app->add_option("--models", c.models_dir, "external value-model directory");
    }
    {
        Cmd& c = make("pcr", "season aggregates and ranking table");
        c.app->add_option("--season", c.options.season, "restrict rankings to one season");
        c.app->add_option("--min-minutes", c.min_minutes, "ranking minutes threshold");
    }
    {
        Cmd& c = make("duel-report", "long-pass duel analysis for one passer");
        c.app->add_option("--player", c.options.player, "the passer")->required();
        c.app->add_option("--min-distance", c.min_distance, "pass distance threshold (m)");
        c.app->add_option("--min-dy", c.min_dy, "forward-gain threshold (m)");
    }
    {
        Cmd& c = make("forecast", "club ratings, stay/PCR models, what-if shortlist");
        c.app->add_option("--season", c.options.season, "prediction base season");
        c.app->add_option("--destination", c.options.destination, "what-if destination team");
    }
    make("evaluate", "baseline vs model error report");
    {
        Cmd& c = make("run", "run every stage in order");
        c.app->add_option("--input", c.options.input, "events file")->required();
        c.app->add_option("--format", c.format, "jsonl|csv");
        c.app->add_option("--players", c.options.players_file, "players metadata jsonl");
        c.app->add_option("--matches", c.options.matches_file, "match metadata jsonl");
        c.app->add_option("--player", c.options.player, "duel-report passer");
        c.app->add_option("--destination", c.options.destination, "shortlist destination team");
        c.app->add_option("--season", c.options.season, "season for pcr/forecast tables");
        c.app->add_option("--min-minutes", c.min_minutes, "ranking minutes threshold");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return run_synth(synth_spec, synth_out,
                             synth_has_seed ? std::optional<std::uint64_t>(synth_seed)
                                            : std::nullopt);
        }
        for (auto& [name, c] : cmds) {
            if (!c.app->parsed()) continue;
            epv::PipelineConfig config = effective_config(c.common);
            if (c.format == "csv") c.options.format = epv::EventFormat::csv;
            if (c.min_minutes >= 0.0) c.options.min_minutes = c.min_minutes;
            if (c.min_distance >= 0.0) c.options.min_distance = c.min_distance;
            if (c.min_dy >= 0.0) c.options.min_forward_gain = c.min_dy;

            if (name == "rewards" && !c.models_dir.empty()) {
                // adopt externally trained value models
                const std::string dst = c.common.workdir + "/epv_models";
                if (fs::absolute(c.models_dir) != fs::absolute(dst)) {
                    fs::create_directories(dst);
                    for (const auto& entry : fs::directory_iterator(c.models_dir)) {
                        fs::copy_file(entry.path(), fs::path(dst) / entry.path().filename(),
                                      fs::copy_options::overwrite_existing);
                    }
                }
            }

            static const std::map<std::string, epv::Stage> stage_of = {
                {"ingest", epv::Stage::ingest},     {"train-xg", epv::Stage::train_xg},
                {"label", epv::Stage::label},       {"rate-duels", epv::Stage::rate},
                {"train-epv", epv::Stage::train_epv}, {"rewards", epv::Stage::rewards},
                {"pcr", epv::Stage::pcr},           {"duel-report", epv::Stage::report},
                {"forecast", epv::Stage::forecast}, {"evaluate", epv::Stage::evaluate},
            };
            if (name == "run") {
                epv::run_all_stages(config, c.common.workdir, c.options);
                std::cout << "run: all stages complete in " << c.common.workdir << "\n";
                return 0;
            }
            const epv::Stage stage = stage_of.at(name);
            if (name == "train-xg") {
                if (!c.options.input.empty()) {
                    epv::run_pipeline(config, epv::Stage::ingest, c.common.workdir, c.options);
                }
                epv::StageOptions o = c.options;
                o.out.clear();
                epv::run_pipeline(config, stage, c.common.workdir, o);
                if (!c.options.out.empty()) {
                    // the pair serializes as <out>.open.json / <out>.set_piece.json
                    for (const char* suffix : {".open.json", ".set_piece.json"}) {
                        epv::write_text_file(
                            c.options.out + suffix,
                            epv::read_text_file(c.common.workdir + "/xg" + suffix));
                    }
                }
            } else if (name == "rate-duels" && !c.options.out.empty()) {
                epv::run_pipeline(config, stage, c.common.workdir, epv::StageOptions{c.options});
                const std::string table = c.kind == "ground" ? "ratings_ground.csv"
                                                             : "ratings_aerial.csv";
                epv::write_text_file(c.options.out,
                                     epv::read_text_file(c.common.workdir + "/" + table));
            } else {
                epv::run_pipeline(config, stage, c.common.workdir, c.options);
            }
            std::cout << name << ": done (workdir " << c.common.workdir << ")\n";
            return 0;
        }
    } catch (const epv::DependencyError& e) {
        std::cerr << "dependency error: " << e.what() << "\n";
        return 3;
    } catch (const epv::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
