#pragma once

#include <map>
#include <optional>
#include <string>

#include "epv/duels.hpp"
#include "epv/ingest.hpp"
#include "epv/learners.hpp"
#include "epv/pv.hpp"

namespace epv {

/// Every knob of a pipeline run. The FNV-1a hash of the canonical JSON form
/// stamps all artifacts; stages refuse inputs produced under a different
/// configuration.
struct PipelineConfig {
    std::uint64_t seed = 42;
    double gamma = 0.95;
    double horizon_s = 300.0;
    double stoppage_gap_s = 15.0;
    PvVariant variant = PvVariant::risk;
    double glicko_tau = 0.5;
    double glicko_sigma0 = 0.06;
    AdvantageMode advantage_mode = AdvantageMode::per_duel;
    GbtConfig xg_gbt{120, 4, 0.1, 1.0, 0};
    GbtConfig context_gbt{80, 3, 0.1, 1.0, 0};
    GbtConfig epv_gbt{120, 4, 0.1, 1.0, 0};
    GbtConfig stay_gbt{120, 3, 0.1, 1.0, 0};
    GbtConfig pcr_gbt{160, 4, 0.08, 1.0, 0};
    double min_minutes_rank = 1000.0;
    double min_minutes_data = 100.0;
    int league_top_n = 10;
    std::map<std::string, int> league_top_n_override;
};

std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& text);
std::string config_hash(const PipelineConfig& config);

/// Load workdir/config.json when present (otherwise defaults), then persist
/// the effective config back. Overrides are applied by the CLI before the
/// call.
PipelineConfig load_or_init_config(const std::string& workdir,
                                   const std::optional<PipelineConfig>& override_config);

enum class Stage { ingest, train_xg, label, rate, train_epv, rewards, pcr, report, forecast, evaluate };

std::string stage_name(Stage s);

struct StageOptions {
    std::string input;         // ingest: raw event stream path
    std::string players_file;  // optional sidecars
    std::string matches_file;
    EventFormat format = EventFormat::jsonl;
    std::string player;       // report: the passer
    std::string destination;  // forecast: what-if destination team
    std::string season;       // pcr: restrict rankings to one season
    std::string out;          // optional copy of the stage's main table
    std::optional<double> min_minutes;      // pcr: ranking threshold override
    std::optional<double> min_distance;     // report: long-pass threshold
    std::optional<double> min_forward_gain; // report: forward-gain threshold
};

/// Run one stage against a work directory. Missing upstream artifacts raise
/// DependencyError naming the stage to run first; artifacts written under a
/// different config hash raise DependencyError as well.
void run_pipeline(const PipelineConfig& config, Stage stage, const std::string& workdir,
                  const StageOptions& options = {});

/// Convenience: run every stage in dependency order (report and shortlist
/// steps only when their options are set).
void run_all_stages(const PipelineConfig& config, const std::string& workdir,
                    const StageOptions& options = {});

std::uint64_t file_hash(const std::string& path);

}  // namespace epv
