#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epv/events.hpp"

namespace epv {

enum class PvVariant { basic, decay, risk };

std::string pv_variant_name(PvVariant v);
std::optional<PvVariant> parse_pv_variant(const std::string& name);

struct PvConfig {
    double gamma = 0.95;      // per-effective-second decay, in (0, 1]
    double horizon_s = 300.0; // lookahead cutoff for the risk variant
    PvVariant variant = PvVariant::risk;
};

/// One training row: an event with its possession-value target.
struct LabeledAction {
    std::size_t view_index = 0;     // index into the filtered view
    std::string match_id;
    std::int64_t event_index = 0;
    enum class Kind { control, duel } kind = Kind::control;
    double pv = 0.0;
    std::optional<double> epv;      // model prediction, filled downstream
};

/// xG per view position; NaN for non-shots. See xg.hpp for assignment from
/// a trained model pair.
using XgTable = std::vector<double>;

/// Future same-possession xG accumulation:
///   1 - prod over shots j with t_j >= t_i and s_j = s_i of (1 - xG_j).
/// Event i must be a control action (std::invalid_argument otherwise) and
/// every shot in the view must carry xG.
double pv_basic(const PossessionView& view, std::span<const double> xg, std::size_t i);

/// Decay variant: each factor becomes gamma^(t_j - t_i) * xG_j. Exactly
/// pv_basic at gamma = 1.
double pv_decay(const PossessionView& view, std::span<const double> xg, std::size_t i,
                double gamma);

/// Risk variant: (team term) - (opponent term), each a decayed 1 - prod over
/// every future shot of that side in the same half within horizon_s,
/// crossing possession boundaries.
double pv_risk(const PossessionView& view, std::span<const double> xg, std::size_t i,
               double gamma, double horizon_s);

/// Duel target: +/- the value of the first control action after the duel
/// chain (sign per the duel's own team versus that control action's team).
/// nullopt when no control action follows in the half.
std::optional<double> pv_duel(const PossessionView& view, std::span<const double> pv_of_controls,
                              std::size_t i);

/// Label every control action and symmetrical duel in a filtered view.
/// Duels that cannot be labeled (no later control in the half) are skipped.
std::vector<LabeledAction> label_dataset(const PossessionView& view, std::span<const double> xg,
                                         const PvConfig& config);

}  // namespace epv
