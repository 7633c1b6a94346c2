#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epv/events.hpp"
#include "epv/learners.hpp"
#include "epv/pv.hpp"

namespace epv {

/// Skill-free description of a shot. Set-piece shots carry no
/// previous-event fields; open-play shots do.
struct ShotFeatures {
    double x = 0.0;
    double y = 0.0;
    double distance_m = 0.0;
    double angle_rad = 0.0;
    std::optional<SetPiece> set_piece_type;
    // open-play only
    std::optional<BodyPart> body_part;
    std::optional<ActionKind> prev_action;
    double prev_dx = 0.0;
    double prev_dy = 0.0;
    double time_since_prev_s = 0.0;
    bool has_prev = false;
};

struct XgModelPair {
    Model open_play;
    Model set_piece;
};

/// Throws std::invalid_argument when event i is not a shot.
ShotFeatures extract_shot_features(const PossessionView& view, std::size_t i);

const std::vector<std::string>& xg_open_feature_names();
const std::vector<std::string>& xg_set_piece_feature_names();

std::vector<double> xg_open_feature_vector(const ShotFeatures& f);
std::vector<double> xg_set_piece_feature_vector(const ShotFeatures& f);

/// Names that would leak player skill into a skill-agnostic model.
/// Throws ValidationError when any registered feature name matches.
void audit_feature_names(const std::vector<std::string>& names);

struct XgTrainConfig {
    GbtConfig gbt;
};

/// Train the set-piece and open-play models on every shot found in the
/// views, with inverse player-frequency weights and the weighted log-loss.
/// Throws ValidationError when either model's shot set is empty or
/// single-class.
XgModelPair train_xg(const std::vector<PossessionView>& views, const XgTrainConfig& config = {});

/// Probability for shot i; routes to the set-piece model iff the event has
/// a set_piece tag.
double xg_of(const XgModelPair& pair, const PossessionView& view, std::size_t i);

/// xG for every shot in the view (NaN elsewhere), ready for the pv ops.
XgTable assign_xg(const XgModelPair& pair, const PossessionView& view);

void save_xg_pair(const XgModelPair& pair, const std::string& prefix);
XgModelPair load_xg_pair(const std::string& prefix);

}  // namespace epv
