#pragma once

#include <map>
#include <string>
#include <vector>

#include "epv/duels.hpp"
#include "epv/events.hpp"
#include "epv/learners.hpp"
#include "epv/pv.hpp"

namespace epv {

/// The six value models: open-play and set-piece control actions, plus
/// average (skill-free) and individual (rating-aware) models per duel kind.
struct EpvModelSet {
    Model control_open;
    Model control_set_piece;
    Model duel_avg_aerial;
    Model duel_avg_ground;
    Model duel_ind_aerial;
    Model duel_ind_ground;
};

using SnapshotMap = std::map<std::pair<std::string, std::int64_t>, DuelRatingSnapshot>;

const std::vector<std::string>& epv_control_open_feature_names();
const std::vector<std::string>& epv_control_set_piece_feature_names();
const std::vector<std::string>& epv_duel_avg_feature_names();
const std::vector<std::string>& epv_duel_ind_feature_names();

/// Feature vector for a control action or duel on the filtered view.
/// Control actions route open-play vs set-piece; duels produce the avg or
/// ind layout (ind adds the win probability and both display ratings from
/// the duel's rating snapshot). Throws std::invalid_argument for Other-kind
/// events.
std::vector<double> extract_epv_features(const PossessionView& view, std::size_t i,
                                         const SnapshotMap* snapshots, bool individual);

struct EpvTrainConfig {
    GbtConfig gbt;
};

/// Train all six models from risk-labeled control actions and Eq-style duel
/// targets. Throws ValidationError naming any model whose training set is
/// empty.
EpvModelSet train_epv(const std::vector<PossessionView>& filtered_views,
                      const std::vector<std::vector<LabeledAction>>& labels,
                      const SnapshotMap& snapshots, const EpvTrainConfig& config = {});

/// Model prediction for control action i, clamped to [-1, 1].
double epv_control(const EpvModelSet& models, const PossessionView& view, std::size_t i);

/// Duel predictions are produced from the recorded participant's
/// perspective; the sign flips when the reference team is the other side.
/// Clamped to [-1, 1].
double epv_duel_avg(const EpvModelSet& models, const PossessionView& view, std::size_t i,
                    const SnapshotMap& snapshots, const std::string& reference_team);
double epv_duel_ind(const EpvModelSet& models, const PossessionView& view, std::size_t i,
                    const SnapshotMap& snapshots, const std::string& reference_team);

void save_epv_models(const EpvModelSet& models, const std::string& dir);
EpvModelSet load_epv_models(const std::string& dir);

}  // namespace epv
