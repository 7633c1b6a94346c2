#include "epv/xg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "epv/error.hpp"
#include "epv/geometry.hpp"

namespace epv {

namespace {

// prev-action one-hot buckets for open-play shots
const std::vector<std::string> kPrevBuckets = {
    "prev_pass", "prev_carry", "prev_dribble", "prev_shot",
    "prev_set_piece", "prev_aerial_duel", "prev_ground_duel",
};

int prev_bucket(const ActionKind& a) {
    if (is_duel(a)) {
        return std::get<DuelKind>(a) == DuelKind::aerial ? 5 : 6;
    }
    if (!is_control(a)) return -1;
    switch (std::get<ControlKind>(a)) {
        case ControlKind::pass: return 0;
        case ControlKind::carry: return 1;
        case ControlKind::dribble: return 2;
        case ControlKind::shot: return 3;
        default: return 4;  // restart kinds
    }
}

}  // namespace

ShotFeatures extract_shot_features(const PossessionView& view, std::size_t i) {
    if (i >= view.events.size() || !is_shot(view.events[i].ev.action)) {
        throw std::invalid_argument("extract_shot_features: event is not a shot");
    }
    const auto& ae = view.events[i];
    ShotFeatures f;
    f.x = ae.ev.x;
    f.y = ae.ev.y;
    f.distance_m = distance_to_goal(ae.ev.x, ae.ev.y);
    f.angle_rad = goal_angle(ae.ev.x, ae.ev.y);
    if (ae.ev.set_piece) {
        f.set_piece_type = ae.ev.set_piece;
        return f;  // set pieces are independent of what came before
    }
    f.body_part = ae.ev.body_part;
    if (i > 0 && view.events[i - 1].ev.half == ae.ev.half) {
        const auto& prev = view.events[i - 1];
        f.prev_action = prev.ev.action;
        f.prev_dx = ae.ev.x - prev.ev.x;
        f.prev_dy = ae.ev.y - prev.ev.y;
        f.time_since_prev_s = ae.t - prev.t;
        f.has_prev = true;
    }
    return f;
}

const std::vector<std::string>& xg_open_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {"x", "y", "dist", "angle",
                                      "body_foot", "body_head", "body_other"};
        for (const auto& b : kPrevBuckets) n.push_back(b);
        n.push_back("prev_dx");
        n.push_back("prev_dy");
        n.push_back("time_since_prev_s");
        n.push_back("has_prev");
        return n;
    }();
    return names;
}

const std::vector<std::string>& xg_set_piece_feature_names() {
    static const std::vector<std::string> names = {
        "x", "y", "dist", "angle",
        "sp_penalty", "sp_free_kick", "sp_corner", "sp_goal_kick", "sp_throw_in", "sp_kickoff",
    };
    return names;
}

std::vector<double> xg_open_feature_vector(const ShotFeatures& f) {
    std::vector<double> v = {f.x, f.y, f.distance_m, f.angle_rad};
    v.push_back(f.body_part == BodyPart::foot ? 1.0 : 0.0);
    v.push_back(f.body_part == BodyPart::head ? 1.0 : 0.0);
    v.push_back(f.body_part == BodyPart::other ? 1.0 : 0.0);
    int bucket = f.prev_action ? prev_bucket(*f.prev_action) : -1;
    for (std::size_t k = 0; k < kPrevBuckets.size(); ++k) {
        v.push_back(static_cast<int>(k) == bucket ? 1.0 : 0.0);
    }
    v.push_back(f.has_prev ? f.prev_dx : 0.0);
    v.push_back(f.has_prev ? f.prev_dy : 0.0);
    v.push_back(f.has_prev ? f.time_since_prev_s : 0.0);
    v.push_back(f.has_prev ? 1.0 : 0.0);
    return v;
}

std::vector<double> xg_set_piece_feature_vector(const ShotFeatures& f) {
    std::vector<double> v = {f.x, f.y, f.distance_m, f.angle_rad, 0, 0, 0, 0, 0, 0};
    if (f.set_piece_type) {
        v[4 + static_cast<std::size_t>(*f.set_piece_type)] = 1.0;
    }
    return v;
}

void audit_feature_names(const std::vector<std::string>& names) {
    static const char* kForbidden[] = {"team", "score", "competition", "league", "player"};
    for (const auto& n : names) {
        for (const char* bad : kForbidden) {
            if (n.find(bad) != std::string::npos) {
                throw ValidationError("skill-agnostic model feature '" + n +
                                      "' leaks forbidden information ('" + bad + "')");
            }
        }
    }
}

XgModelPair train_xg(const std::vector<PossessionView>& views, const XgTrainConfig& config) {
    audit_feature_names(xg_open_feature_names());
    audit_feature_names(xg_set_piece_feature_names());

    std::vector<TrainingRow> open_rows, sp_rows;
    for (const auto& view : views) {
        for (std::size_t i = 0; i < view.events.size(); ++i) {
            if (!is_shot(view.events[i].ev.action)) continue;
            const ShotFeatures f = extract_shot_features(view, i);
            TrainingRow row;
            row.target = view.events[i].ev.is_goal ? 1.0 : 0.0;
            row.player_id = view.events[i].ev.player_id;
            if (f.set_piece_type) {
                row.features = xg_set_piece_feature_vector(f);
                sp_rows.push_back(std::move(row));
            } else {
                row.features = xg_open_feature_vector(f);
                open_rows.push_back(std::move(row));
            }
        }
    }

    auto train_one = [&](std::vector<TrainingRow>& rows, const std::vector<std::string>& names,
                         const char* which) {
        if (rows.empty()) {
            throw ValidationError(std::string("train_xg: no ") + which + " shots in input");
        }
        bool has0 = false, has1 = false;
        for (const auto& r : rows) (r.target == 1.0 ? has1 : has0) = true;
        if (!has0 || !has1) {
            throw ValidationError(std::string("train_xg: ") + which +
                                  " shots are single-class; cannot fit a classifier");
        }
        assign_per_player_weights(rows);
        return train_gbt(rows, Objective::weighted_logloss(), config.gbt, names);
    };

    XgModelPair pair;
    pair.open_play = train_one(open_rows, xg_open_feature_names(), "open-play");
    pair.set_piece = train_one(sp_rows, xg_set_piece_feature_names(), "set-piece");
    return pair;
}

double xg_of(const XgModelPair& pair, const PossessionView& view, std::size_t i) {
    const ShotFeatures f = extract_shot_features(view, i);
    if (f.set_piece_type) {
        return pair.set_piece.predict(xg_set_piece_feature_vector(f));
    }
    return pair.open_play.predict(xg_open_feature_vector(f));
}

XgTable assign_xg(const XgModelPair& pair, const PossessionView& view) {
    XgTable xg(view.events.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < view.events.size(); ++i) {
        if (is_shot(view.events[i].ev.action)) xg[i] = xg_of(pair, view, i);
    }
    return xg;
}

void save_xg_pair(const XgModelPair& pair, const std::string& prefix) {
    save_model(pair.open_play, prefix + ".open.json");
    save_model(pair.set_piece, prefix + ".set_piece.json");
}

XgModelPair load_xg_pair(const std::string& prefix) {
    XgModelPair pair;
    pair.open_play = load_model(prefix + ".open.json");
    pair.set_piece = load_model(prefix + ".set_piece.json");
    return pair;
}

}  // namespace epv
