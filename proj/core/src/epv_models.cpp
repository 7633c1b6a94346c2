#include "epv/epv_models.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "epv/error.hpp"
#include "epv/xg.hpp"

namespace epv {

namespace {

// action-kind one-hot buckets for control actions
const std::vector<std::string> kKindBuckets = {"kind_pass", "kind_shot", "kind_dribble",
                                               "kind_carry", "kind_restart"};

int kind_bucket(ControlKind k) {
    switch (k) {
        case ControlKind::pass: return 0;
        case ControlKind::shot: return 1;
        case ControlKind::dribble: return 2;
        case ControlKind::carry: return 3;
        default: return 4;
    }
}

const std::vector<std::string> kPrevBuckets = {
    "prev_pass", "prev_carry", "prev_dribble", "prev_shot",
    "prev_restart", "prev_aerial_duel", "prev_ground_duel",
};

int prev_bucket(const ActionKind& a) {
    if (is_duel(a)) return std::get<DuelKind>(a) == DuelKind::aerial ? 5 : 6;
    if (!is_control(a)) return -1;
    switch (std::get<ControlKind>(a)) {
        case ControlKind::pass: return 0;
        case ControlKind::carry: return 1;
        case ControlKind::dribble: return 2;
        case ControlKind::shot: return 3;
        default: return 4;
    }
}

void push_body(std::vector<double>& v, const std::optional<BodyPart>& b) {
    v.push_back(b == BodyPart::foot ? 1.0 : 0.0);
    v.push_back(b == BodyPart::head ? 1.0 : 0.0);
    v.push_back(b == BodyPart::other ? 1.0 : 0.0);
}

void push_set_piece(std::vector<double>& v, const std::optional<SetPiece>& sp) {
    std::size_t base = v.size();
    for (int k = 0; k < 6; ++k) v.push_back(0.0);
    if (sp) v[base + static_cast<std::size_t>(*sp)] = 1.0;
}

double clamp_epv(double value) { return std::clamp(value, -1.0, 1.0); }

}  // namespace

const std::vector<std::string>& epv_control_open_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {"x", "y", "end_x", "end_y", "has_end"};
        for (const auto& b : kKindBuckets) n.push_back(b);
        n.insert(n.end(), {"body_foot", "body_head", "body_other"});
        for (const auto& b : kPrevBuckets) n.push_back(b);
        n.insert(n.end(), {"prev_x", "prev_y", "time_since_prev_s", "has_prev"});
        return n;
    }();
    return names;
}

const std::vector<std::string>& epv_control_set_piece_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {"x", "y", "end_x", "end_y", "has_end"};
        n.insert(n.end(), {"sp_penalty", "sp_free_kick", "sp_corner", "sp_goal_kick",
                           "sp_throw_in", "sp_kickoff"});
        for (const auto& b : kKindBuckets) n.push_back(b);
        n.insert(n.end(), {"body_foot", "body_head", "body_other"});
        return n;
    }();
    return names;
}

const std::vector<std::string>& epv_duel_avg_feature_names() {
    static const std::vector<std::string> names = {
        "duel_x", "duel_y", "pass_x", "pass_y", "has_pass",
        "pass_sp_penalty", "pass_sp_free_kick", "pass_sp_corner",
        "pass_sp_goal_kick", "pass_sp_throw_in", "pass_sp_kickoff",
        "n_opponents_nearby", "context_p",
    };
    return names;
}

const std::vector<std::string>& epv_duel_ind_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = epv_duel_avg_feature_names();
        n.insert(n.end(), {"win_prob", "own_rating", "opp_rating"});
        return n;
    }();
    return names;
}

std::vector<double> extract_epv_features(const PossessionView& view, std::size_t i,
                                         const SnapshotMap* snapshots, bool individual) {
    if (i >= view.events.size()) throw std::invalid_argument("extract_epv_features: bad index");
    const auto& ae = view.events[i];
    const Event& ev = ae.ev;
    if (is_other(ev.action)) {
        throw std::invalid_argument("extract_epv_features: Other-kind events have no value model");
    }

    if (is_control(ev.action)) {
        std::vector<double> v = {ev.x, ev.y, ev.end_x.value_or(-1.0), ev.end_y.value_or(-1.0),
                                 ev.end_x ? 1.0 : 0.0};
        if (ev.set_piece) {
            push_set_piece(v, ev.set_piece);
            for (std::size_t k = 0; k < kKindBuckets.size(); ++k) {
                v.push_back(static_cast<int>(k) == kind_bucket(std::get<ControlKind>(ev.action))
                                ? 1.0
                                : 0.0);
            }
            push_body(v, ev.body_part);
            return v;
        }
        for (std::size_t k = 0; k < kKindBuckets.size(); ++k) {
            v.push_back(static_cast<int>(k) == kind_bucket(std::get<ControlKind>(ev.action)) ? 1.0
                                                                                             : 0.0);
        }
        push_body(v, ev.body_part);
        const bool has_prev = i > 0 && view.events[i - 1].ev.half == ev.half;
        int bucket = has_prev ? prev_bucket(view.events[i - 1].ev.action) : -1;
        for (std::size_t k = 0; k < kPrevBuckets.size(); ++k) {
            v.push_back(static_cast<int>(k) == bucket ? 1.0 : 0.0);
        }
        v.push_back(has_prev ? view.events[i - 1].ev.x : -1.0);
        v.push_back(has_prev ? view.events[i - 1].ev.y : -1.0);
        v.push_back(has_prev ? ae.t - view.events[i - 1].t : 0.0);
        v.push_back(has_prev ? 1.0 : 0.0);
        return v;
    }

    // duel
    std::vector<double> v = {ev.x, ev.y};
    double pass_x = -1.0, pass_y = -1.0;
    bool has_pass = false;
    std::optional<SetPiece> pass_sp;
    if (i > 0 && view.events[i - 1].ev.half == ev.half && is_control(view.events[i - 1].ev.action)) {
        pass_x = view.events[i - 1].ev.x;
        pass_y = view.events[i - 1].ev.y;
        pass_sp = view.events[i - 1].ev.set_piece;
        has_pass = true;
    }
    v.insert(v.end(), {pass_x, pass_y, has_pass ? 1.0 : 0.0});
    push_set_piece(v, pass_sp);
    v.push_back(0.0);  // n_opponents_nearby: not observable from event data

    const DuelRatingSnapshot* snap = nullptr;
    if (snapshots) {
        auto it = snapshots->find({ev.match_id, ev.event_index});
        if (it != snapshots->end()) snap = &it->second;
    }
    v.push_back(snap ? snap->p_context : 0.5);
    if (individual) {
        // Unrated or unresolved duels fall back to neutral priors.
        v.push_back(snap ? snap->p_win_own : 0.5);
        v.push_back(snap ? glicko_display(snap->own.mu) : kGlickoBase);
        v.push_back(snap ? glicko_display(snap->opponent.mu) : kGlickoBase);
    }
    return v;
}

EpvModelSet train_epv(const std::vector<PossessionView>& filtered_views,
                      const std::vector<std::vector<LabeledAction>>& labels,
                      const SnapshotMap& snapshots, const EpvTrainConfig& config) {
    audit_feature_names(epv_duel_avg_feature_names());

    if (filtered_views.size() != labels.size()) {
        throw ValidationError("train_epv: views and labels are misaligned");
    }
    std::vector<TrainingRow> rows_open, rows_sp, rows_avg[2], rows_ind[2];
    for (std::size_t m = 0; m < filtered_views.size(); ++m) {
        const auto& view = filtered_views[m];
        for (const auto& la : labels[m]) {
            const auto& ev = view.events[la.view_index].ev;
            TrainingRow row;
            row.target = la.pv;
            row.player_id = ev.player_id;
            if (la.kind == LabeledAction::Kind::control) {
                row.features = extract_epv_features(view, la.view_index, nullptr, false);
                (ev.set_piece ? rows_sp : rows_open).push_back(std::move(row));
            } else {
                const auto kind = std::get<DuelKind>(ev.action);
                const std::size_t k = kind == DuelKind::aerial ? 0 : 1;
                row.features = extract_epv_features(view, la.view_index, &snapshots, false);
                rows_avg[k].push_back(row);
                row.features = extract_epv_features(view, la.view_index, &snapshots, true);
                rows_ind[k].push_back(std::move(row));
            }
        }
    }

    auto train_one = [&](std::vector<TrainingRow>& rows, const std::vector<std::string>& names,
                         const char* which) {
        if (rows.empty()) {
            throw ValidationError(std::string("train_epv: training set for ") + which +
                                  " is empty");
        }
        assign_per_player_weights(rows);
        return train_gbt(rows, Objective::weighted_mse(), config.gbt, names);
    };

    EpvModelSet set;
    set.control_open = train_one(rows_open, epv_control_open_feature_names(), "control_open");
    set.control_set_piece =
        train_one(rows_sp, epv_control_set_piece_feature_names(), "control_set_piece");
    set.duel_avg_aerial = train_one(rows_avg[0], epv_duel_avg_feature_names(), "duel_avg_aerial");
    set.duel_avg_ground = train_one(rows_avg[1], epv_duel_avg_feature_names(), "duel_avg_ground");
    set.duel_ind_aerial = train_one(rows_ind[0], epv_duel_ind_feature_names(), "duel_ind_aerial");
    set.duel_ind_ground = train_one(rows_ind[1], epv_duel_ind_feature_names(), "duel_ind_ground");
    return set;
}

double epv_control(const EpvModelSet& models, const PossessionView& view, std::size_t i) {
    const Event& ev = view.events.at(i).ev;
    if (!is_control(ev.action)) {
        throw std::invalid_argument("epv_control: event is not a control action");
    }
    const auto features = extract_epv_features(view, i, nullptr, false);
    const Model& model = ev.set_piece ? models.control_set_piece : models.control_open;
    return clamp_epv(model.predict(features));
}

namespace {

double epv_duel_impl(const Model& aerial, const Model& ground, const PossessionView& view,
                     std::size_t i, const SnapshotMap& snapshots, bool individual,
                     const std::string& reference_team) {
    const Event& ev = view.events.at(i).ev;
    if (!is_duel(ev.action)) throw std::invalid_argument("epv_duel: event is not a duel");
    const auto features = extract_epv_features(view, i, &snapshots, individual);
    const Model& model = std::get<DuelKind>(ev.action) == DuelKind::aerial ? aerial : ground;
    const double value = clamp_epv(model.predict(features));
    return ev.team_id == reference_team ? value : -value;
}

}  // namespace

double epv_duel_avg(const EpvModelSet& models, const PossessionView& view, std::size_t i,
                    const SnapshotMap& snapshots, const std::string& reference_team) {
    return epv_duel_impl(models.duel_avg_aerial, models.duel_avg_ground, view, i, snapshots,
                         false, reference_team);
}

double epv_duel_ind(const EpvModelSet& models, const PossessionView& view, std::size_t i,
                    const SnapshotMap& snapshots, const std::string& reference_team) {
    return epv_duel_impl(models.duel_ind_aerial, models.duel_ind_ground, view, i, snapshots,
                         true, reference_team);
}

void save_epv_models(const EpvModelSet& models, const std::string& dir) {
    std::filesystem::create_directories(dir);
    save_model(models.control_open, dir + "/control_open.json");
    save_model(models.control_set_piece, dir + "/control_set_piece.json");
    save_model(models.duel_avg_aerial, dir + "/duel_avg_aerial.json");
    save_model(models.duel_avg_ground, dir + "/duel_avg_ground.json");
    save_model(models.duel_ind_aerial, dir + "/duel_ind_aerial.json");
    save_model(models.duel_ind_ground, dir + "/duel_ind_ground.json");
}

EpvModelSet load_epv_models(const std::string& dir) {
    EpvModelSet set;
    set.control_open = load_model(dir + "/control_open.json");
    set.control_set_piece = load_model(dir + "/control_set_piece.json");
    set.duel_avg_aerial = load_model(dir + "/duel_avg_aerial.json");
    set.duel_avg_ground = load_model(dir + "/duel_avg_ground.json");
    set.duel_ind_aerial = load_model(dir + "/duel_ind_aerial.json");
    set.duel_ind_ground = load_model(dir + "/duel_ind_ground.json");
    return set;
}

}  // namespace epv
