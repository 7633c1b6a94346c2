#include "epv/pv.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "epv/error.hpp"

namespace epv {

std::string pv_variant_name(PvVariant v) {
    switch (v) {
        case PvVariant::basic: return "basic";
        case PvVariant::decay: return "decay";
        case PvVariant::risk: return "risk";
    }
    return "risk";
}

std::optional<PvVariant> parse_pv_variant(const std::string& name) {
    if (name == "basic") return PvVariant::basic;
    if (name == "decay") return PvVariant::decay;
    if (name == "risk") return PvVariant::risk;
    return std::nullopt;
}

namespace {

void require_control(const PossessionView& view, std::size_t i) {
    if (i >= view.events.size() || !is_control(view.events[i].ev.action)) {
        throw std::invalid_argument("pv: event " + std::to_string(i) + " is not a control action");
    }
}

double shot_xg(std::span<const double> xg, std::size_t j) {
    const double v = xg[j];
    if (std::isnan(v)) {
        throw std::invalid_argument("pv: shot at view index " + std::to_string(j) +
                                    " has no xG assigned");
    }
    return v;
}

}  // namespace

double pv_basic(const PossessionView& view, std::span<const double> xg, std::size_t i) {
    require_control(view, i);
    const auto& ei = view.events[i];
    double prod = 1.0;
    for (std::size_t j = 0; j < view.events.size(); ++j) {
        const auto& ej = view.events[j];
        if (!is_shot(ej.ev.action)) continue;
        if (ej.possession != ei.possession) continue;
        if (ej.t < ei.t) continue;
        prod *= 1.0 - shot_xg(xg, j);
    }
    return 1.0 - prod;
}

double pv_decay(const PossessionView& view, std::span<const double> xg, std::size_t i,
                double gamma) {
    require_control(view, i);
    const auto& ei = view.events[i];
    double prod = 1.0;
    for (std::size_t j = 0; j < view.events.size(); ++j) {
        const auto& ej = view.events[j];
        if (!is_shot(ej.ev.action)) continue;
        if (ej.possession != ei.possession) continue;
        if (ej.t < ei.t) continue;
        prod *= 1.0 - std::pow(gamma, ej.t - ei.t) * shot_xg(xg, j);
    }
    return 1.0 - prod;
}

double pv_risk(const PossessionView& view, std::span<const double> xg, std::size_t i,
               double gamma, double horizon_s) {
    require_control(view, i);
    const auto& ei = view.events[i];
    double prod_team = 1.0;
    double prod_opp = 1.0;
    for (std::size_t j = 0; j < view.events.size(); ++j) {
        const auto& ej = view.events[j];
        if (!is_shot(ej.ev.action)) continue;
        if (ej.ev.half != ei.ev.half) continue;  // effective time restarts per half
        const double dt = ej.t - ei.t;
        if (dt < 0.0 || dt > horizon_s) continue;
        const double factor = 1.0 - std::pow(gamma, dt) * shot_xg(xg, j);
        if (ej.ev.team_id == ei.ev.team_id) {
            prod_team *= factor;
        } else {
            prod_opp *= factor;
        }
    }
    return (1.0 - prod_team) - (1.0 - prod_opp);
}

std::optional<double> pv_duel(const PossessionView& view, std::span<const double> pv_of_controls,
                              std::size_t i) {
    if (i >= view.events.size() || !is_duel(view.events[i].ev.action)) {
        throw std::invalid_argument("pv_duel: event " + std::to_string(i) + " is not a duel");
    }
    const auto& di = view.events[i];
    for (std::size_t k = i + 1; k < view.events.size(); ++k) {
        const auto& ek = view.events[k];
        if (ek.ev.half != di.ev.half) break;
        if (!is_control(ek.ev.action)) continue;
        const double value = pv_of_controls[k];
        if (std::isnan(value)) {
            throw std::invalid_argument("pv_duel: control at view index " + std::to_string(k) +
                                        " has no PV assigned");
        }
        return ek.ev.team_id == di.ev.team_id ? value : -value;
    }
    return std::nullopt;
}

std::vector<LabeledAction> label_dataset(const PossessionView& view, std::span<const double> xg,
                                         const PvConfig& config) {
    if (!(config.gamma > 0.0 && config.gamma <= 1.0)) {
        throw ValidationError("pv: gamma must be in (0, 1]");
    }
    if (!(config.horizon_s > 0.0)) {
        throw ValidationError("pv: horizon_s must be positive");
    }

    const std::size_t n = view.events.size();
    std::vector<double> control_pv(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_control(view.events[i].ev.action)) continue;
        switch (config.variant) {
            case PvVariant::basic: control_pv[i] = pv_basic(view, xg, i); break;
            case PvVariant::decay: control_pv[i] = pv_decay(view, xg, i, config.gamma); break;
            case PvVariant::risk:
                control_pv[i] = pv_risk(view, xg, i, config.gamma, config.horizon_s);
                break;
        }
    }

    std::vector<LabeledAction> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ae = view.events[i];
        if (is_control(ae.ev.action)) {
            out.push_back({i, ae.ev.match_id, ae.ev.event_index, LabeledAction::Kind::control,
                           control_pv[i], std::nullopt});
        } else if (is_duel(ae.ev.action)) {
            auto value = pv_duel(view, control_pv, i);
            if (value) {
                out.push_back({i, ae.ev.match_id, ae.ev.event_index, LabeledAction::Kind::duel,
                               *value, std::nullopt});
            }
        }
    }
    return out;
}

}  // namespace epv
