#include "epv/glicko.hpp"

#include <cmath>
#include <stdexcept>

namespace epv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double glicko_g(double phi) { return 1.0 / std::sqrt(1.0 + 3.0 * phi * phi / (kPi * kPi)); }

double glicko_e(double mu_plus_a, double mu_j, double phi_j) {
    return 1.0 / (1.0 + std::exp(-glicko_g(phi_j) * (mu_plus_a - mu_j)));
}

double glicko_display(double mu) { return kGlickoBase + kGlickoScale * mu; }

double glicko_mu_from_display(double rating) { return (rating - kGlickoBase) / kGlickoScale; }

GlickoState glicko_update(const GlickoState& state, std::span<const GlickoMatchup> matchups,
                          const GlickoConfig& config) {
    if (matchups.empty()) {
        GlickoState out = state;
        out.phi = std::sqrt(state.phi * state.phi + state.sigma * state.sigma);
        return out;
    }
    for (const auto& m : matchups) {
        if (m.score != 0.0 && m.score != 0.5 && m.score != 1.0) {
            throw std::domain_error("glicko_update: score must be 0, 0.5 or 1");
        }
    }

    // Estimated variance and score delta from the period's games, with the
    // advantage shift applied inside every expected score.
    double v_inv = 0.0;
    double delta_sum = 0.0;
    for (const auto& m : matchups) {
        const double gj = glicko_g(m.opponent_phi);
        const double e = glicko_e(state.mu + m.advantage, m.opponent_mu, m.opponent_phi);
        v_inv += gj * gj * e * (1.0 - e);
        delta_sum += gj * (m.score - e);
    }
    const double v = 1.0 / v_inv;
    const double delta = v * delta_sum;

    // Volatility iteration (Illinois method on the log-variance).
    const double phi2 = state.phi * state.phi;
    const double a = std::log(state.sigma * state.sigma);
    const double tau = config.tau;
    auto f = [&](double x) {
        const double ex = std::exp(x);
        const double num = ex * (delta * delta - phi2 - v - ex);
        const double den = 2.0 * (phi2 + v + ex) * (phi2 + v + ex);
        return num / den - (x - a) / (tau * tau);
    };

    double A = a;
    double B;
    if (delta * delta > phi2 + v) {
        B = std::log(delta * delta - phi2 - v);
    } else {
        double k = 1.0;
        while (f(a - k * tau) < 0.0) k += 1.0;
        B = a - k * tau;
    }
    double fA = f(A);
    double fB = f(B);
    while (std::abs(B - A) > config.volatility_tol) {
        const double C = A + (A - B) * fA / (fB - fA);
        const double fC = f(C);
        if (fC * fB < 0.0) {
            A = B;
            fA = fB;
        } else {
            fA /= 2.0;
        }
        B = C;
        fB = fC;
    }
    const double sigma_prime = std::exp(A / 2.0);

    const double phi_star = std::sqrt(phi2 + sigma_prime * sigma_prime);
    const double phi_prime = 1.0 / std::sqrt(1.0 / (phi_star * phi_star) + 1.0 / v);

    GlickoState out;
    out.mu = state.mu + phi_prime * phi_prime * delta_sum;
    out.phi = phi_prime;
    out.sigma = sigma_prime;
    out.games = state.games + static_cast<std::int64_t>(matchups.size());
    return out;
}

}  // namespace epv
