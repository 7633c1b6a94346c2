#pragma once

#include <cstdint>
#include <span>

namespace epv {

inline constexpr double kGlickoScale = 173.7178;
inline constexpr double kGlickoBase = 1500.0;

struct GlickoConfig {
    double tau = 0.5;
    double initial_sigma = 0.06;
    double initial_phi = 350.0 / kGlickoScale;
    double volatility_tol = 1e-6;
};

/// Per-player rating state on the internal scale.
struct GlickoState {
    double mu = 0.0;
    double phi = 350.0 / kGlickoScale;
    double sigma = 0.06;
    std::int64_t games = 0;
};

/// One result inside a rating period, seen from the player being updated.
/// `advantage` shifts the player's own rating inside the expected-score
/// function: E(mu + advantage, opponent_mu, opponent_phi). Zero recovers
/// the unmodified update.
struct GlickoMatchup {
    double opponent_mu = 0.0;
    double opponent_phi = 350.0 / kGlickoScale;
    double score = 0.5;  // 0, 0.5, or 1
    double advantage = 0.0;
};

double glicko_g(double phi);
double glicko_e(double mu_plus_a, double mu_j, double phi_j);
double glicko_display(double mu);
double glicko_mu_from_display(double rating);

/// One rating-period step. An empty matchup list applies the idle rule
/// (deviation grows, rating and volatility unchanged).
/// Throws std::domain_error for scores outside {0, 0.5, 1}.
GlickoState glicko_update(const GlickoState& state, std::span<const GlickoMatchup> matchups,
                          const GlickoConfig& config = {});

}  // namespace epv
