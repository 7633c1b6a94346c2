#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epv/events.hpp"

namespace epv {

struct TrainingRow {
    std::vector<double> features;
    double target = 0.0;
    std::string player_id;
    double weight = 1.0;
};

enum class ObjectiveKind { weighted_logloss, weighted_mse };

std::string objective_name(ObjectiveKind k);

/// Per-row loss with first and second derivatives taken with respect to the
/// raw model score (log-odds for logloss, the value itself for mse). The
/// weight multiplies all three.
struct Objective {
    ObjectiveKind kind = ObjectiveKind::weighted_mse;

    double loss(double score, double target, double weight) const;
    double gradient(double score, double target, double weight) const;
    double hessian(double score, double target, double weight) const;

    static Objective weighted_logloss() { return {ObjectiveKind::weighted_logloss}; }
    static Objective weighted_mse() { return {ObjectiveKind::weighted_mse}; }
};

/// Set weight = 1 / (number of rows sharing the row's player_id), so every
/// player contributes one unit of loss regardless of how often they appear.
void assign_per_player_weights(std::vector<TrainingRow>& rows);

struct LogisticConfig {
    double l2 = 1e-4;
    int epochs = 400;
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
};

struct GbtConfig {
    int trees = 200;
    int max_depth = 4;
    double learning_rate = 0.1;
    double lambda = 1.0;  // leaf L2 regularization
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // < 0 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double eval(std::span<const double> x) const;
};

struct Model {
    enum class Kind { logistic, gbt };
    Kind kind = Kind::gbt;
    ObjectiveKind objective = ObjectiveKind::weighted_mse;
    std::vector<std::string> feature_names;
    std::uint64_t seed = 0;

    // logistic parameters
    std::vector<double> coefficients;
    double intercept = 0.0;

    // gbt parameters
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<Tree> trees;

    /// Raw score: log-odds for logloss models, value for mse models.
    double score(std::span<const double> features) const;
    /// Probability in (0, 1) for logloss models; raw value for mse models.
    double predict(std::span<const double> features) const;
};

/// Full-batch gradient descent on the weight-normalized loss with L2 on the
/// coefficients (not the intercept). Deterministic; targets must be 0/1.
Model train_logistic(const std::vector<TrainingRow>& rows,
                     const Objective& objective,
                     const LogisticConfig& config,
                     std::vector<std::string> feature_names = {});

/// Second-order boosting with exact greedy splits; every leaf takes the
/// Newton value -sum(g) / (sum(h) + lambda).
Model train_gbt(const std::vector<TrainingRow>& rows,
                const Objective& objective,
                const GbtConfig& config,
                std::vector<std::string> feature_names = {});

double predict(const Model& model, std::span<const double> features);

/// Versioned self-describing JSON model file.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace epv
