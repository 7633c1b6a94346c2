#include "epv/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "epv/csv.hpp"
#include "epv/error.hpp"

namespace epv {

using nlohmann::ordered_json;

namespace {

constexpr double kProbEps = 1e-15;
constexpr double kHessFloor = 1e-16;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamped_prob(double z) {
    return std::clamp(sigmoid(z), kProbEps, 1.0 - kProbEps);
}

void check_rows(const std::vector<TrainingRow>& rows) {
    if (rows.empty()) throw ValidationError("learner: empty training set");
    const std::size_t dim = rows.front().features.size();
    for (const auto& r : rows) {
        if (r.features.size() != dim) {
            throw ValidationError("learner: inconsistent feature dimensions");
        }
        for (double f : r.features) {
            if (!std::isfinite(f)) throw ValidationError("learner: non-finite feature value");
        }
        if (!(r.weight > 0.0)) throw ValidationError("learner: non-positive row weight");
    }
}

void check_binary_targets(const std::vector<TrainingRow>& rows) {
    for (const auto& r : rows) {
        if (r.target != 0.0 && r.target != 1.0) {
            throw std::domain_error("logloss objective requires 0/1 targets");
        }
    }
}

std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back("f" + std::to_string(i));
    return names;
}

}  // namespace

std::string objective_name(ObjectiveKind k) {
    return k == ObjectiveKind::weighted_logloss ? "weighted_logloss" : "weighted_mse";
}

double Objective::loss(double score, double target, double weight) const {
    if (kind == ObjectiveKind::weighted_logloss) {
        const double p = clamped_prob(score);
        return -weight * (target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
    }
    const double e = target - score;
    return weight * e * e;
}

double Objective::gradient(double score, double target, double weight) const {
    if (kind == ObjectiveKind::weighted_logloss) {
        return weight * (sigmoid(score) - target);
    }
    return 2.0 * weight * (score - target);
}

double Objective::hessian(double score, double target, double weight) const {
    (void)target;
    if (kind == ObjectiveKind::weighted_logloss) {
        const double p = sigmoid(score);
        return std::max(weight * p * (1.0 - p), kHessFloor);
    }
    return 2.0 * weight;
}

void assign_per_player_weights(std::vector<TrainingRow>& rows) {
    std::unordered_map<std::string, double> counts;
    for (const auto& r : rows) counts[r.player_id] += 1.0;
    for (auto& r : rows) r.weight = 1.0 / counts[r.player_id];
}

// ---------------------------------------------------------------------------
// logistic regression
// ---------------------------------------------------------------------------

Model train_logistic(const std::vector<TrainingRow>& rows, const Objective& objective,
                     const LogisticConfig& config, std::vector<std::string> feature_names) {
    check_rows(rows);
    if (objective.kind == ObjectiveKind::weighted_logloss) check_binary_targets(rows);

    const std::size_t n = rows.size();
    const std::size_t d = rows.front().features.size();
    const double total_w = std::accumulate(rows.begin(), rows.end(), 0.0,
                                           [](double a, const TrainingRow& r) { return a + r.weight; });

    std::vector<double> coef(d, 0.0);
    double intercept = 0.0;

    auto full_loss = [&](const std::vector<double>& c, double b) {
        double loss = 0.0;
        for (const auto& r : rows) {
            double z = b;
            for (std::size_t k = 0; k < d; ++k) z += c[k] * r.features[k];
            loss += objective.loss(z, r.target, r.weight);
        }
        loss /= total_w;
        double reg = 0.0;
        for (double v : c) reg += v * v;
        return loss + 0.5 * config.l2 * reg;
    };

    double prev_loss = full_loss(coef, intercept);
    std::vector<double> grad(d);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (const auto& r : rows) {
            double z = intercept;
            for (std::size_t k = 0; k < d; ++k) z += coef[k] * r.features[k];
            const double g = objective.gradient(z, r.target, r.weight);
            for (std::size_t k = 0; k < d; ++k) grad[k] += g * r.features[k];
            grad_b += g;
        }
        for (std::size_t k = 0; k < d; ++k) grad[k] = grad[k] / total_w + config.l2 * coef[k];
        grad_b /= total_w;

        // Fixed base step; deterministic halving keeps the per-epoch loss
        // from ever increasing.
        double step = config.learning_rate;
        for (int attempt = 0; attempt < 30; ++attempt) {
            std::vector<double> cand(coef);
            for (std::size_t k = 0; k < d; ++k) cand[k] -= step * grad[k];
            const double cand_b = intercept - step * grad_b;
            const double cand_loss = full_loss(cand, cand_b);
            if (cand_loss <= prev_loss) {
                coef = std::move(cand);
                intercept = cand_b;
                prev_loss = cand_loss;
                break;
            }
            step *= 0.5;
        }
    }

    Model m;
    m.kind = Model::Kind::logistic;
    m.objective = objective.kind;
    m.feature_names = feature_names.empty() ? default_names(d) : std::move(feature_names);
    if (m.feature_names.size() != d) throw ValidationError("learner: feature name count mismatch");
    m.seed = config.seed;
    m.coefficients = std::move(coef);
    m.intercept = intercept;
    (void)n;
    return m;
}

// ---------------------------------------------------------------------------
// gradient-boosted trees
// ---------------------------------------------------------------------------

double Tree::eval(std::span<const double> x) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        const auto& nd = nodes[node];
        node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[node].value;
}

namespace {

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

struct NodeStats {
    double g = 0.0;
    double h = 0.0;
    std::size_t count = 0;
};

double leaf_objective(double g, double h, double lambda) { return g * g / (h + lambda); }

}  // namespace

Model train_gbt(const std::vector<TrainingRow>& rows, const Objective& objective,
                const GbtConfig& config, std::vector<std::string> feature_names) {
    check_rows(rows);
    if (config.trees < 0 || config.max_depth < 1) {
        throw ValidationError("gbt: trees must be >= 0 and max_depth >= 1");
    }
    if (objective.kind == ObjectiveKind::weighted_logloss) check_binary_targets(rows);

    const std::size_t n = rows.size();
    const std::size_t d = rows.front().features.size();
    const double lambda = config.lambda;

    double total_w = 0.0, weighted_target = 0.0;
    for (const auto& r : rows) {
        total_w += r.weight;
        weighted_target += r.weight * r.target;
    }
    // Weights are rescaled to mean 1 so lambda regularizes per effective row
    // no matter how small the raw per-player weights are. Relative weighting
    // across rows is untouched.
    const double w_scale = static_cast<double>(n) / total_w;
    double base = 0.0;
    if (objective.kind == ObjectiveKind::weighted_mse) {
        base = weighted_target / total_w;
    } else {
        const double rate = std::clamp(weighted_target / total_w, 1e-6, 1.0 - 1e-6);
        base = std::log(rate / (1.0 - rate));
    }

    Model m;
    m.kind = Model::Kind::gbt;
    m.objective = objective.kind;
    m.feature_names = feature_names.empty() ? default_names(d) : std::move(feature_names);
    if (m.feature_names.size() != d) throw ValidationError("learner: feature name count mismatch");
    m.seed = config.seed;
    m.base_score = base;
    m.learning_rate = config.learning_rate;
    if (config.trees == 0) return m;

    // Feature-sorted row order, computed once and reused for every tree.
    std::vector<std::vector<std::uint32_t>> sorted(d, std::vector<std::uint32_t>(n));
    for (std::size_t f = 0; f < d; ++f) {
        auto& idx = sorted[f];
        std::iota(idx.begin(), idx.end(), 0u);
        std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
            return rows[a].features[f] < rows[b].features[f];
        });
    }

    std::vector<double> score(n, base);
    std::vector<double> g(n), h(n);
    std::vector<int> node_of(n);

    for (int t = 0; t < config.trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double w = rows[i].weight * w_scale;
            g[i] = objective.gradient(score[i], rows[i].target, w);
            h[i] = objective.hessian(score[i], rows[i].target, w);
        }

        Tree tree;
        tree.nodes.push_back({});  // root
        std::fill(node_of.begin(), node_of.end(), 0);
        std::vector<int> frontier{0};

        for (int depth = 0; depth < config.max_depth && !frontier.empty(); ++depth) {
            // Totals per frontier node.
            std::unordered_map<int, NodeStats> totals;
            for (std::size_t i = 0; i < n; ++i) {
                const int nd = node_of[i];
                if (nd < 0) continue;
                auto& s = totals[nd];
                s.g += g[i];
                s.h += h[i];
                s.count += 1;
            }

            std::unordered_map<int, SplitCandidate> best;
            std::unordered_map<int, NodeStats> run;
            std::unordered_map<int, double> last_val;
            for (std::size_t f = 0; f < d; ++f) {
                run.clear();
                last_val.clear();
                for (std::uint32_t r : sorted[f]) {
                    const int nd = node_of[r];
                    if (nd < 0) continue;
                    const double v = rows[r].features[f];
                    auto& rs = run[nd];
                    auto lv = last_val.find(nd);
                    if (rs.count > 0 && lv != last_val.end() && v > lv->second) {
                        const auto& tot = totals[nd];
                        if (rs.count < tot.count) {
                            const double gl = rs.g, hl = rs.h;
                            const double gr = tot.g - gl, hr = tot.h - hl;
                            const double gain = leaf_objective(gl, hl, lambda) +
                                                leaf_objective(gr, hr, lambda) -
                                                leaf_objective(tot.g, tot.h, lambda);
                            auto& b = best[nd];
                            if (gain > b.gain + 1e-12) {
                                b.gain = gain;
                                b.feature = static_cast<int>(f);
                                b.threshold = 0.5 * (v + lv->second);
                            }
                        }
                    }
                    rs.g += g[r];
                    rs.h += h[r];
                    rs.count += 1;
                    last_val[nd] = v;
                }
            }

            std::vector<int> next_frontier;
            for (int nd : frontier) {
                auto it = best.find(nd);
                if (it == best.end() || it->second.feature < 0 || it->second.gain <= 1e-12) {
                    continue;  // stays a leaf
                }
                auto& node = tree.nodes[static_cast<std::size_t>(nd)];
                node.feature = it->second.feature;
                node.threshold = it->second.threshold;
                node.left = static_cast<int>(tree.nodes.size());
                node.right = node.left + 1;
                tree.nodes.push_back({});
                tree.nodes.push_back({});
                next_frontier.push_back(node.left);
                next_frontier.push_back(node.right);
            }
            if (next_frontier.empty()) break;

            for (std::size_t i = 0; i < n; ++i) {
                const int nd = node_of[i];
                if (nd < 0) continue;
                const auto& node = tree.nodes[static_cast<std::size_t>(nd)];
                if (node.feature < 0) continue;
                node_of[i] = rows[i].features[static_cast<std::size_t>(node.feature)] <= node.threshold
                                 ? node.left
                                 : node.right;
            }
            frontier = std::move(next_frontier);
        }

        // Leaf values.
        std::unordered_map<int, NodeStats> leaf_stats;
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = leaf_stats[node_of[i]];
            s.g += g[i];
            s.h += h[i];
            s.count += 1;
        }
        for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
            auto& node = tree.nodes[k];
            if (node.feature >= 0) continue;
            auto it = leaf_stats.find(static_cast<int>(k));
            node.value = it == leaf_stats.end() ? 0.0 : -it->second.g / (it->second.h + lambda);
        }

        for (std::size_t i = 0; i < n; ++i) {
            score[i] += config.learning_rate *
                        tree.nodes[static_cast<std::size_t>(node_of[i])].value;
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

double Model::score(std::span<const double> features) const {
    if (features.size() != feature_names.size()) {
        throw std::invalid_argument("predict: expected " + std::to_string(feature_names.size()) +
                                    " features, got " + std::to_string(features.size()));
    }
    if (kind == Kind::logistic) {
        double z = intercept;
        for (std::size_t k = 0; k < coefficients.size(); ++k) z += coefficients[k] * features[k];
        return z;
    }
    double z = base_score;
    for (const auto& tree : trees) z += learning_rate * tree.eval(features);
    return z;
}

double Model::predict(std::span<const double> features) const {
    const double z = score(features);
    if (objective == ObjectiveKind::weighted_logloss) return clamped_prob(z);
    return z;
}

double predict(const Model& model, std::span<const double> features) {
    return model.predict(features);
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string model_to_json(const Model& model) {
    ordered_json j;
    j["format_version"] = 1;
    j["kind"] = model.kind == Model::Kind::logistic ? "logistic" : "gbt";
    j["objective"] = objective_name(model.objective);
    j["feature_names"] = model.feature_names;
    j["seed"] = model.seed;
    if (model.kind == Model::Kind::logistic) {
        j["coefficients"] = model.coefficients;
        j["intercept"] = model.intercept;
    } else {
        j["base_score"] = model.base_score;
        j["learning_rate"] = model.learning_rate;
        ordered_json trees = ordered_json::array();
        for (const auto& tree : model.trees) {
            ordered_json nodes = ordered_json::array();
            for (const auto& nd : tree.nodes) {
                nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
            }
            trees.push_back(std::move(nodes));
        }
        j["trees"] = std::move(trees);
    }
    return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError("model file: malformed JSON");
    if (j.value("format_version", -1) != 1) {
        throw ValidationError("model file: unsupported format_version");
    }
    Model m;
    const std::string kind = j.at("kind").get<std::string>();
    m.kind = kind == "logistic" ? Model::Kind::logistic : Model::Kind::gbt;
    const std::string obj = j.at("objective").get<std::string>();
    m.objective = obj == "weighted_logloss" ? ObjectiveKind::weighted_logloss
                                            : ObjectiveKind::weighted_mse;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.seed = j.value("seed", 0ULL);
    if (m.kind == Model::Kind::logistic) {
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        m.intercept = j.at("intercept").get<double>();
    } else {
        m.base_score = j.at("base_score").get<double>();
        m.learning_rate = j.at("learning_rate").get<double>();
        for (const auto& tj : j.at("trees")) {
            Tree tree;
            for (const auto& nj : tj) {
                TreeNode nd;
                nd.feature = nj.at(0).get<int>();
                nd.threshold = nj.at(1).get<double>();
                nd.left = nj.at(2).get<int>();
                nd.right = nj.at(3).get<int>();
                nd.value = nj.at(4).get<double>();
                tree.nodes.push_back(nd);
            }
            m.trees.push_back(std::move(tree));
        }
    }
    return m;
}

void save_model(const Model& model, const std::string& path) {
    write_text_file(path, model_to_json(model));
}

Model load_model(const std::string& path) {
    return model_from_json(read_text_file(path));
}

}  // namespace epv
