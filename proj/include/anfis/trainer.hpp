#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anfis/clustering.hpp"
#include "anfis/data.hpp"
#include "anfis/errors.hpp"
#include "anfis/fuzzy.hpp"
#include "anfis/lsq.hpp"
#include "anfis/matrix.hpp"
#include "anfis/metrics.hpp"
#include "anfis/pso.hpp"
#include "anfis/random.hpp"

namespace anfis {

/// Hybrid training settings. Defaults: 10 clusters, a 75% training split,
/// and a 60-particle swarm run for 1000 iterations. The swarm's search box
/// and seed are derived by train(); user-supplied bounds are ignored.
struct TrainConfig {
    std::size_t n_clusters = 10;
    double split_fraction = 0.75;
    std::uint64_t seed = 0;
    /// Search-box half-width around each cluster seed, in units of the
    /// per-feature standard deviation.
    double premise_bounds_scale = 3.0;
    /// Optional Tikhonov damping for the consequent fit (default off).
    double ridge = 0.0;
    SwarmConfig pso;

    void validate() const {
        if (n_clusters == 0) throw ConfigError("train: n_clusters must be >= 1");
        if (!(split_fraction > 0.0) || !(split_fraction < 1.0)) {
            throw ConfigError("train: split_fraction must be in (0, 1)");
        }
        if (!(premise_bounds_scale > 0.0) || !std::isfinite(premise_bounds_scale)) {
            throw ConfigError("train: premise_bounds_scale must be > 0");
        }
        if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
            throw ConfigError("train: ridge must be finite and >= 0");
        }
        if (pso.n_particles == 0) throw ConfigError("train: pso.n_particles must be >= 1");
        if (pso.iterations == 0) throw ConfigError("train: pso.iterations must be >= 1");
        if (!(pso.c1 > 0.0) || !(pso.c2 > 0.0)) throw ConfigError("train: pso c1, c2 must be > 0");
        if (!(pso.inertia >= 0.0) || !std::isfinite(pso.inertia)) {
            throw ConfigError("train: pso.inertia must be finite and >= 0");
        }
        if (!(pso.v_max_fraction > 0.0) || !std::isfinite(pso.v_max_fraction)) {
            throw ConfigError("train: pso.v_max_fraction must be > 0");
        }
    }
};

/// Everything a training run produces. rmse_history and the rmse fields are
/// in normalized target units (the optimizer's fitness scale); the metrics
/// are in original units.
struct TrainReport {
    AnfisModel model;
    std::vector<std::pair<std::size_t, double>> rmse_history;
    Metrics train_metrics;
    Metrics test_metrics;
    /// Headline tunable-parameter count: n_clusters x (n_inputs + 1) x 2,
    /// counting the target among the variables.
    std::size_t n_tunable = 0;
    /// Dimension of the swarm's search vector: n_clusters x n_inputs x 2.
    std::size_t n_premise_parameters = 0;
    double initial_rmse = 0.0;
    double final_rmse = 0.0;
    std::size_t uncovered_training_points = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::vector<double> train_actual;
    std::vector<double> train_predicted;
    std::vector<double> test_actual;
    std::vector<double> test_predicted;
};

/// Flattens the premise parameters rule-major as (center, width) pairs per
/// input: D = n_rules x n_inputs x 2.
inline std::vector<double> pack_parameters(const AnfisModel& model) {
    std::vector<double> out;
    out.reserve(model.n_rules() * model.n_inputs() * 2);
    for (const Rule& r : model.rules()) {
        for (const GaussianMF& mf : r.premise) {
            out.push_back(mf.center);
            out.push_back(mf.width);
        }
    }
    return out;
}

/// Rebuilds a model from a packed premise vector, keeping the template's
/// consequents and scalings. Width slots pass through |w| +/ floor clamping
/// so any real vector decodes to a valid model; packing a valid model and
/// unpacking it is the identity.
inline AnfisModel unpack_parameters(std::span<const double> packed, const AnfisModel& tmpl,
                                    double width_floor = kWidthFloor) {
    const std::size_t expected = tmpl.n_rules() * tmpl.n_inputs() * 2;
    if (packed.size() != expected) {
        throw ShapeError("unpack_parameters: expected " + std::to_string(expected) +
                         " values, got " + std::to_string(packed.size()));
    }
    std::vector<Rule> rules = tmpl.rules();
    std::size_t idx = 0;
    for (Rule& r : rules) {
        for (GaussianMF& mf : r.premise) {
            mf.center = packed[idx++];
            mf.width = std::max(std::abs(packed[idx++]), width_floor);
        }
    }
    return AnfisModel(tmpl.n_inputs(), std::move(rules), tmpl.input_scaling(),
                      tmpl.target_scaling());
}

/// Fitness of a packed premise vector: decode, fit all consequents by least
/// squares on (X, y), and return the training RMSE. Numeric failures (all
/// firing strengths underflowing, a singular solve) yield +infinity so the
/// swarm rejects the particle and keeps running.
inline double premise_fitness(std::span<const double> packed, const AnfisModel& tmpl,
                              const Matrix& X, std::span<const double> y,
                              double ridge = 0.0) {
    try {
        const AnfisModel model = unpack_parameters(packed, tmpl);
        const Matrix design = assemble_design(model, X);
        const LsqResult fit = solve_consequents(design, y, ridge);
        const std::vector<double> pred = apply_design(design, fit.theta);
        double sse = 0.0;
        for (std::size_t k = 0; k < pred.size(); ++k) {
            const double d = pred[k] - y[k];
            sse += d * d;
        }
        const double rmse = std::sqrt(sse / static_cast<double>(pred.size()));
        return std::isfinite(rmse) ? rmse : std::numeric_limits<double>::infinity();
    } catch (const NumericError&) {
        return std::numeric_limits<double>::infinity();
    }
}

namespace detail {

inline Matrix normalize_matrix(const Matrix& X, const std::vector<FeatureScaling>& scalings) {
    Matrix out(X.rows(), X.cols());
    for (std::size_t k = 0; k < X.rows(); ++k) {
        for (std::size_t j = 0; j < X.cols(); ++j) out(k, j) = scalings[j].normalize(X(k, j));
    }
    return out;
}

inline std::vector<double> normalize_vector(std::span<const double> v,
                                            const FeatureScaling& scaling) {
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = scaling.normalize(v[k]);
    return out;
}

} // namespace detail

/// The three-step hybrid procedure: split and z-score the data, cluster the
/// training inputs into one rule seed each, then run the swarm over the
/// packed premise parameters with a full least-squares consequent fit inside
/// every fitness evaluation. The returned model carries the training-split
/// normalization statistics, so it evaluates directly on raw-unit inputs.
inline TrainReport train(const Dataset& dataset, const TrainConfig& config) {
    config.validate();
    dataset.validate();

    Rng master(config.seed);
    const std::uint64_t split_seed = master();
    const std::uint64_t cluster_seed = master();
    const std::uint64_t pso_seed = master();

    const auto [train_idx, test_idx] =
        split_indices(dataset.n_samples(), config.split_fraction, split_seed);
    const Dataset train_set = take_rows(dataset, train_idx);
    const Dataset test_set = take_rows(dataset, test_idx);
    if (train_set.n_samples() < config.n_clusters) {
        throw InsufficientDataError("train: " + std::to_string(train_set.n_samples()) +
                                    " training rows < " + std::to_string(config.n_clusters) +
                                    " clusters");
    }

    const std::vector<FeatureScaling> input_scaling = compute_scalings(train_set.X);
    const FeatureScaling target_scaling = compute_scaling(train_set.y);
    const Matrix X_norm = detail::normalize_matrix(train_set.X, input_scaling);
    const std::vector<double> y_norm = detail::normalize_vector(train_set.y, target_scaling);

    const std::vector<ClusterSeed> seeds = cluster(X_norm, config.n_clusters, cluster_seed);
    const AnfisModel seeded = seed_model(seeds, dataset.n_features());
    const std::vector<double> init = pack_parameters(seeded);

    // Search box per dimension: centers within +/- scale * sigma of their
    // seed, widths in [floor, scale * sigma], per feature.
    const std::vector<FeatureScaling> norm_stats = compute_scalings(X_norm);
    SwarmConfig pso_config = config.pso;
    pso_config.seed = pso_seed;
    pso_config.bounds.clear();
    pso_config.bounds.reserve(init.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        for (std::size_t j = 0; j < dataset.n_features(); ++j) {
            const double sigma = norm_stats[j].scale;
            const double half = config.premise_bounds_scale * sigma;
            pso_config.bounds.emplace_back(seeds[i].center[j] - half,
                                           seeds[i].center[j] + half);
            pso_config.bounds.emplace_back(kWidthFloor, std::max(half, 2.0 * kWidthFloor));
        }
    }

    const FitnessFn fitness = [&seeded, &X_norm, &y_norm,
                               ridge = config.ridge](std::span<const double> packed) {
        return premise_fitness(packed, seeded, X_norm, y_norm, ridge);
    };

    const double initial_rmse = fitness(init);
    const PsoResult result = optimize(pso_config, fitness, init);

    const AnfisModel best_premises = unpack_parameters(result.best_position, seeded);
    const Matrix design = assemble_design(best_premises, X_norm);
    const LsqResult fit = solve_consequents(design, y_norm, config.ridge);
    const AnfisModel internal = best_premises.with_consequents(fit.theta);
    const AnfisModel model(internal.n_inputs(), internal.rules(), input_scaling,
                           target_scaling);

    std::vector<double> train_pred = model.evaluate_batch(train_set.X);
    std::vector<double> test_pred = model.evaluate_batch(test_set.X);

    TrainReport report{
        model,
        result.history,
        compute_metrics(train_set.y, train_pred),
        compute_metrics(test_set.y, test_pred),
        config.n_clusters * (dataset.n_features() + 1) * 2,
        config.n_clusters * dataset.n_features() * 2,
        initial_rmse,
        result.best_fitness,
        uncovered_points(seeded, X_norm),
        train_idx,
        test_idx,
        train_set.y,
        std::move(train_pred),
        test_set.y,
        std::move(test_pred),
    };
    return report;
}

} // namespace anfis
