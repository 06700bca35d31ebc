#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "anfis/errors.hpp"
#include "anfis/fuzzy.hpp"
#include "anfis/matrix.hpp"
#include "anfis/random.hpp"

namespace anfis {

/// One rule seed extracted from the training inputs: a cluster center and
/// the per-feature within-cluster standard deviation.
struct ClusterSeed {
    std::vector<double> center;
    std::vector<double> spread;
};

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

} // namespace detail

/// K-means over the rows of X with farthest-point initialization: the first
/// center is a seeded random row, each further center the row farthest from
/// all chosen ones. Lloyd iterations run to convergence (or 300 rounds);
/// a cluster that empties is reseeded at the point farthest from its
/// assigned center. Fully deterministic for a fixed seed.
///
/// Spreads are floored at 0.05 x the per-feature standard deviation of X
/// (or 1e-6 when a feature is constant), so singleton clusters never
/// produce zero-width Gaussians.
inline std::vector<ClusterSeed> cluster(const Matrix& X, std::size_t n_clusters,
                                        std::uint64_t seed) {
    const std::size_t m = X.rows();
    const std::size_t n = X.cols();
    if (n_clusters == 0) throw std::invalid_argument("cluster: n_clusters must be >= 1");
    if (m < n_clusters) {
        throw InsufficientDataError("cluster: " + std::to_string(m) + " samples < " +
                                    std::to_string(n_clusters) + " clusters");
    }

    // Farthest-point initialization.
    Rng rng(seed);
    std::vector<std::vector<double>> centers;
    centers.reserve(n_clusters);
    {
        const auto first = X.row(uniform_index(rng, m));
        centers.emplace_back(first.begin(), first.end());
    }
    std::vector<double> min_dist(m, std::numeric_limits<double>::infinity());
    while (centers.size() < n_clusters) {
        std::size_t farthest = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < m; ++k) {
            min_dist[k] = std::min(min_dist[k], detail::sq_dist(X.row(k), centers.back()));
            if (min_dist[k] > best) {
                best = min_dist[k];
                farthest = k;
            }
        }
        const auto row = X.row(farthest);
        centers.emplace_back(row.begin(), row.end());
    }

    // Lloyd iterations.
    std::vector<std::size_t> assignment(m, 0);
    std::vector<std::size_t> counts(n_clusters, 0);
    for (int round = 0; round < 300; ++round) {
        // Round 0 always counts as a change: the zero-initialized assignment
        // is not a real clustering yet.
        bool changed = (round == 0);
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t best_c = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < n_clusters; ++c) {
                const double d = detail::sq_dist(X.row(k), centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            if (assignment[k] != best_c) {
                assignment[k] = best_c;
                changed = true;
            }
        }

        counts.assign(n_clusters, 0);
        for (std::size_t k = 0; k < m; ++k) ++counts[assignment[k]];

        // Reseed any empty cluster at the globally farthest point.
        for (std::size_t c = 0; c < n_clusters; ++c) {
            if (counts[c] != 0) continue;
            std::size_t farthest = 0;
            double best = -1.0;
            for (std::size_t k = 0; k < m; ++k) {
                if (counts[assignment[k]] <= 1) continue; // don't orphan another cluster
                const double d = detail::sq_dist(X.row(k), centers[assignment[k]]);
                if (d > best) {
                    best = d;
                    farthest = k;
                }
            }
            --counts[assignment[farthest]];
            assignment[farthest] = c;
            counts[c] = 1;
            changed = true;
        }

        for (std::size_t c = 0; c < n_clusters; ++c) {
            std::vector<double> mean(n, 0.0);
            for (std::size_t k = 0; k < m; ++k) {
                if (assignment[k] != c) continue;
                for (std::size_t j = 0; j < n; ++j) mean[j] += X(k, j);
            }
            for (std::size_t j = 0; j < n; ++j) mean[j] /= static_cast<double>(counts[c]);
            centers[c] = std::move(mean);
        }

        if (!changed && round > 0) break;
    }

    // Per-feature spread floor from the global feature deviations.
    std::vector<double> floor(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double mean = 0.0;
        for (std::size_t k = 0; k < m; ++k) mean += X(k, j);
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = X(k, j) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(m));
        floor[j] = sd > 0.0 ? 0.05 * sd : kWidthFloor;
    }

    std::vector<ClusterSeed> seeds(n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        seeds[c].center = centers[c];
        seeds[c].spread.assign(n, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            if (assignment[k] != c) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = X(k, j) - centers[c][j];
                seeds[c].spread[j] += d * d;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double sd = std::sqrt(seeds[c].spread[j] / static_cast<double>(counts[c]));
            seeds[c].spread[j] = std::max(sd, floor[j]);
        }
    }
    return seeds;
}

/// Builds the fuzzy rule base from cluster seeds: one rule per seed, premise
/// MF j centered on the seed with the seed's spread as width, consequents
/// zero-initialized (the least-squares fit overwrites them immediately).
inline AnfisModel seed_model(const std::vector<ClusterSeed>& seeds, std::size_t n_inputs) {
    if (seeds.empty()) throw std::invalid_argument("seed_model: no seeds");
    std::vector<Rule> rules;
    rules.reserve(seeds.size());
    for (const auto& seed : seeds) {
        if (seed.center.size() != n_inputs || seed.spread.size() != n_inputs) {
            throw ShapeError("seed_model: seed dimension does not match n_inputs");
        }
        Rule r;
        r.premise.reserve(n_inputs);
        for (std::size_t j = 0; j < n_inputs; ++j) {
            r.premise.emplace_back(seed.center[j], seed.spread[j]);
        }
        r.consequent.assign(n_inputs + 1, 0.0);
        rules.push_back(std::move(r));
    }
    return AnfisModel(n_inputs, std::move(rules));
}

/// Number of rows of X whose best rule fires below exp(-n_inputs * 8),
/// i.e. rows more than ~4 spreads per feature away from every rule center.
/// Informational; callers may warn when this is non-zero.
inline std::size_t uncovered_points(const AnfisModel& model, const Matrix& X) {
    const double threshold = std::exp(-8.0 * static_cast<double>(model.n_inputs()));
    std::size_t uncovered = 0;
    for (std::size_t k = 0; k < X.rows(); ++k) {
        const std::vector<double> z = model.normalized_inputs(X.row(k));
        const std::vector<double> w = model.firing_strengths(z);
        double best = 0.0;
        for (double v : w) best = std::max(best, v);
        if (!(best > threshold)) ++uncovered;
    }
    return uncovered;
}

} // namespace anfis
