#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anfis/errors.hpp"
#include "anfis/random.hpp"

namespace anfis {

using FitnessFn = std::function<double(std::span<const double>)>;

/// Particle swarm settings. Defaults follow the textbook update written with
/// no separate inertia term (inertia = 1.0) and the canonical learning
/// constants c1 = c2 = 2; with unit inertia the update diverges without a
/// velocity clamp, hence v_max defaults to 0.2 x the box width per dimension.
struct SwarmConfig {
    std::size_t n_particles = 60;
    double c1 = 2.0;
    double c2 = 2.0;
    double inertia = 1.0;
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;
    /// Per-dimension (lo, hi) search box; defines the problem dimension.
    std::vector<std::pair<double, double>> bounds;
    /// Per-dimension velocity clamp; empty selects v_max_fraction * (hi - lo).
    std::vector<double> v_max;
    double v_max_fraction = 0.2;

    std::size_t dimensions() const { return bounds.size(); }

    void validate() const {
        if (n_particles == 0) throw ConfigError("pso: n_particles must be >= 1");
        if (iterations == 0) throw ConfigError("pso: iterations must be >= 1");
        if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("pso: c1 and c2 must be > 0");
        if (!(inertia >= 0.0) || !std::isfinite(inertia)) {
            throw ConfigError("pso: inertia must be finite and >= 0");
        }
        if (bounds.empty()) throw ConfigError("pso: bounds must be non-empty");
        for (std::size_t d = 0; d < bounds.size(); ++d) {
            const auto& [lo, hi] = bounds[d];
            if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
                throw ConfigError("pso: bounds[" + std::to_string(d) + "] must satisfy lo < hi");
            }
        }
        if (!v_max.empty()) {
            if (v_max.size() != bounds.size()) {
                throw ConfigError("pso: v_max size must match bounds");
            }
            for (double v : v_max) {
                if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("pso: v_max entries must be > 0");
            }
        } else if (!(v_max_fraction > 0.0) || !std::isfinite(v_max_fraction)) {
            throw ConfigError("pso: v_max_fraction must be > 0");
        }
    }

    std::vector<double> effective_v_max() const {
        if (!v_max.empty()) return v_max;
        std::vector<double> out(bounds.size());
        for (std::size_t d = 0; d < bounds.size(); ++d) {
            out[d] = v_max_fraction * (bounds[d].second - bounds[d].first);
        }
        return out;
    }
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
};

struct SwarmState {
    std::vector<Particle> particles;
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::size_t iteration = 0;
    /// (iteration, gbest fitness) after each completed step; non-increasing.
    std::vector<std::pair<std::size_t, double>> history;
};

namespace detail {

/// Non-finite fitness values never become a personal or global best.
inline double sanitize_fitness(double f) {
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
}

inline void clamp_to_box(const SwarmConfig& config, std::vector<double>& x,
                         std::vector<double>* velocity) {
    for (std::size_t d = 0; d < x.size(); ++d) {
        const auto& [lo, hi] = config.bounds[d];
        if (x[d] < lo) {
            x[d] = lo;
            if (velocity) (*velocity)[d] = 0.0;
        } else if (x[d] > hi) {
            x[d] = hi;
            if (velocity) (*velocity)[d] = 0.0;
        }
    }
}

} // namespace detail

/// Seeds the swarm uniformly inside the box (zero initial velocities) and
/// evaluates everyone once. If init is given, particle 0 starts there
/// (clamped into the box).
inline SwarmState init_swarm(const SwarmConfig& config, const FitnessFn& fitness, Rng& rng,
                             std::optional<std::span<const double>> init = {}) {
    const std::size_t dim = config.dimensions();
    SwarmState state;
    state.particles.resize(config.n_particles);
    for (auto& p : state.particles) {
        p.position.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            p.position[d] = uniform(rng, config.bounds[d].first, config.bounds[d].second);
        }
        p.velocity.assign(dim, 0.0);
    }
    if (init) {
        if (init->size() != dim) {
            throw ShapeError("pso: init vector size does not match bounds dimension");
        }
        auto& p0 = state.particles.front();
        p0.position.assign(init->begin(), init->end());
        detail::clamp_to_box(config, p0.position, nullptr);
    }
    for (auto& p : state.particles) {
        const double f = detail::sanitize_fitness(fitness(p.position));
        p.best_position = p.position;
        p.best_fitness = f;
        if (f < state.best_fitness) {
            state.best_fitness = f;
            state.best_position = p.position;
        }
    }
    if (state.best_position.empty()) {
        // Every initial fitness was non-finite; keep a valid incumbent anyway.
        state.best_position = state.particles.front().position;
    }
    return state;
}

/// One swarm generation: velocity and position updates with per-dimension
/// r1, r2 draws, velocity clamped to +/- v_max, positions clamped to the box
/// (zeroing the violating velocity component), then fitness evaluation and
/// best updates. All random numbers for the step are drawn before the first
/// fitness call, so evaluations are free to run in any order or in parallel
/// without changing the stream. Ties keep the incumbent best.
inline void step(SwarmState& state, const SwarmConfig& config, const FitnessFn& fitness,
                 Rng& rng) {
    const std::size_t dim = config.dimensions();
    const std::vector<double> vmax = config.effective_v_max();

    // Draw r1/r2 for every particle and dimension up front.
    std::vector<double> r1(state.particles.size() * dim);
    std::vector<double> r2(state.particles.size() * dim);
    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            r1[i * dim + d] = uniform01(rng);
            r2[i * dim + d] = uniform01(rng);
        }
    }

    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        Particle& p = state.particles[i];
        for (std::size_t d = 0; d < dim; ++d) {
            double v = config.inertia * p.velocity[d] +
                       config.c1 * r1[i * dim + d] * (p.best_position[d] - p.position[d]) +
                       config.c2 * r2[i * dim + d] * (state.best_position[d] - p.position[d]);
            v = std::clamp(v, -vmax[d], vmax[d]);
            p.velocity[d] = v;
            p.position[d] += v;
        }
        detail::clamp_to_box(config, p.position, &p.velocity);
    }

    std::vector<double> values(state.particles.size());
    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        values[i] = detail::sanitize_fitness(fitness(state.particles[i].position));
    }

    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        Particle& p = state.particles[i];
        if (values[i] < p.best_fitness) {
            p.best_fitness = values[i];
            p.best_position = p.position;
        }
        if (values[i] < state.best_fitness) {
            state.best_fitness = values[i];
            state.best_position = p.position;
        }
    }

    ++state.iteration;
    state.history.emplace_back(state.iteration, state.best_fitness);
}

struct PsoResult {
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, double>> history;
};

/// Runs initialization plus config.iterations steps and returns the global
/// best with its per-iteration fitness series. Fully deterministic for a
/// fixed (config, fitness, seed).
inline PsoResult optimize(const SwarmConfig& config, const FitnessFn& fitness,
                          std::optional<std::vector<double>> init = {}) {
    config.validate();
    Rng rng(config.seed);
    std::optional<std::span<const double>> init_span;
    if (init) init_span = std::span<const double>(*init);
    SwarmState state = init_swarm(config, fitness, rng, init_span);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        step(state, config, fitness, rng);
    }
    return PsoResult{std::move(state.best_position), state.best_fitness,
                     std::move(state.history)};
}

} // namespace anfis
