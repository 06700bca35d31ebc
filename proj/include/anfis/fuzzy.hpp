#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anfis/errors.hpp"
#include "anfis/matrix.hpp"

namespace anfis {

/// Lower clamp for membership widths, in units of the feature scale the
/// premise lives in (features are z-scored during training, so 1e-6 of a
/// standard deviation). Keeps memberships and the consequent design matrix
/// well conditioned when an optimizer proposes a degenerate width.
inline constexpr double kWidthFloor = 1e-6;

/// Bell-shaped membership function exp(-(x-c)^2 / (2 w^2)).
struct GaussianMF {
    double center = 0.0;
    double width = 1.0;

    GaussianMF() = default;

    GaussianMF(double center_, double width_) : center(center_), width(width_) {
        if (!std::isfinite(center) || !std::isfinite(width) || width <= 0.0) {
            throw std::invalid_argument("GaussianMF: width must be finite and > 0");
        }
    }

    bool operator==(const GaussianMF&) const = default;
};

/// Membership grade of x in the fuzzy set described by mf. In (0, 1] for all
/// finite x; equals 1 exactly when x sits on the center.
inline double membership(const GaussianMF& mf, double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("membership: input must be finite");
    }
    if (!std::isfinite(mf.width) || mf.width <= 0.0) {
        throw std::invalid_argument("membership: width must be finite and > 0");
    }
    const double t = (x - mf.center) / mf.width;
    return std::exp(-0.5 * t * t);
}

/// One Takagi-Sugeno rule: a Gaussian premise per input and a first-order
/// linear consequent (one coefficient per input, then the bias).
struct Rule {
    std::vector<GaussianMF> premise;
    std::vector<double> consequent;

    /// Linear consequent value for input x: sum_j c_j x_j + bias.
    double output(std::span<const double> x) const {
        double acc = consequent.back();
        for (std::size_t j = 0; j < x.size(); ++j) acc += consequent[j] * x[j];
        return acc;
    }

    bool operator==(const Rule&) const = default;
};

/// Affine feature transform: normalized = (raw - mean) / scale.
struct FeatureScaling {
    double mean = 0.0;
    double scale = 1.0;

    double normalize(double raw) const { return (raw - mean) / scale; }
    double denormalize(double normalized) const { return normalized * scale + mean; }

    bool operator==(const FeatureScaling&) const = default;
};

/// Normalized firing strengths: w_i / sum(w). The layer-3 weights of the
/// output convex combination; sums to 1 within floating tolerance.
inline std::vector<double> normalize_strengths(std::span<const double> strengths) {
    if (strengths.empty()) {
        throw std::invalid_argument("normalize_strengths: empty input");
    }
    double sum = 0.0;
    for (double w : strengths) {
        if (!std::isfinite(w)) {
            throw DegenerateFiringError("normalize_strengths: non-finite firing strength");
        }
        if (w < 0.0) {
            throw std::invalid_argument("normalize_strengths: negative firing strength");
        }
        sum += w;
    }
    if (sum <= 0.0) {
        throw DegenerateFiringError("normalize_strengths: all firing strengths are zero");
    }
    std::vector<double> out(strengths.size());
    for (std::size_t i = 0; i < strengths.size(); ++i) out[i] = strengths[i] / sum;
    return out;
}

/// A complete Takagi-Sugeno fuzzy inference system with Gaussian premises.
///
/// The rule base operates in normalized coordinates: evaluate() applies the
/// stored input scalings before the fuzzy layers and inverts the target
/// scaling afterwards. Models built without explicit scalings use the
/// identity transform, so their rules read directly in raw units.
///
/// Immutable after construction; evaluate/evaluate_batch are pure and safe
/// to call concurrently.
class AnfisModel {
public:
    AnfisModel(std::size_t n_inputs, std::vector<Rule> rules,
               std::vector<FeatureScaling> input_scaling = {},
               FeatureScaling target_scaling = {})
        : n_inputs_(n_inputs),
          rules_(std::move(rules)),
          input_scaling_(std::move(input_scaling)),
          target_scaling_(target_scaling) {
        if (n_inputs_ == 0) throw std::invalid_argument("AnfisModel: n_inputs must be positive");
        if (rules_.empty()) throw std::invalid_argument("AnfisModel: rule set must be non-empty");
        if (input_scaling_.empty()) input_scaling_.resize(n_inputs_);
        if (input_scaling_.size() != n_inputs_) {
            throw ShapeError("AnfisModel: input scaling size does not match n_inputs");
        }
        for (const auto& s : input_scaling_) {
            if (!std::isfinite(s.mean) || !std::isfinite(s.scale) || s.scale <= 0.0) {
                throw std::invalid_argument("AnfisModel: scaling must be finite with scale > 0");
            }
        }
        if (!std::isfinite(target_scaling_.mean) || !std::isfinite(target_scaling_.scale) ||
            target_scaling_.scale <= 0.0) {
            throw std::invalid_argument("AnfisModel: target scaling must be finite with scale > 0");
        }
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            const Rule& r = rules_[i];
            if (r.premise.size() != n_inputs_) {
                throw ShapeError("AnfisModel: rule " + std::to_string(i) +
                                 " premise size != n_inputs");
            }
            if (r.consequent.size() != n_inputs_ + 1) {
                throw ShapeError("AnfisModel: rule " + std::to_string(i) +
                                 " consequent size != n_inputs + 1");
            }
            for (const auto& mf : r.premise) {
                if (!std::isfinite(mf.center) || !std::isfinite(mf.width) || mf.width <= 0.0) {
                    throw std::invalid_argument("AnfisModel: rule " + std::to_string(i) +
                                                " has an invalid membership function");
                }
            }
        }
    }

    std::size_t n_inputs() const { return n_inputs_; }
    std::size_t n_rules() const { return rules_.size(); }
    const std::vector<Rule>& rules() const { return rules_; }
    const std::vector<FeatureScaling>& input_scaling() const { return input_scaling_; }
    const FeatureScaling& target_scaling() const { return target_scaling_; }

    /// Layer-2 firing strengths at the given coordinates: element i is the
    /// product of rule i's membership grades. No scaling is applied here;
    /// the caller decides which coordinate space x lives in.
    std::vector<double> firing_strengths(std::span<const double> x) const {
        if (x.size() != n_inputs_) {
            throw ShapeError("firing_strengths: expected " + std::to_string(n_inputs_) +
                             " inputs, got " + std::to_string(x.size()));
        }
        std::vector<double> w(rules_.size());
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            double prod = 1.0;
            for (std::size_t j = 0; j < n_inputs_; ++j) {
                prod *= membership(rules_[i].premise[j], x[j]);
            }
            w[i] = prod;
        }
        return w;
    }

    /// Full five-layer forward pass: normalize inputs, fire and normalize
    /// rule strengths, blend the linear consequents, denormalize the output.
    double evaluate(std::span<const double> x) const {
        const std::vector<double> z = normalized_inputs(x);
        const std::vector<double> wn = normalize_strengths(firing_strengths(z));
        double out = 0.0;
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            out += wn[i] * rules_[i].output(z);
        }
        return target_scaling_.denormalize(out);
    }

    /// Row-wise evaluate; identical to m single calls.
    std::vector<double> evaluate_batch(const Matrix& X) const {
        std::vector<double> out;
        out.reserve(X.rows());
        for (std::size_t k = 0; k < X.rows(); ++k) out.push_back(evaluate(X.row(k)));
        return out;
    }

    /// Input vector mapped into the rule base's coordinate space.
    std::vector<double> normalized_inputs(std::span<const double> x) const {
        if (x.size() != n_inputs_) {
            throw ShapeError("evaluate: expected " + std::to_string(n_inputs_) +
                             " inputs, got " + std::to_string(x.size()));
        }
        std::vector<double> z(n_inputs_);
        for (std::size_t j = 0; j < n_inputs_; ++j) z[j] = input_scaling_[j].normalize(x[j]);
        return z;
    }

    /// Copy of this model with the consequents replaced by the stacked
    /// vector theta (rule-major, coefficients then bias per rule).
    AnfisModel with_consequents(std::span<const double> theta) const {
        const std::size_t block = n_inputs_ + 1;
        if (theta.size() != rules_.size() * block) {
            throw ShapeError("with_consequents: expected " +
                             std::to_string(rules_.size() * block) + " values, got " +
                             std::to_string(theta.size()));
        }
        std::vector<Rule> rules = rules_;
        for (std::size_t i = 0; i < rules.size(); ++i) {
            for (std::size_t j = 0; j < block; ++j) {
                rules[i].consequent[j] = theta[i * block + j];
            }
        }
        return AnfisModel(n_inputs_, std::move(rules), input_scaling_, target_scaling_);
    }

    bool operator==(const AnfisModel&) const = default;

private:
    std::size_t n_inputs_;
    std::vector<Rule> rules_;
    std::vector<FeatureScaling> input_scaling_;
    FeatureScaling target_scaling_;
};

} // namespace anfis
