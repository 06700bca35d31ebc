#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "anfis/errors.hpp"
#include "anfis/fuzzy.hpp"
#include "anfis/matrix.hpp"

namespace anfis {

/// Design matrix for the global consequent fit. Row k holds one block per
/// rule: [wn_i * z_k[0], ..., wn_i * z_k[n-1], wn_i], where z_k is sample k
/// in the model's normalized coordinates and wn_i its normalized firing
/// strength. Multiplying by the stacked consequent vector reproduces the
/// model output in normalized target space, so with identity target scaling
/// it reproduces evaluate() exactly.
inline Matrix assemble_design(const AnfisModel& model, const Matrix& X) {
    if (X.rows() == 0) {
        throw std::invalid_argument("assemble_design: need at least one sample");
    }
    if (X.cols() != model.n_inputs()) {
        throw ShapeError("assemble_design: expected " + std::to_string(model.n_inputs()) +
                         " columns, got " + std::to_string(X.cols()));
    }
    const std::size_t n = model.n_inputs();
    const std::size_t block = n + 1;
    Matrix design(X.rows(), model.n_rules() * block);
    for (std::size_t k = 0; k < X.rows(); ++k) {
        const std::vector<double> z = model.normalized_inputs(X.row(k));
        const std::vector<double> wn = normalize_strengths(model.firing_strengths(z));
        for (std::size_t i = 0; i < model.n_rules(); ++i) {
            const std::size_t base = i * block;
            for (std::size_t j = 0; j < n; ++j) design(k, base + j) = wn[i] * z[j];
            design(k, base + n) = wn[i];
        }
    }
    return design;
}

/// design * theta, i.e. the model predictions in normalized target space.
inline std::vector<double> apply_design(const Matrix& design, std::span<const double> theta) {
    if (theta.size() != design.cols()) {
        throw ShapeError("apply_design: theta size does not match design columns");
    }
    std::vector<double> out(design.rows(), 0.0);
    for (std::size_t k = 0; k < design.rows(); ++k) {
        double acc = 0.0;
        const auto row = design.row(k);
        for (std::size_t j = 0; j < theta.size(); ++j) acc += row[j] * theta[j];
        out[k] = acc;
    }
    return out;
}

struct LsqResult {
    std::vector<double> theta;
    /// The design matrix was numerically rank deficient; theta is still the
    /// minimum-norm least-squares solution.
    bool rank_deficient = false;
};

/// Minimum-norm least-squares solution of design * theta ~= y, via a
/// rank-revealing complete orthogonal decomposition. Normalized firing
/// strengths can make columns nearly collinear (near-duplicate rules early
/// in a search), so normal equations are avoided. An optional Tikhonov
/// damping ridge > 0 solves the augmented system [design; sqrt(ridge) I].
inline LsqResult solve_consequents(const Matrix& design, std::span<const double> y,
                                   double ridge = 0.0) {
    if (design.rows() == 0) {
        throw std::invalid_argument("solve_consequents: empty design matrix");
    }
    if (y.size() != design.rows()) {
        throw ShapeError("solve_consequents: y size does not match design rows");
    }
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw std::invalid_argument("solve_consequents: ridge must be finite and >= 0");
    }
    for (double v : design.data()) {
        if (!std::isfinite(v)) throw NumericError("solve_consequents: non-finite design entry");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw NumericError("solve_consequents: non-finite target entry");
    }

    const Eigen::Index m = static_cast<Eigen::Index>(design.rows());
    const Eigen::Index p = static_cast<Eigen::Index>(design.cols());
    const Eigen::Index rows = ridge > 0.0 ? m + p : m;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index j = 0; j < p; ++j) A(k, j) = design(k, j);
        b(k) = y[static_cast<std::size_t>(k)];
    }
    if (ridge > 0.0) {
        const double damp = std::sqrt(ridge);
        for (Eigen::Index j = 0; j < p; ++j) A(m + j, j) = damp;
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const Eigen::VectorXd theta = cod.solve(b);

    LsqResult out;
    out.rank_deficient = cod.rank() < p;
    out.theta.assign(theta.data(), theta.data() + theta.size());
    for (double v : out.theta) {
        if (!std::isfinite(v)) throw NumericError("solve_consequents: non-finite solution");
    }
    return out;
}

} // namespace anfis
