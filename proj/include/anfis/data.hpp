#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "anfis/errors.hpp"
#include "anfis/fuzzy.hpp"
#include "anfis/matrix.hpp"
#include "anfis/random.hpp"

namespace anfis {

/// Tabular regression dataset: named feature columns plus one target column.
struct Dataset {
    std::vector<std::string> feature_names;
    Matrix X;
    std::vector<double> y;
    std::string target_name;

    std::size_t n_samples() const { return X.rows(); }
    std::size_t n_features() const { return X.cols(); }

    void validate() const {
        if (X.rows() == 0) throw DataError("dataset: no samples");
        if (feature_names.size() != X.cols()) {
            throw DataError("dataset: feature name count does not match column count");
        }
        if (y.size() != X.rows()) throw DataError("dataset: target length does not match rows");
        for (double v : X.data()) {
            if (!std::isfinite(v)) throw DataError("dataset: non-finite feature value");
        }
        for (double v : y) {
            if (!std::isfinite(v)) throw DataError("dataset: non-finite target value");
        }
    }

    bool operator==(const Dataset&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col,
                         const std::string& col_name) {
    const std::string where = "line " + std::to_string(line_no) + ", column " +
                              std::to_string(col + 1) + " (" + col_name + ")";
    if (cell.empty()) throw DataError("csv: blank cell at " + where);
    double value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError("csv: non-numeric cell '" + cell + "' at " + where);
    }
    if (!std::isfinite(value)) throw DataError("csv: non-finite value at " + where);
    return value;
}

} // namespace detail

/// A parsed CSV without target semantics: the header plus all numeric cells.
struct NumericTable {
    std::vector<std::string> header;
    Matrix values;
};

/// Reads a comma-separated file with a mandatory header row and a numeric
/// body (dot decimals, no quoting). Errors identify the offending line and
/// column.
inline NumericTable load_csv_table(const std::string& path) {
    std::ifstream file(path);
    if (!file.is_open()) throw DataError("csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(file, line)) throw DataError("csv: '" + path + "' is empty");
    const std::vector<std::string> header = detail::split_line(line);
    if (header.empty()) throw DataError("csv: empty header row");
    {
        std::set<std::string> seen;
        for (const auto& name : header) {
            if (name.empty()) throw DataError("csv: blank column name in header");
            if (!seen.insert(name).second) throw DataError("csv: duplicate column '" + name + "'");
        }
    }

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const std::vector<std::string> cells = detail::split_line(line);
        if (cells.size() != header.size()) {
            throw DataError("csv: line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            row.push_back(detail::parse_cell(cells[j], line_no, j, header[j]));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("csv: '" + path + "' has no data rows");
    return NumericTable{header, Matrix::from_rows(rows)};
}

/// Reads a labeled dataset: the last column is the target unless
/// target_column names another header.
inline Dataset load_csv(const std::string& path, const std::string& target_column = "") {
    NumericTable table = load_csv_table(path);
    if (table.header.size() < 2) {
        throw DataError("csv: need at least one feature and a target column");
    }

    std::size_t target_idx = table.header.size() - 1;
    if (!target_column.empty()) {
        const auto it = std::find(table.header.begin(), table.header.end(), target_column);
        if (it == table.header.end()) {
            throw DataError("csv: target column '" + target_column + "' not found");
        }
        target_idx = static_cast<std::size_t>(it - table.header.begin());
    }

    Dataset out;
    out.target_name = table.header[target_idx];
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j != target_idx) out.feature_names.push_back(table.header[j]);
    }
    out.X = Matrix(table.values.rows(), table.header.size() - 1);
    out.y.reserve(table.values.rows());
    for (std::size_t k = 0; k < table.values.rows(); ++k) {
        std::size_t col = 0;
        for (std::size_t j = 0; j < table.header.size(); ++j) {
            if (j == target_idx) {
                out.y.push_back(table.values(k, j));
            } else {
                out.X(k, col++) = table.values(k, j);
            }
        }
    }
    out.validate();
    return out;
}

/// Writes the dataset back out with full round-trip precision (%.17g),
/// target as the last column.
inline void save_csv(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream file(path);
    if (!file.is_open()) throw DataError("csv: cannot write '" + path + "'");
    for (const auto& name : dataset.feature_names) file << name << ',';
    file << dataset.target_name << '\n';
    char buf[40];
    for (std::size_t k = 0; k < dataset.n_samples(); ++k) {
        for (std::size_t j = 0; j < dataset.n_features(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", dataset.X(k, j));
            file << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", dataset.y[k]);
        file << buf << '\n';
    }
    if (!file.good()) throw DataError("csv: write to '" + path + "' failed");
}

/// Seeded shuffle of 0..m-1 followed by a prefix split; the training part
/// takes ceil(fraction * m) indices.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t m, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0) || !(fraction < 1.0)) {
        throw DataError("split: fraction must be in (0, 1)");
    }
    const auto n_train = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(m)));
    if (n_train == 0 || n_train >= m) {
        throw DataError("split: fraction " + std::to_string(fraction) + " leaves a part empty");
    }
    Rng rng(seed);
    const std::vector<std::size_t> order = shuffled_indices(m, rng);
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<long>(n_train), order.end());
    return {std::move(train), std::move(test)};
}

/// Row subset of a dataset, in the given index order.
inline Dataset take_rows(const Dataset& dataset, std::span<const std::size_t> indices) {
    Dataset out;
    out.feature_names = dataset.feature_names;
    out.target_name = dataset.target_name;
    out.X = Matrix(indices.size(), dataset.n_features());
    out.y.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto src = indices[k];
        for (std::size_t j = 0; j < dataset.n_features(); ++j) out.X(k, j) = dataset.X(src, j);
        out.y.push_back(dataset.y[src]);
    }
    return out;
}

/// Seeded train/test split.
inline std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                         std::uint64_t seed) {
    dataset.validate();
    const auto [train_idx, test_idx] = split_indices(dataset.n_samples(), fraction, seed);
    return {take_rows(dataset, train_idx), take_rows(dataset, test_idx)};
}

/// Z-score statistics per feature column, computed over the given rows.
/// Constant columns get scale 1 so the transform stays invertible.
inline std::vector<FeatureScaling> compute_scalings(const Matrix& X) {
    std::vector<FeatureScaling> out(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t k = 0; k < X.rows(); ++k) mean += X(k, j);
        mean /= static_cast<double>(X.rows());
        double var = 0.0;
        for (std::size_t k = 0; k < X.rows(); ++k) {
            const double d = X(k, j) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(X.rows()));
        out[j] = FeatureScaling{mean, sd > 0.0 ? sd : 1.0};
    }
    return out;
}

inline FeatureScaling compute_scaling(std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) {
        const double d = v - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(values.size()));
    return FeatureScaling{mean, sd > 0.0 ? sd : 1.0};
}

/// One input variable of the synthetic-data schema.
struct FeatureSpec {
    std::string name;
    std::string unit;
    double lo = 0.0;
    double hi = 1.0;
};

/// Schema for the synthetic generator: feature names, assumed units, and
/// plausible sampling ranges, plus the target's name and unit.
struct SchemaSpec {
    std::vector<FeatureSpec> features;
    std::string target_name = "target";
    std::string target_unit;

    void validate() const {
        if (features.empty()) throw ConfigError("schema: no features");
        for (const auto& f : features) {
            if (f.name.empty()) throw ConfigError("schema: feature with empty name");
            if (!std::isfinite(f.lo) || !std::isfinite(f.hi) || !(f.lo < f.hi)) {
                throw ConfigError("schema: feature '" + f.name + "' needs finite lo < hi");
            }
        }
        if (target_name.empty()) throw ConfigError("schema: empty target name");
    }

    /// Six coal/boiler variables with ranges plausible for coal-quality
    /// data, plus an elemental-mercury emission target. The ranges carry no
    /// ground-truth claim; they exist so generated data has sane units.
    static SchemaSpec mercury_default() {
        SchemaSpec s;
        s.features = {
            {"hg_inlet_ppm", "ppm", 0.02, 0.6},
            {"ash_pct", "%", 5.0, 45.0},
            {"chlorine_ppm", "ppm", 50.0, 3000.0},
            {"heating_value_mj_kg", "MJ/kg", 15.0, 35.0},
            {"sulfur_pct", "%", 0.2, 5.0},
            {"flue_temp_c", "degC", 120.0, 400.0},
        };
        s.target_name = "hg_emission_ugm3";
        s.target_unit = "ug/m3";
        return s;
    }
};

using TeacherFn = std::function<double(std::span<const double>)>;

/// Draws inputs uniformly inside the schema ranges, applies the teacher,
/// and optionally adds Gaussian noise scaled to noise_level x the standard
/// deviation of the clean targets. Deterministic under seed.
inline Dataset generate_synthetic(const SchemaSpec& schema, std::size_t m,
                                  const TeacherFn& teacher, double noise_level,
                                  std::uint64_t seed) {
    schema.validate();
    if (m == 0) throw std::invalid_argument("generate_synthetic: m must be >= 1");
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) {
        throw std::invalid_argument("generate_synthetic: noise_level must be finite and >= 0");
    }

    const std::size_t n = schema.features.size();
    Rng rng(seed);
    Dataset out;
    out.target_name = schema.target_name;
    for (const auto& f : schema.features) out.feature_names.push_back(f.name);
    out.X = Matrix(m, n);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            out.X(k, j) = uniform(rng, schema.features[j].lo, schema.features[j].hi);
        }
    }

    out.y.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        out.y[k] = teacher(out.X.row(k));
        if (!std::isfinite(out.y[k])) {
            throw NumericError("generate_synthetic: teacher produced a non-finite target");
        }
    }

    if (noise_level > 0.0) {
        const double sigma = compute_scaling(out.y).scale;
        for (std::size_t k = 0; k < m; ++k) {
            out.y[k] += gaussian(rng) * noise_level * sigma;
        }
    }

    out.validate();
    return out;
}

inline Dataset generate_synthetic(const SchemaSpec& schema, std::size_t m,
                                  const AnfisModel& teacher, double noise_level,
                                  std::uint64_t seed) {
    return generate_synthetic(
        schema, m, [&teacher](std::span<const double> x) { return teacher.evaluate(x); },
        noise_level, seed);
}

/// Named analytic teacher functions for the generator. Inputs are mapped to
/// [0, 1] by the schema ranges first, so the same shapes work for any
/// schema. "linear" is a fixed-weight affine map; "blend" adds two smooth
/// bumps on top of it for a mildly nonlinear surface.
inline TeacherFn named_teacher(const std::string& name, const SchemaSpec& schema) {
    schema.validate();
    std::vector<std::pair<double, double>> ranges;
    for (const auto& f : schema.features) ranges.emplace_back(f.lo, f.hi - f.lo);

    const auto unit_inputs = [ranges](std::span<const double> x) {
        std::vector<double> u(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            u[j] = (x[j] - ranges[j].first) / ranges[j].second;
        }
        return u;
    };

    if (name == "linear") {
        return [unit_inputs](std::span<const double> x) {
            const std::vector<double> u = unit_inputs(x);
            double acc = 1.0;
            for (std::size_t j = 0; j < u.size(); ++j) {
                acc += (j % 2 == 0 ? 1.0 : -0.5) * u[j];
            }
            return acc;
        };
    }
    if (name == "blend") {
        return [unit_inputs](std::span<const double> x) {
            const std::vector<double> u = unit_inputs(x);
            double linear = 0.0;
            double d1 = 0.0;
            double d2 = 0.0;
            for (std::size_t j = 0; j < u.size(); ++j) {
                linear += (j % 2 == 0 ? 0.8 : -0.4) * u[j];
                const double a = u[j] - 0.3;
                const double b = u[j] - 0.75;
                d1 += a * a;
                d2 += b * b;
            }
            return 2.0 + linear + 3.0 * std::exp(-1.5 * d1) + 2.0 * std::exp(-2.0 * d2);
        };
    }
    throw ConfigError("unknown teacher function '" + name + "'");
}

} // namespace anfis
