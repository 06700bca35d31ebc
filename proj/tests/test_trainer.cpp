#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "anfis/clustering.hpp"
#include "anfis/trainer.hpp"
#include "support/builders.hpp"

using namespace anfis;
using Catch::Matchers::WithinRel;

namespace {

TrainConfig quick_config(std::uint64_t seed, std::size_t iterations, std::size_t n_clusters = 4,
                         std::size_t n_particles = 20) {
    TrainConfig config;
    config.seed = seed;
    config.n_clusters = n_clusters;
    config.pso.iterations = iterations;
    config.pso.n_particles = n_particles;
    return config;
}

} // namespace

TEST_CASE("packing and unpacking premises is the identity", "[trainer]") {
    Rng rng(5);
    const AnfisModel model = testsupport::random_model(rng, 3, 4, true);
    const std::vector<double> packed = pack_parameters(model);
    REQUIRE(packed.size() == 4 * 3 * 2);
    const AnfisModel back = unpack_parameters(packed, model);
    CHECK(back == model);
}

TEST_CASE("width slots decode through the positivity transform", "[trainer]") {
    Rng rng(7);
    const AnfisModel model = testsupport::random_model(rng, 2, 2);
    std::vector<double> packed = pack_parameters(model);
    packed[1] = -0.8; // rule 0, input 0 width slot
    packed[3] = 0.0;  // rule 0, input 1 width slot
    const AnfisModel decoded = unpack_parameters(packed, model);
    CHECK(decoded.rules()[0].premise[0].width == 0.8);
    CHECK(decoded.rules()[0].premise[1].width == kWidthFloor);
    for (const Rule& rule : decoded.rules()) {
        for (const GaussianMF& mf : rule.premise) REQUIRE(mf.width >= kWidthFloor);
    }
}

TEST_CASE("unpacking rejects wrong lengths", "[trainer]") {
    Rng rng(9);
    const AnfisModel model = testsupport::random_model(rng, 2, 2);
    CHECK_THROWS_AS(unpack_parameters(std::vector<double>(7, 0.0), model), ShapeError);
}

TEST_CASE("cluster-seeded premises recover an exactly clusterable teacher", "[trainer]") {
    const testsupport::BlobRecovery blobs = testsupport::two_blob_recovery(71);
    const std::vector<ClusterSeed> seeds = cluster(blobs.X, 2, 71);
    const AnfisModel seeded = seed_model(seeds, 2);
    const double rmse = premise_fitness(pack_parameters(seeded), seeded, blobs.X, blobs.y);
    CHECK(rmse < 1e-6);
}

TEST_CASE("a constant target is absorbed by the bias", "[trainer]") {
    Rng rng(13);
    const AnfisModel tmpl = testsupport::random_model(rng, 2, 3);
    Matrix X(20, 2);
    for (std::size_t k = 0; k < 20; ++k) {
        for (std::size_t j = 0; j < 2; ++j) X(k, j) = uniform(rng, -3.0, 3.0);
    }
    const std::vector<double> y(20, 4.5);
    const double rmse = premise_fitness(pack_parameters(tmpl), tmpl, X, y);
    CHECK(rmse < 1e-10);
}

TEST_CASE("fitness is never negative and maps failures to infinity", "[trainer]") {
    Rng rng(17);
    const AnfisModel tmpl = testsupport::random_model(rng, 2, 2);
    Matrix X(12, 2);
    std::vector<double> y;
    for (std::size_t k = 0; k < 12; ++k) {
        for (std::size_t j = 0; j < 2; ++j) X(k, j) = uniform(rng, -3.0, 3.0);
        y.push_back(uniform(rng, -2.0, 2.0));
    }
    for (int i = 0; i < 50; ++i) {
        std::vector<double> packed(8);
        for (double& v : packed) v = uniform(rng, -5.0, 5.0);
        REQUIRE(premise_fitness(packed, tmpl, X, y) >= 0.0);
    }

    // Premises so far from the data that every firing strength underflows.
    std::vector<double> doomed(8);
    for (std::size_t i = 0; i < 8; i += 2) {
        doomed[i] = 1e9;
        doomed[i + 1] = 1e-6;
    }
    CHECK(premise_fitness(doomed, tmpl, X, y) == std::numeric_limits<double>::infinity());
}

TEST_CASE("a one-iteration run produces a well-formed report", "[trainer]") {
    const Dataset data = testsupport::random_dataset(23, 40, 0.05);
    const TrainReport report = train(data, quick_config(23, 1));
    CHECK(report.rmse_history.size() == 1);
    CHECK(report.model.n_inputs() == data.n_features());
    CHECK(report.train_indices.size() == 30);
    CHECK(report.test_indices.size() == 10);
    CHECK(report.train_actual.size() == 30);
    CHECK(report.train_predicted.size() == 30);
    CHECK(report.test_actual.size() == 10);
    CHECK(report.test_predicted.size() == 10);
    CHECK(std::isfinite(report.final_rmse));
}

TEST_CASE("parameter bookkeeping counts premises and the target", "[trainer]") {
    const Dataset data = testsupport::random_dataset(29, 82, 0.02);
    TrainConfig config = quick_config(29, 2, 10);
    const TrainReport report = train(data, config);
    CHECK(report.n_tunable == 140);
    CHECK(report.n_premise_parameters == 120);
}

TEST_CASE("training is deterministic per seed", "[trainer]") {
    const Dataset data = testsupport::random_dataset(31, 45, 0.05);
    const TrainReport a = train(data, quick_config(31, 5));
    const TrainReport b = train(data, quick_config(31, 5));
    CHECK(a.model == b.model);
    CHECK(a.rmse_history == b.rmse_history);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);
    CHECK(a.train_predicted == b.train_predicted);
    CHECK(a.test_predicted == b.test_predicted);
    CHECK(a.initial_rmse == b.initial_rmse);
    CHECK(a.final_rmse == b.final_rmse);

    const TrainReport c = train(data, quick_config(32, 5));
    CHECK(a.rmse_history != c.rmse_history);
}

TEST_CASE("optimization never ends worse than the clustered start", "[trainer]") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Dataset data = testsupport::random_dataset(seed * 7, 50, 0.1);
        TrainConfig config = quick_config(seed, 15);
        config.ridge = 1e-6;
        const TrainReport report = train(data, config);
        REQUIRE(report.final_rmse <= report.initial_rmse);
        for (std::size_t i = 1; i < report.rmse_history.size(); ++i) {
            REQUIRE(report.rmse_history[i].second <= report.rmse_history[i - 1].second);
        }
        REQUIRE(report.final_rmse == report.rmse_history.back().second);
    }
}

TEST_CASE("split indices partition the training data", "[trainer]") {
    const Dataset data = testsupport::random_dataset(37, 33, 0.05);
    const TrainReport report = train(data, quick_config(37, 2));
    std::set<std::size_t> all(report.train_indices.begin(), report.train_indices.end());
    for (std::size_t idx : report.test_indices) {
        REQUIRE(all.insert(idx).second); // disjoint
    }
    CHECK(all.size() == 33);
}

TEST_CASE("reported series use original target units", "[trainer]") {
    const Dataset data = testsupport::random_dataset(41, 40, 0.02);
    const TrainReport report = train(data, quick_config(41, 3));
    // The actual values must be rows of the original target, not normalized.
    for (double a : report.train_actual) {
        REQUIRE(std::find(data.y.begin(), data.y.end(), a) != data.y.end());
    }
    // Predictions come from the final model evaluated on raw inputs.
    const Dataset train_rows = take_rows(data, report.train_indices);
    CHECK(report.train_predicted == report.model.evaluate_batch(train_rows.X));
}

TEST_CASE("the final model carries the training normalization", "[trainer]") {
    const Dataset data = testsupport::random_dataset(43, 36, 0.05);
    const TrainReport report = train(data, quick_config(43, 2));
    REQUIRE(report.model.input_scaling().size() == data.n_features());
    const Dataset train_rows = take_rows(data, report.train_indices);
    const std::vector<FeatureScaling> expected = compute_scalings(train_rows.X);
    for (std::size_t j = 0; j < expected.size(); ++j) {
        CHECK(report.model.input_scaling()[j] == expected[j]);
    }
    CHECK(report.model.target_scaling() == compute_scaling(train_rows.y));
}

TEST_CASE("training rejects bad configurations and thin data", "[trainer]") {
    const Dataset data = testsupport::random_dataset(47, 12, 0.0);

    TrainConfig bad = quick_config(1, 1);
    bad.n_clusters = 0;
    CHECK_THROWS_AS(train(data, bad), ConfigError);

    bad = quick_config(1, 1);
    bad.split_fraction = 1.0;
    CHECK_THROWS_AS(train(data, bad), ConfigError);

    bad = quick_config(1, 1);
    bad.premise_bounds_scale = 0.0;
    CHECK_THROWS_AS(train(data, bad), ConfigError);

    bad = quick_config(1, 1);
    bad.ridge = -1.0;
    CHECK_THROWS_AS(train(data, bad), ConfigError);

    bad = quick_config(1, 1);
    bad.pso.iterations = 0;
    CHECK_THROWS_AS(train(data, bad), ConfigError);

    // 12 rows split 75/25 leaves 9 training rows, fewer than 10 clusters.
    CHECK_THROWS_AS(train(data, quick_config(1, 1, 10)), InsufficientDataError);
}

TEST_CASE("a planted teacher is recovered on held-out data", "[trainer]") {
    const SchemaSpec schema = SchemaSpec::mercury_default();
    const AnfisModel teacher = testsupport::planted_teacher(schema, 102, 0.05);
    const Dataset data = generate_synthetic(schema, 82, teacher, 0.0, 2);
    TrainConfig config;
    config.seed = 2;
    config.ridge = 1e-6;
    config.pso.iterations = 150;
    const TrainReport report = train(data, config);
    REQUIRE(report.test_metrics.r2.has_value());
    CHECK(*report.test_metrics.r2 >= 0.99);
}
