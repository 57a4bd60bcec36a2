#include <doctest.h>

#include <cmath>

#include "agg/generators.hpp"
#include "agg/random.hpp"
#include "agg/smoothing.hpp"

using namespace agg;

TEST_CASE("constant curves are fixed points") {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
    const Eigen::VectorXd curve = Eigen::VectorXd::Constant(101, 3.7);
    for (double h : {0.05, 0.3, 2.0}) {
        const Eigen::VectorXd smoothed = nw_smooth(curve, grid, h);
        for (Eigen::Index i = 0; i < 101; ++i) {
            REQUIRE(smoothed(i) == doctest::Approx(3.7).epsilon(1e-12));
        }
    }
}

TEST_CASE("huge bandwidth flattens to the grid mean") {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
    Rng rng(1);
    Eigen::VectorXd curve(101);
    for (Eigen::Index i = 0; i < 101; ++i) curve(i) = rng.uniform(-2.0, 2.0);
    const double mean = curve.mean();
    const Eigen::VectorXd smoothed = nw_smooth(curve, grid, 1e6);
    for (Eigen::Index i = 0; i < 101; ++i) {
        REQUIRE(std::abs(smoothed(i) - mean) <= 1e-9 * std::abs(mean));
    }
}

TEST_CASE("hand-computed kernel sums on a 3-point grid") {
    Eigen::VectorXd grid(3);
    grid << 0.0, 0.5, 1.0;
    Eigen::VectorXd curve(3);
    curve << 0.0, 1.0, 0.0;
    const Eigen::VectorXd smoothed = nw_smooth(curve, grid, 0.5);
    const double w0 = 1.0, w1 = std::exp(-0.5), w2 = std::exp(-2.0);
    CHECK(smoothed(0) == doctest::Approx(w1 / (w0 + w1 + w2)));
    CHECK(smoothed(1) == doctest::Approx(w0 / (w1 + w0 + w1)));
    CHECK(smoothed(2) == doctest::Approx(w1 / (w2 + w1 + w0)));
}

TEST_CASE("smoothing errors") {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
    CHECK_THROWS_AS(nw_smooth(Eigen::VectorXd::Zero(5), grid, 0.0), config_error);
    CHECK_THROWS_AS(nw_smooth(Eigen::VectorXd::Zero(4), grid, 0.1), dimension_error);
    CHECK_THROWS_AS(SmootherSpec({-0.1, 0.7}).check_valid(), config_error);
}

TEST_CASE("linearity and range confinement") {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd f(101), g(101);
        for (Eigen::Index i = 0; i < 101; ++i) {
            f(i) = rng.uniform(-3.0, 3.0);
            g(i) = rng.uniform(-3.0, 3.0);
        }
        const double h = rng.uniform(0.02, 1.0);
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        const Eigen::VectorXd lhs = nw_smooth(a * f + b * g, grid, h);
        const Eigen::VectorXd rhs = a * nw_smooth(f, grid, h) + b * nw_smooth(g, grid, h);
        REQUIRE(((lhs - rhs).cwiseAbs().maxCoeff()) <=
                1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
        const Eigen::VectorXd sf = nw_smooth(f, grid, h);
        REQUIRE(sf.maxCoeff() <= f.maxCoeff() + 1e-12);
        REQUIRE(sf.minCoeff() >= f.minCoeff() - 1e-12);
    }
}

TEST_CASE("per-population smoothing of a training set") {
    const FunctionalSpec spec = FunctionalSpec::model_II();
    Rng rng(3);
    const Dataset train = gen_functional(spec, 10, rng);

    const Dataset same = smooth_training_set(train, spec.grid, {0.2, 0.2});
    const Eigen::MatrixXd w = nw_weight_matrix(spec.grid, 0.2);
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        REQUIRE(((same.points.col(i) - w * train.points.col(i)).cwiseAbs().maxCoeff()) < 1e-12);
    }

    const Dataset mixed = smooth_training_set(train, spec.grid, {0.15, 0.7});
    CHECK(mixed.labels == train.labels);
    CHECK(mixed.size() == train.size());
    const Eigen::MatrixXd w1 = nw_weight_matrix(spec.grid, 0.15);
    const Eigen::MatrixXd w2 = nw_weight_matrix(spec.grid, 0.7);
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        const Eigen::MatrixXd& w_i = train.labels(i) == 1 ? w1 : w2;
        REQUIRE(((mixed.points.col(i) - w_i * train.points.col(i)).cwiseAbs().maxCoeff()) < 1e-12);
    }

    // constant curves pass through unchanged
    Dataset flat;
    flat.points = Eigen::MatrixXd::Constant(101, 4, 1.5);
    flat.labels.resize(4);
    flat.labels << 1, 0, 1, 0;
    const Dataset still = smooth_training_set(flat, spec.grid, {0.15, 0.7});
    REQUIRE(((still.points - flat.points).cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("bandwidth cross-validation") {
    const FunctionalSpec spec = FunctionalSpec::model_II();
    Rng rng(4);
    const Dataset train = shuffle_dataset(gen_functional(spec, 15, rng), rng);

    // forced choice
    Rng r1(5);
    const auto single = cv_bandwidths(train, spec.grid, {0.3}, {1, 3}, 0.0, r1);
    CHECK(single.first == 0.3);
    CHECK(single.second == 0.3);

    // determinism replay on a small grid
    Rng r2(6);
    Rng r3(6);
    const auto a = cv_bandwidths(train, spec.grid, {0.15, 0.7}, {1, 3}, 0.0, r2);
    const auto b = cv_bandwidths(train, spec.grid, {0.15, 0.7}, {1, 3}, 0.0, r3);
    CHECK(a == b);

    // degenerate single-label training set
    Dataset ones = train;
    ones.labels.setOnes();
    Rng r4(7);
    CHECK_THROWS_AS(cv_bandwidths(ones, spec.grid, {0.3}, {1}, 0.0, r4), config_error);

    Rng r5(8);
    CHECK_THROWS_AS(cv_bandwidths(train, spec.grid, {}, {1}, 0.0, r5), config_error);
}
