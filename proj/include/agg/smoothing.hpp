#ifndef AGG_SMOOTHING_HPP
#define AGG_SMOOTHING_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "agg/aggregate.hpp"
#include "agg/dataset.hpp"
#include "agg/errors.hpp"
#include "agg/generators.hpp"
#include "agg/knn.hpp"
#include "agg/metric.hpp"

namespace agg {

// Per-population Nadaraya-Watson bandwidths; population 1 = label 1.
struct SmootherSpec {
    double h1 = 0.15;
    double h2 = 0.7;

    void check_valid() const {
        if (!(h1 > 0.0) || !(h2 > 0.0)) throw config_error("smoother: bandwidths must be > 0");
    }
};

// Gaussian-kernel weight matrix for smoothing values on a fixed grid:
// row i holds the normalized kernel weights centered at t_i. The normal
// density's constant cancels in the ratio and is omitted.
inline Eigen::MatrixXd nw_weight_matrix(const Eigen::VectorXd& grid, double bandwidth) {
    if (!(bandwidth > 0.0)) throw config_error("nw_smooth: bandwidth must be > 0");
    const Eigen::Index g = grid.size();
    Eigen::MatrixXd w(g, g);
    for (Eigen::Index i = 0; i < g; ++i) {
        for (Eigen::Index j = 0; j < g; ++j) {
            const double u = (grid(i) - grid(j)) / bandwidth;
            w(i, j) = std::exp(-0.5 * u * u);
        }
        w.row(i) /= w.row(i).sum();
    }
    return w;
}

inline Eigen::VectorXd nw_smooth(const Eigen::VectorXd& curve, const Eigen::VectorXd& grid,
                                 double bandwidth) {
    if (curve.size() != grid.size()) {
        throw dimension_error("nw_smooth: curve/grid length mismatch");
    }
    return nw_weight_matrix(grid, bandwidth) * curve;
}

// Smooths label-1 curves with h1 and label-0 curves with h2; labels and
// order unchanged. Test-time queries stay raw; this only ever runs on
// training material.
inline Dataset smooth_training_set(const Dataset& train, const Eigen::VectorXd& grid,
                                   const SmootherSpec& spec) {
    spec.check_valid();
    if (train.dim() != grid.size()) {
        throw dimension_error("smooth_training_set: curves not on the given grid");
    }
    const Eigen::MatrixXd w1 = nw_weight_matrix(grid, spec.h1);
    const Eigen::MatrixXd w2 = nw_weight_matrix(grid, spec.h2);
    Dataset out;
    out.points.resize(train.dim(), train.size());
    out.labels = train.labels;
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        out.points.col(i) = (train.labels(i) == 1 ? w1 : w2) * train.points.col(i);
    }
    return out;
}

// Bandwidth pair selection by running the full pipeline (smooth the fitting
// half, fit the ensemble on its first part, aggregate over the rest,
// classify the raw held-out half) for every pair on the grid, over a fixed
// number of random 50/50 splits. Ties go to the smaller (h1, h2).
inline std::pair<double, double> cv_bandwidths(const Dataset& train, const Eigen::VectorXd& grid,
                                               const std::vector<double>& bandwidth_grid,
                                               const std::vector<int>& neighbor_counts,
                                               double alpha, Rng& rng, int shuffles = 5,
                                               double k_fraction = 0.6) {
    if (bandwidth_grid.empty()) throw config_error("cv_bandwidths: empty bandwidth grid");
    const int positives = train.labels.sum();
    if (positives == 0 || positives == train.size()) {
        throw config_error("cv_bandwidths: training set must contain both labels");
    }
    const Eigen::Index n = train.size();
    const Eigen::Index half = n / 2;
    if (half < 2) throw config_error("cv_bandwidths: training set too small");

    // identical splits for every candidate pair
    std::vector<Dataset> fit_halves;
    std::vector<Dataset> held_halves;
    for (int s = 0; s < shuffles; ++s) {
        const Dataset shuffled = shuffle_dataset(train, rng);
        fit_halves.push_back(shuffled.head(half));
        held_halves.push_back(shuffled.tail(n - half));
    }
    Eigen::Index k = static_cast<Eigen::Index>(k_fraction * static_cast<double>(half));
    k = std::max<Eigen::Index>(1, std::min(k, half - 1));

    const Metric metric = Metric::l2_grid(grid);
    double best_h1 = bandwidth_grid.front();
    double best_h2 = bandwidth_grid.front();
    long long best_errors = -1;
    for (double h1 : bandwidth_grid) {
        for (double h2 : bandwidth_grid) {
            long long errors = 0;
            for (int s = 0; s < shuffles; ++s) {
                const Dataset smoothed =
                    smooth_training_set(fit_halves[static_cast<std::size_t>(s)], grid, {h1, h2});
                const SampleSplit sp = split(smoothed, k);
                KnnEnsemble ensemble(std::make_shared<Dataset>(sp.d_k), metric, neighbor_counts);
                const AggregatedClassifier clf = fit_aggregate(ensemble, sp, alpha);
                const Dataset& held = held_halves[static_cast<std::size_t>(s)];
                for (Eigen::Index i = 0; i < held.size(); ++i) {
                    if (clf.classify(held.points.col(i)) != held.labels(i)) ++errors;
                }
            }
            if (best_errors < 0 || errors < best_errors) {
                best_errors = errors;
                best_h1 = h1;
                best_h2 = h2;
            }
        }
    }
    return {best_h1, best_h2};
}

}  // namespace agg

#endif
