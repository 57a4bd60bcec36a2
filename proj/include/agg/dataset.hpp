#ifndef AGG_DATASET_HPP
#define AGG_DATASET_HPP

#include <Eigen/Dense>
#include <string>

#include "agg/errors.hpp"

namespace agg {

using Observation = Eigen::VectorXd;

// Labeled dataset stored column-major: points.col(i) is observation i,
// labels(i) its {0,1} label. Immutable by convention once built.
struct Dataset {
    Eigen::MatrixXd points;  // dim x n
    Eigen::VectorXi labels;  // n

    Eigen::Index size() const { return points.cols(); }
    Eigen::Index dim() const { return points.rows(); }

    void check_valid() const {
        if (points.cols() != labels.size()) {
            throw dimension_error("dataset: point count " + std::to_string(points.cols()) +
                                  " != label count " + std::to_string(labels.size()));
        }
        if (points.cols() > 0 && points.rows() == 0) {
            throw dimension_error("dataset: observations must be non-empty");
        }
        if (!points.allFinite()) {
            throw dimension_error("dataset: non-finite coordinate");
        }
        for (Eigen::Index i = 0; i < labels.size(); ++i) {
            if (labels(i) != 0 && labels(i) != 1) {
                throw config_error("dataset: label " + std::to_string(labels(i)) +
                                   " at index " + std::to_string(i) + " not in {0,1}");
            }
        }
    }

    Dataset head(Eigen::Index count) const {
        return {points.leftCols(count), labels.head(count)};
    }

    Dataset tail(Eigen::Index count) const {
        return {points.rightCols(count), labels.tail(count)};
    }
};

// Positional split of a sample of n points into the first k (base-classifier
// training half) and the remaining n-k (aggregation pool).
struct SampleSplit {
    Dataset d_k;
    Dataset e_l;
};

inline SampleSplit split(const Dataset& data, Eigen::Index k) {
    const Eigen::Index n = data.size();
    if (k < 1 || k > n - 1) {
        throw config_error("split: k=" + std::to_string(k) + " must satisfy 1 <= k <= n-1 with n=" +
                           std::to_string(n));
    }
    return {data.head(k), data.tail(n - k)};
}

}  // namespace agg

#endif
