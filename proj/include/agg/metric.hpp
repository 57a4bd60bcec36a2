#ifndef AGG_METRIC_HPP
#define AGG_METRIC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "agg/dataset.hpp"
#include "agg/errors.hpp"

namespace agg {

// The two metrics realized: plain Euclidean distance on R^d, and the L2
// distance between curves sampled on a fixed grid over [0,1], evaluated by
// the trapezoidal rule. Both reduce to a weighted squared norm, so the
// weight vector is precomputed once.
class Metric {
public:
    enum class Kind { euclidean, l2_grid };

    static Metric euclidean() { return Metric(Kind::euclidean, {}); }

    static Metric l2_grid(const Eigen::VectorXd& grid) {
        if (grid.size() < 2) {
            throw config_error("l2_grid metric: grid needs at least 2 points");
        }
        for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
            if (!(grid(i) < grid(i + 1))) {
                throw config_error("l2_grid metric: grid must be strictly increasing");
            }
        }
        if (grid(0) < 0.0 || grid(grid.size() - 1) > 1.0) {
            throw config_error("l2_grid metric: grid must lie in [0,1]");
        }
        return Metric(Kind::l2_grid, grid);
    }

    // Standard curve grid: 101 equispaced points t_i = i/100.
    static Metric standard_curve_grid() {
        Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
        return l2_grid(g);
    }

    Kind kind() const { return kind_; }
    const Eigen::VectorXd& grid() const { return grid_; }

    double squared_distance(const Observation& a, const Observation& b) const {
        check_dims(a, b);
        if (kind_ == Kind::euclidean) {
            return (a - b).squaredNorm();
        }
        return (a - b).cwiseAbs2().dot(weights_);
    }

    double distance(const Observation& a, const Observation& b) const {
        return std::sqrt(squared_distance(a, b));
    }

    // Squared distances from one query to every column of a point matrix.
    Eigen::VectorXd squared_distances_to(const Eigen::MatrixXd& points,
                                         const Observation& query) const {
        if (points.rows() != query.size()) {
            throw dimension_error("metric: query dim " + std::to_string(query.size()) +
                                  " != data dim " + std::to_string(points.rows()));
        }
        if (kind_ == Kind::l2_grid && grid_.size() != query.size()) {
            throw dimension_error("l2_grid metric: grid length mismatch");
        }
        Eigen::MatrixXd diff = points.colwise() - query;
        if (kind_ == Kind::euclidean) {
            return diff.colwise().squaredNorm().transpose();
        }
        return diff.cwiseAbs2().transpose() * weights_;
    }

private:
    Metric(Kind kind, Eigen::VectorXd grid) : kind_(kind), grid_(std::move(grid)) {
        if (kind_ == Kind::l2_grid) {
            const Eigen::Index n = grid_.size();
            weights_.resize(n);
            weights_(0) = 0.5 * (grid_(1) - grid_(0));
            for (Eigen::Index i = 1; i + 1 < n; ++i) {
                weights_(i) = 0.5 * (grid_(i + 1) - grid_(i - 1));
            }
            weights_(n - 1) = 0.5 * (grid_(n - 1) - grid_(n - 2));
        }
    }

    void check_dims(const Observation& a, const Observation& b) const {
        if (a.size() != b.size()) {
            throw dimension_error("metric: dimension mismatch " + std::to_string(a.size()) +
                                  " vs " + std::to_string(b.size()));
        }
        if (a.size() == 0) {
            throw dimension_error("metric: empty observation");
        }
        if (kind_ == Kind::l2_grid && grid_.size() != a.size()) {
            throw dimension_error("l2_grid metric: grid length " + std::to_string(grid_.size()) +
                                  " != observation length " + std::to_string(a.size()));
        }
    }

    Kind kind_;
    Eigen::VectorXd grid_;
    Eigen::VectorXd weights_;
};

}  // namespace agg

#endif
