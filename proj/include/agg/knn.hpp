#ifndef AGG_KNN_HPP
#define AGG_KNN_HPP

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "agg/dataset.hpp"
#include "agg/errors.hpp"
#include "agg/metric.hpp"
#include "agg/random.hpp"

namespace agg {

namespace detail {

// Training indices sorted by (distance to query, index). The index tie-break
// makes every downstream vote deterministic.
inline std::vector<int> neighbor_order(const Metric& metric, const Eigen::MatrixXd& points,
                                       const Observation& query) {
    const Eigen::VectorXd d2 = metric.squared_distances_to(points, query);
    std::vector<int> order(static_cast<std::size_t>(points.cols()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (d2(a) != d2(b)) return d2(a) < d2(b);
        return a < b;
    });
    return order;
}

// Majority label among the first k entries of a neighbor order; k odd, so no
// vote ties.
inline int majority_of_first(const std::vector<int>& order, const Eigen::VectorXi& labels,
                             int k) {
    int ones = 0;
    for (int i = 0; i < k; ++i) ones += labels(order[static_cast<std::size_t>(i)]);
    return 2 * ones > k ? 1 : 0;
}

inline void check_knn_k(int k_nn, Eigen::Index train_size) {
    if (k_nn < 1 || k_nn % 2 == 0) {
        throw config_error("knn: neighbor count " + std::to_string(k_nn) +
                           " must be a positive odd integer");
    }
    if (k_nn > train_size) {
        throw config_error("knn: neighbor count " + std::to_string(k_nn) +
                           " exceeds training size " + std::to_string(train_size));
    }
}

}  // namespace detail

// k-nearest-neighbor rule fitted against an immutable training set. Exact
// search by linear scan; distance ties broken by lower sample index.
class KnnClassifier {
public:
    KnnClassifier(std::shared_ptr<const Dataset> train, Metric metric, int k_nn)
        : train_(std::move(train)), metric_(std::move(metric)), k_nn_(k_nn) {
        detail::check_knn_k(k_nn_, train_->size());
    }

    int neighbors() const { return k_nn_; }
    const Dataset& training() const { return *train_; }

    int predict(const Observation& x) const {
        const Eigen::VectorXd d2 = metric_.squared_distances_to(train_->points, x);
        const int n = static_cast<int>(train_->size());
        if (k_nn_ == n) {
            // whole set votes, no selection needed
            const int ones = train_->labels.sum();
            return 2 * ones > n ? 1 : 0;
        }
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        auto cmp = [&](int a, int b) {
            if (d2(a) != d2(b)) return d2(a) < d2(b);
            return a < b;
        };
        std::nth_element(idx.begin(), idx.begin() + (k_nn_ - 1), idx.end(), cmp);
        int ones = 0;
        for (int i = 0; i < k_nn_; ++i) ones += train_->labels(idx[static_cast<std::size_t>(i)]);
        return 2 * ones > k_nn_ ? 1 : 0;
    }

private:
    std::shared_ptr<const Dataset> train_;
    Metric metric_;
    int k_nn_;
};

inline KnnClassifier fit_knn(std::shared_ptr<const Dataset> train, const Metric& metric,
                             int k_nn) {
    return KnnClassifier(std::move(train), metric, k_nn);
}

inline KnnClassifier fit_knn(const Dataset& train, const Metric& metric, int k_nn) {
    return KnnClassifier(std::make_shared<Dataset>(train), metric, k_nn);
}

// Ensemble of kNN rules over one training set and one metric, differing only
// in the neighbor count. One distance pass per query serves all members.
class KnnEnsemble {
public:
    KnnEnsemble(std::shared_ptr<const Dataset> train, Metric metric,
                std::vector<int> neighbor_counts)
        : train_(std::move(train)), metric_(std::move(metric)), ks_(std::move(neighbor_counts)) {
        if (ks_.empty()) throw config_error("ensemble: empty neighbor list");
        for (int k : ks_) detail::check_knn_k(k, train_->size());
    }

    int size() const { return static_cast<int>(ks_.size()); }
    const std::vector<int>& neighbor_counts() const { return ks_; }
    const Dataset& training() const { return *train_; }
    const Metric& metric() const { return metric_; }

    KnnClassifier member(int m) const {
        return KnnClassifier(train_, metric_, ks_.at(static_cast<std::size_t>(m)));
    }

    // Packed prediction bits, bit m = member m's label for x.
    std::uint32_t predictions(const Observation& x) const {
        const auto order = detail::neighbor_order(metric_, train_->points, x);
        const int max_k = *std::max_element(ks_.begin(), ks_.end());
        std::vector<int> ones_prefix(static_cast<std::size_t>(max_k) + 1, 0);
        for (int i = 0; i < max_k; ++i) {
            ones_prefix[static_cast<std::size_t>(i) + 1] =
                ones_prefix[static_cast<std::size_t>(i)] +
                train_->labels(order[static_cast<std::size_t>(i)]);
        }
        std::uint32_t bits = 0;
        for (std::size_t m = 0; m < ks_.size(); ++m) {
            const int k = ks_[m];
            if (2 * ones_prefix[static_cast<std::size_t>(k)] > k) bits |= (1u << m);
        }
        return bits;
    }

private:
    std::shared_ptr<const Dataset> train_;
    Metric metric_;
    std::vector<int> ks_;
};

// M distinct odd neighbor counts drawn uniformly without replacement from
// {1, 3, ..., K_max}, K_max the largest odd integer not exceeding
// min{#positives, #negatives} of the training set. Returned ascending.
inline std::vector<int> draw_random_odd_ensemble(const Dataset& train, int count, Rng& rng) {
    if (count < 1) throw config_error("random odd ensemble: M must be >= 1");
    const int positives = train.labels.sum();
    const int bound = std::min(positives, static_cast<int>(train.size()) - positives);
    const int k_max = bound % 2 == 0 ? bound - 1 : bound;
    const int pool = (k_max + 1) / 2;  // count of odd values in [1, k_max]
    if (pool < count) {
        throw config_error("random odd ensemble: need " + std::to_string(count) +
                           " distinct odd values but min{#pos,#neg}=" + std::to_string(bound) +
                           " admits only " + std::to_string(pool));
    }
    std::vector<int> idx(static_cast<std::size_t>(pool));
    std::iota(idx.begin(), idx.end(), 0);
    for (int j = 0; j < count; ++j) {
        const auto pick = j + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(pool - j)));
        std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
    }
    std::vector<int> ks(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) ks[static_cast<std::size_t>(j)] = 2 * idx[static_cast<std::size_t>(j)] + 1;
    std::sort(ks.begin(), ks.end());
    return ks;
}

// Leave-one-out misclassification counts over the training set, one per
// candidate neighbor count.
inline std::vector<int> loo_error_counts(const Dataset& train, const Metric& metric,
                                         const std::vector<int>& candidate_ks) {
    const int n = static_cast<int>(train.size());
    std::vector<int> errors(candidate_ks.size(), 0);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd d2 = metric.squared_distances_to(train.points, train.points.col(i));
        std::vector<int> order;
        order.reserve(static_cast<std::size_t>(n) - 1);
        for (int j = 0; j < n; ++j) {
            if (j != i) order.push_back(j);
        }
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (d2(a) != d2(b)) return d2(a) < d2(b);
            return a < b;
        });
        std::vector<int> prefix(order.size() + 1, 0);
        for (std::size_t j = 0; j < order.size(); ++j) {
            prefix[j + 1] = prefix[j] + train.labels(order[j]);
        }
        for (std::size_t c = 0; c < candidate_ks.size(); ++c) {
            const int k = candidate_ks[c];
            const int vote = 2 * prefix[static_cast<std::size_t>(k)] > k ? 1 : 0;
            if (vote != train.labels(i)) ++errors[c];
        }
    }
    return errors;
}

// Cross-validated kNN: the candidate with minimal leave-one-out error, ties
// to the smaller neighbor count; returned fitted on the full set.
inline KnnClassifier cv_select_knn(std::shared_ptr<const Dataset> train, const Metric& metric,
                                   const std::vector<int>& candidate_ks) {
    if (candidate_ks.empty()) throw config_error("cv knn: empty candidate list");
    for (int k : candidate_ks) detail::check_knn_k(k, train->size() - 1);
    const std::vector<int> errors = loo_error_counts(*train, metric, candidate_ks);
    int best_k = candidate_ks[0];
    int best_err = errors[0];
    for (std::size_t c = 1; c < candidate_ks.size(); ++c) {
        if (errors[c] < best_err || (errors[c] == best_err && candidate_ks[c] < best_k)) {
            best_err = errors[c];
            best_k = candidate_ks[c];
        }
    }
    return KnnClassifier(std::move(train), metric, best_k);
}

}  // namespace agg

#endif
