#ifndef AGG_AGGREGATE_HPP
#define AGG_AGGREGATE_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "agg/dataset.hpp"
#include "agg/errors.hpp"
#include "agg/knn.hpp"

namespace agg {

// Binary prediction pattern of an M-member ensemble at one point, packed
// into the low M bits.
struct PatternVector {
    std::uint32_t bits = 0;
    int length = 0;

    int bit(int m) const { return (bits >> m) & 1u; }

    friend bool operator==(const PatternVector&, const PatternVector&) = default;
};

constexpr int kMaxEnsembleSize = 16;

inline void check_same_length(const PatternVector& p, const PatternVector& q) {
    if (p.length != q.length) {
        throw dimension_error("pattern length mismatch: " + std::to_string(p.length) + " vs " +
                              std::to_string(q.length));
    }
    if (p.length < 1 || p.length > kMaxEnsembleSize) {
        throw dimension_error("pattern length out of range: " + std::to_string(p.length));
    }
}

inline int mismatch_count(const PatternVector& p, const PatternVector& q) {
    check_same_length(p, q);
    return std::popcount((p.bits ^ q.bits) & ((1u << p.length) - 1u));
}

// Fraction of ensemble members on which two patterns agree.
inline double agreement_fraction(const PatternVector& p, const PatternVector& q) {
    const int matches = p.length - mismatch_count(p, q);
    return static_cast<double>(matches) / p.length;
}

// Tolerance in the agreement-threshold comparison. Agreement fractions live
// on the lattice {0, 1/M, ..., 1}, and "agreement >= 1 - alpha" is meant as
// "at most floor(alpha*M) mismatches"; without a tolerance, IEEE rounding of
// 1 - alpha can flip the comparison for alphas like 1/3 that sit exactly on
// a lattice point. 1e-12 is far below the lattice spacing 1/M for any
// supported M.
constexpr double kAgreementTolerance = 1e-12;

inline bool agreement_passes(int matches, int ensemble_size, double alpha) {
    return static_cast<double>(matches) / ensemble_size >= 1.0 - alpha - kAgreementTolerance;
}

// Largest mismatch count d such that an agreement fraction of (M-d)/M still
// passes the threshold "agreement >= 1 - alpha"; the popcount test against
// this bound qualifies exactly the voters the per-member indicator sum does.
inline int max_allowed_mismatches(int ensemble_size, double alpha) {
    int allowed = 0;
    for (int d = 1; d <= ensemble_size; ++d) {
        if (agreement_passes(ensemble_size - d, ensemble_size, alpha)) {
            allowed = d;
        } else {
            break;
        }
    }
    return allowed;
}

// Voting pool over prediction patterns: holds the pattern and label of every
// aggregation-sample point and answers weighted-vote scores for a query
// pattern. A point votes when its pattern agrees with the query's on at
// least a (1-alpha) fraction of members; with alpha=0 this is exact pattern
// equality. The score is the mean label over voters, 0 when nobody votes.
class PatternAggregator {
public:
    PatternAggregator(std::vector<PatternVector> pool_patterns, std::vector<int> pool_labels,
                      double alpha)
        : patterns_(std::move(pool_patterns)),
          labels_(std::move(pool_labels)),
          alpha_(alpha) {
        if (alpha_ < 0.0 || alpha_ >= 1.0) {
            throw config_error("aggregator: alpha must lie in [0,1)");
        }
        if (patterns_.empty() || patterns_.size() != labels_.size()) {
            throw config_error("aggregator: pool patterns and labels must be nonempty and equal-sized");
        }
        length_ = patterns_.front().length;
        if (length_ < 1 || length_ > kMaxEnsembleSize) {
            throw config_error("aggregator: ensemble size out of range");
        }
        for (const auto& p : patterns_) {
            if (p.length != length_) throw config_error("aggregator: ragged pool patterns");
        }
        for (int y : labels_) {
            if (y != 0 && y != 1) throw config_error("aggregator: pool label not in {0,1}");
        }
        max_mismatch_ = max_allowed_mismatches(length_, alpha_);
        // per-pattern-code label counts; scoring then touches 2^M cells
        // instead of l pool entries
        counts_.assign(std::size_t{1} << length_, {0, 0});
        for (std::size_t j = 0; j < patterns_.size(); ++j) {
            counts_[patterns_[j].bits][static_cast<std::size_t>(labels_[j])] += 1;
        }
    }

    int pattern_length() const { return length_; }
    double alpha() const { return alpha_; }
    int max_mismatches() const { return max_mismatch_; }
    const std::vector<PatternVector>& pool_patterns() const { return patterns_; }
    const std::vector<int>& pool_labels() const { return labels_; }

    double score(const PatternVector& query) const {
        if (query.length != length_) {
            throw dimension_error("aggregator: query pattern length mismatch");
        }
        long long voters = 0;
        long long positive = 0;
        for (std::uint32_t code = 0; code < counts_.size(); ++code) {
            const auto& cell = counts_[code];
            if (cell[0] + cell[1] == 0) continue;
            if (std::popcount(code ^ query.bits) <= max_mismatch_) {
                voters += cell[0] + cell[1];
                positive += cell[1];
            }
        }
        if (voters == 0) return 0.0;  // 0/0 convention
        return static_cast<double>(positive) / static_cast<double>(voters);
    }

    int classify(const PatternVector& query) const { return score(query) > 0.5 ? 1 : 0; }

private:
    std::vector<PatternVector> patterns_;
    std::vector<int> labels_;
    double alpha_;
    int length_ = 0;
    int max_mismatch_ = 0;
    std::vector<std::array<int, 2>> counts_;
};

inline PatternVector pattern_of(const KnnEnsemble& ensemble, const Observation& x) {
    return {ensemble.predictions(x), ensemble.size()};
}

// The aggregation-type classifier: an ensemble fitted on the first half of
// the split plus a voting pool of prediction patterns over the second half.
// Classification never touches raw pool coordinates again.
class AggregatedClassifier {
public:
    AggregatedClassifier(KnnEnsemble ensemble, PatternAggregator pool)
        : ensemble_(std::move(ensemble)), pool_(std::move(pool)) {}

    const KnnEnsemble& ensemble() const { return ensemble_; }
    const PatternAggregator& pool() const { return pool_; }
    double alpha() const { return pool_.alpha(); }

    PatternVector pattern_of(const Observation& x) const { return agg::pattern_of(ensemble_, x); }
    double score(const Observation& x) const { return pool_.score(pattern_of(x)); }
    int classify(const Observation& x) const { return pool_.classify(pattern_of(x)); }

private:
    KnnEnsemble ensemble_;
    PatternAggregator pool_;
};

inline AggregatedClassifier fit_aggregate(const KnnEnsemble& ensemble, const SampleSplit& split,
                                          double alpha) {
    if (alpha < 0.0 || alpha >= 1.0) {
        throw config_error("fit_aggregate: alpha must lie in [0,1)");
    }
    if (split.e_l.size() < 1) {
        throw config_error("fit_aggregate: empty aggregation pool");
    }
    std::vector<PatternVector> patterns;
    std::vector<int> labels;
    patterns.reserve(static_cast<std::size_t>(split.e_l.size()));
    labels.reserve(static_cast<std::size_t>(split.e_l.size()));
    for (Eigen::Index j = 0; j < split.e_l.size(); ++j) {
        patterns.push_back(pattern_of(ensemble, split.e_l.points.col(j)));
        labels.push_back(split.e_l.labels(j));
    }
    return AggregatedClassifier(ensemble, PatternAggregator(std::move(patterns), std::move(labels), alpha));
}

// Pool patterns computed once, shared across several alpha values.
inline std::pair<std::vector<PatternVector>, std::vector<int>> pool_patterns_of(
    const KnnEnsemble& ensemble, const Dataset& pool) {
    std::vector<PatternVector> patterns;
    std::vector<int> labels;
    patterns.reserve(static_cast<std::size_t>(pool.size()));
    labels.reserve(static_cast<std::size_t>(pool.size()));
    for (Eigen::Index j = 0; j < pool.size(); ++j) {
        patterns.push_back(pattern_of(ensemble, pool.points.col(j)));
        labels.push_back(pool.labels(j));
    }
    return {std::move(patterns), std::move(labels)};
}

}  // namespace agg

#endif
