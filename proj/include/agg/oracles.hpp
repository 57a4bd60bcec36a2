#ifndef AGG_ORACLES_HPP
#define AGG_ORACLES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "agg/aggregate.hpp"
#include "agg/dataset.hpp"
#include "agg/errors.hpp"
#include "agg/generators.hpp"

namespace agg {

// Bayes rule for the translated-cube mixture. A point of the centered cube
// has posterior P(Y=1|x) = (1-mixing)/((1-mixing)+mixing) > 1/2 wherever the
// two supports overlap (equal uniform densities), and 1 outside the overlap,
// so the rule is simply membership in the centered cube.
class BayesRuleHighDim {
public:
    explicit BayesRuleHighDim(HighDimSpec spec) : spec_(spec) { spec_.check_valid(); }

    int classify(const Observation& x) const {
        if (x.size() != spec_.dim) {
            throw dimension_error("bayes rule: observation dim mismatch");
        }
        const double w = spec_.half_width;
        const bool in_centered = (x.array() >= -w).all() && (x.array() <= w).all();
        const bool in_shifted =
            (x.array() >= -w + spec_.shift).all() && (x.array() <= w + spec_.shift).all();
        if (in_centered) return 1;
        if (in_shifted) return 0;
        throw domain_error("bayes rule: point outside both class supports");
    }

    const HighDimSpec& spec() const { return spec_; }

private:
    HighDimSpec spec_;
};

// Exact Bayes risk: the only error mass is class-0 points falling in the
// overlap with the centered cube, where the rule says 1.
inline double bayes_risk_highdim(const HighDimSpec& spec) {
    spec.check_valid();
    const double overlap = std::max(0.0, 2.0 * spec.half_width - spec.shift);
    const double fraction = overlap / (2.0 * spec.half_width);
    return spec.mixing * std::pow(fraction, spec.dim);
}

// Joint probabilities of the pattern cells: entry nu holds
// (P(pattern = nu, Y = 1), P(pattern = nu, Y = 0)).
struct PatternCellTable {
    int pattern_length = 0;
    std::vector<double> p1;
    std::vector<double> p0;

    void check_valid() const {
        const std::size_t cells = std::size_t{1} << pattern_length;
        if (pattern_length < 1 || pattern_length > kMaxEnsembleSize || p1.size() != cells ||
            p0.size() != cells) {
            throw config_error("pattern cell table: bad shape");
        }
        double total = 0.0;
        for (std::size_t nu = 0; nu < cells; ++nu) {
            if (p1[nu] < 0.0 || p0[nu] < 0.0) {
                throw config_error("pattern cell table: negative probability");
            }
            total += p1[nu] + p0[nu];
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw config_error("pattern cell table: probabilities sum to " + std::to_string(total));
        }
    }
};

// Asymptotic (l -> infinity) risk of the aggregated rule: sum over pattern
// cells of the smaller of the two cell masses.
inline double limit_risk(const PatternCellTable& table) {
    table.check_valid();
    double risk = 0.0;
    for (std::size_t nu = 0; nu < table.p1.size(); ++nu) {
        risk += std::min(table.p1[nu], table.p0[nu]);
    }
    return risk;
}

// Risk of the m-th base rule read off the same table: it errs on every
// class-1 cell it marks 0 and every class-0 cell it marks 1.
inline double marginal_rule_risk(const PatternCellTable& table, int member) {
    table.check_valid();
    if (member < 0 || member >= table.pattern_length) {
        throw config_error("marginal rule risk: member index out of range");
    }
    double risk = 0.0;
    for (std::size_t nu = 0; nu < table.p1.size(); ++nu) {
        const int bit = static_cast<int>((nu >> member) & 1u);
        risk += bit == 0 ? table.p1[nu] : table.p0[nu];
    }
    return risk;
}

// Empirical cell table from a labeled pattern sample.
inline PatternCellTable empirical_cell_table(const std::vector<PatternVector>& patterns,
                                             const std::vector<int>& labels) {
    if (patterns.empty() || patterns.size() != labels.size()) {
        throw config_error("empirical cell table: bad sample");
    }
    PatternCellTable table;
    table.pattern_length = patterns.front().length;
    const std::size_t cells = std::size_t{1} << table.pattern_length;
    table.p1.assign(cells, 0.0);
    table.p0.assign(cells, 0.0);
    const double inc = 1.0 / static_cast<double>(patterns.size());
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        if (labels[i] == 1) {
            table.p1[patterns[i].bits] += inc;
        } else {
            table.p0[patterns[i].bits] += inc;
        }
    }
    return table;
}

// Literal double-loop evaluation of the thresholded-agreement weights and
// the weighted vote, with no packed-bit shortcuts. Test-side mirror of
// PatternAggregator::score.
inline double brute_force_aggregate(const PatternVector& query,
                                    const std::vector<PatternVector>& pool_patterns,
                                    const std::vector<int>& pool_labels, double alpha) {
    if (pool_patterns.size() != pool_labels.size() || pool_patterns.empty()) {
        throw config_error("brute force aggregate: bad pool");
    }
    const int m_count = query.length;
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t j = 0; j < pool_patterns.size(); ++j) {
        check_same_length(query, pool_patterns[j]);
        int matches = 0;
        for (int m = 0; m < m_count; ++m) {
            if (query.bit(m) == pool_patterns[j].bit(m)) ++matches;
        }
        const bool votes = agreement_passes(matches, m_count, alpha);
        if (votes) {
            denominator += 1.0;
            numerator += pool_labels[j];
        }
    }
    if (denominator == 0.0) return 0.0;  // 0/0 convention
    return numerator / denominator;
}

}  // namespace agg

#endif
