#ifndef AGG_EXPERIMENT_HPP
#define AGG_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agg/dataset.hpp"
#include "agg/generators.hpp"
#include "agg/smoothing.hpp"

namespace agg {

enum class Scenario {
    highdim_fixed,
    highdim_random,
    functional_I,
    functional_II,
    thm2_sweep,
    oracle_bridge,
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct EnsembleSpec {
    enum class Mode { fixed_list, random_odd };
    Mode mode = Mode::fixed_list;
    std::vector<int> list;  // fixed_list: odd, strictly increasing
    int count = 10;         // random_odd: M

    void check_valid() const;
};

enum class OutputFormat { csv, text };

struct ExperimentConfig {
    Scenario scenario = Scenario::highdim_fixed;
    Eigen::Index n = 400;           // training-sample size
    Eigen::Index k = 300;           // base-classifier half of the split
    std::vector<double> alphas = {0.0};
    int reps = 100;
    std::uint64_t seed = 1;
    Eigen::Index test_size = 0;     // 0: scenario default (n for highdim, 200 functional)
    int dim = 0;                    // 0: scenario default (150 highdim, 2 sweep/bridge)
    EnsembleSpec ensemble;
    std::optional<SmootherSpec> smoother;   // functional-II
    bool select_bandwidths = false;          // run per-rep bandwidth CV
    std::vector<double> bandwidth_grid;      // empty: default 0.10..0.70 step 0.05
    ThetaForm theta_form = ThetaForm::exponential;
    std::vector<Eigen::Index> sweep_ls = {100, 1000, 10000, 50000};  // thm2-sweep
    int threads = 1;
    std::string out;                // empty: stdout
    OutputFormat format = OutputFormat::csv;

    Eigen::Index effective_test_size() const;
    int effective_dim() const;
    std::vector<int> effective_neighbors() const;  // fixed-list scenarios
    void check_valid() const;
};

struct ColumnResult {
    std::string name;
    double alpha;       // NaN when the column is not an aggregate
    double mean_error;
    double std_error;
    int reps;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ColumnResult> columns;
};

struct ColumnSpec {
    std::string name;
    double alpha;  // NaN when not an aggregate
};

// Fixed column layout of a repetition row for the given config.
std::vector<ColumnSpec> column_layout(const ExperimentConfig& cfg);

// One seeded draw-fit-evaluate cycle; returns one misclassification
// fraction per layout column.
std::vector<double> run_repetition(const ExperimentConfig& cfg, int rep_index);

// All repetitions (optionally threaded), aggregated into means and standard
// errors. Per-repetition seeds derive from the master seed, so the result is
// independent of scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Risk-versus-pool-size report for the optimality limit: one row per l.
struct SweepRow {
    Eigen::Index l;
    double risk_aggregate;
    double min_base_risk;
    double gap;                // risk_aggregate - min_base_risk
    double empirical_limit_risk;  // limit risk of the pool's cell table
    std::vector<double> base_risks;
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<SweepRow> rows;
};

SweepResult thm2_sweep(const ExperimentConfig& cfg);

// Single large-pool comparison of the aggregate's test risk against the
// limit risk of the empirical pattern-cell table, with near-degenerate
// cells (|p1 - p0| below the threshold) reported separately.
struct BridgeResult {
    ExperimentConfig config;
    Eigen::Index l;
    double test_risk;
    double limit_risk_value;
    double excluded_mass;      // mass of cells failing the non-degeneracy margin
    double abs_difference;
};

BridgeResult oracle_bridge(const ExperimentConfig& cfg, double degeneracy_margin = 1e-3);

// Table emission: 4-decimal CSV or aligned text, byte-stable for identical
// results. A single-line JSON run manifest precedes the table in text mode
// and is written to <out>.manifest.json in CSV mode.
std::string format_table(const ExperimentResult& result, OutputFormat format);
std::string format_sweep(const SweepResult& result, OutputFormat format);
std::string format_bridge(const BridgeResult& result, OutputFormat format);
std::string manifest_line(const ExperimentConfig& cfg);
void emit_table(const ExperimentResult& result, OutputFormat format, const std::string& path);
void emit_text(const std::string& body, const std::string& manifest, OutputFormat format,
               const std::string& path);

}  // namespace agg

#endif
