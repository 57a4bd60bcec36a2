#include "agg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "agg/aggregate.hpp"
#include "agg/errors.hpp"
#include "agg/knn.hpp"
#include "agg/metric.hpp"
#include "agg/oracles.hpp"

namespace agg {

namespace {

constexpr double kNoAlpha = std::numeric_limits<double>::quiet_NaN();

bool is_highdim(Scenario s) {
    return s == Scenario::highdim_fixed || s == Scenario::highdim_random;
}

bool is_functional(Scenario s) {
    return s == Scenario::functional_I || s == Scenario::functional_II;
}

std::vector<int> capped_cv_candidates(const Dataset& train, int cap) {
    const int positives = train.labels.sum();
    const int bound = std::min(positives, static_cast<int>(train.size()) - positives);
    const int limit = std::min({cap, bound, static_cast<int>(train.size()) - 1});
    std::vector<int> ks;
    for (int k = 1; k <= limit; k += 2) ks.push_back(k);
    if (ks.empty()) ks.push_back(1);
    return ks;
}

double fraction(long long errors, Eigen::Index total) {
    return static_cast<double>(errors) / static_cast<double>(total);
}

}  // namespace

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::highdim_fixed: return "highdim-fixed";
        case Scenario::highdim_random: return "highdim-random";
        case Scenario::functional_I: return "functional-I";
        case Scenario::functional_II: return "functional-II";
        case Scenario::thm2_sweep: return "thm2-sweep";
        case Scenario::oracle_bridge: return "oracle-bridge";
    }
    throw config_error("unknown scenario");
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "highdim-fixed") return Scenario::highdim_fixed;
    if (name == "highdim-random") return Scenario::highdim_random;
    if (name == "functional-I") return Scenario::functional_I;
    if (name == "functional-II") return Scenario::functional_II;
    if (name == "thm2-sweep") return Scenario::thm2_sweep;
    if (name == "oracle-bridge") return Scenario::oracle_bridge;
    throw config_error("unknown scenario: " + name);
}

void EnsembleSpec::check_valid() const {
    if (mode == Mode::fixed_list) {
        // empty list means the scenario default
        int prev = 0;
        for (int k : list) {
            if (k < 1 || k % 2 == 0) {
                throw config_error("ensemble: neighbor counts must be positive odd integers");
            }
            if (k <= prev) throw config_error("ensemble: neighbor list must be strictly increasing");
            prev = k;
        }
    } else if (count < 1) {
        throw config_error("ensemble: random-odd count must be >= 1");
    }
}

Eigen::Index ExperimentConfig::effective_test_size() const {
    if (test_size > 0) return test_size;
    if (is_highdim(scenario)) return n;
    if (is_functional(scenario)) return 200;
    return 100000;
}

int ExperimentConfig::effective_dim() const {
    if (dim > 0) return dim;
    if (is_highdim(scenario)) return 150;
    return 2;  // thm2-sweep / oracle-bridge
}

std::vector<int> ExperimentConfig::effective_neighbors() const {
    if (!ensemble.list.empty()) return ensemble.list;
    if (scenario == Scenario::highdim_fixed) return {5, 7, 9, 11, 13, 15, 17, 19};
    if (is_functional(scenario)) return {1, 3, 5, 7, 9};
    return {1, 3, 5};  // thm2-sweep / oracle-bridge
}

void ExperimentConfig::check_valid() const {
    if (n < 2 || k < 1 || k >= n) {
        throw config_error("config: need 1 <= k < n");
    }
    if (reps < 1) throw config_error("config: reps must be >= 1");
    for (double a : alphas) {
        if (a < 0.0 || a >= 1.0) throw config_error("config: alpha must lie in [0,1)");
    }
    if (alphas.empty()) throw config_error("config: at least one alpha required");
    if (effective_test_size() < 1) throw config_error("config: test size must be >= 1");
    if (is_functional(scenario) && n % 2 != 0) {
        throw config_error("config: functional scenarios need even n (n/2 per population)");
    }
    ensemble.check_valid();
    if (smoother) smoother->check_valid();
    if (scenario == Scenario::highdim_random && ensemble.mode != EnsembleSpec::Mode::random_odd) {
        throw config_error("config: highdim-random requires a random-odd ensemble");
    }
}

std::vector<ColumnSpec> column_layout(const ExperimentConfig& cfg) {
    std::vector<ColumnSpec> cols;
    for (double a : cfg.alphas) cols.push_back({"g_T", a});
    if (cfg.scenario == Scenario::highdim_random) {
        cols.push_back({"gcv(n)", kNoAlpha});
        cols.push_back({"gcv(k)", kNoAlpha});
        return cols;
    }
    const auto ks = cfg.effective_neighbors();
    for (std::size_t m = 0; m < ks.size(); ++m) {
        cols.push_back({"g_" + std::to_string(m + 1) + "k(n)", kNoAlpha});
    }
    for (std::size_t m = 0; m < ks.size(); ++m) {
        cols.push_back({"g_" + std::to_string(m + 1) + "k(k)", kNoAlpha});
    }
    return cols;
}

namespace {

std::vector<double> run_highdim_repetition(const ExperimentConfig& cfg, Rng& rng) {
    HighDimSpec spec;
    spec.dim = cfg.effective_dim();
    const Dataset train = gen_highdim(spec, cfg.n, rng);
    const Dataset test = gen_highdim(spec, cfg.effective_test_size(), rng);
    const SampleSplit sp = split(train, cfg.k);
    const Metric metric = Metric::euclidean();
    const auto d_k = std::make_shared<Dataset>(sp.d_k);
    const auto full = std::make_shared<Dataset>(train);

    const bool fixed = cfg.scenario == Scenario::highdim_fixed;
    const std::vector<int> ks = fixed ? cfg.effective_neighbors()
                                      : draw_random_odd_ensemble(sp.d_k, cfg.ensemble.count, rng);
    const KnnEnsemble ens_k(d_k, metric, ks);

    auto [pool_pats, pool_labels] = pool_patterns_of(ens_k, sp.e_l);
    std::vector<PatternAggregator> aggs;
    for (double a : cfg.alphas) aggs.emplace_back(pool_pats, pool_labels, a);

    std::optional<KnnEnsemble> ens_n;
    std::optional<KnnClassifier> gcv_n;
    std::optional<KnnClassifier> gcv_k;
    if (fixed) {
        ens_n.emplace(full, metric, ks);
    } else {
        gcv_n.emplace(cv_select_knn(full, metric, capped_cv_candidates(train, 41)));
        gcv_k.emplace(cv_select_knn(d_k, metric, capped_cv_candidates(sp.d_k, 41)));
    }

    const int m_count = static_cast<int>(ks.size());
    std::vector<long long> errors(aggs.size() + (fixed ? 2 * ks.size() : 2), 0);
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const Observation x = test.points.col(i);
        const int y = test.labels(i);
        const PatternVector pat{ens_k.predictions(x), m_count};
        for (std::size_t a = 0; a < aggs.size(); ++a) {
            if (aggs[a].classify(pat) != y) ++errors[a];
        }
        if (fixed) {
            const std::uint32_t bits_n = ens_n->predictions(x);
            for (int m = 0; m < m_count; ++m) {
                if (static_cast<int>((bits_n >> m) & 1u) != y) {
                    ++errors[aggs.size() + static_cast<std::size_t>(m)];
                }
                if (pat.bit(m) != y) {
                    ++errors[aggs.size() + ks.size() + static_cast<std::size_t>(m)];
                }
            }
        } else {
            if (gcv_n->predict(x) != y) ++errors[aggs.size()];
            if (gcv_k->predict(x) != y) ++errors[aggs.size() + 1];
        }
    }
    std::vector<double> row(errors.size());
    for (std::size_t c = 0; c < errors.size(); ++c) row[c] = fraction(errors[c], test.size());
    return row;
}

std::vector<double> run_functional_repetition(const ExperimentConfig& cfg, Rng& rng) {
    const bool model_two = cfg.scenario == Scenario::functional_II;
    const FunctionalSpec fs =
        model_two ? FunctionalSpec::model_II(cfg.theta_form) : FunctionalSpec::model_I();
    const Dataset train = shuffle_dataset(gen_functional(fs, cfg.n / 2, rng), rng);
    const Eigen::Index test_per_pop = std::max<Eigen::Index>(1, cfg.effective_test_size() / 2);
    const Dataset test = gen_functional(fs, test_per_pop, rng);
    const Metric metric = Metric::l2_grid(fs.grid);
    const std::vector<int> ks = cfg.effective_neighbors();

    Dataset fitted_train = train;
    if (model_two) {
        SmootherSpec sm = cfg.smoother.value_or(SmootherSpec{});
        if (cfg.select_bandwidths) {
            std::vector<double> grid = cfg.bandwidth_grid;
            if (grid.empty()) {
                for (int i = 0; i <= 12; ++i) grid.push_back(0.10 + 0.05 * i);
            }
            const auto [h1, h2] =
                cv_bandwidths(train, fs.grid, grid, ks, cfg.alphas.front(), rng);
            sm = {h1, h2};
        }
        fitted_train = smooth_training_set(train, fs.grid, sm);
    }

    const SampleSplit sp = split(fitted_train, cfg.k);
    const auto d_k = std::make_shared<Dataset>(sp.d_k);
    const auto full = std::make_shared<Dataset>(fitted_train);
    const KnnEnsemble ens_k(d_k, metric, ks);
    const KnnEnsemble ens_n(full, metric, ks);

    auto [pool_pats, pool_labels] = pool_patterns_of(ens_k, sp.e_l);
    std::vector<PatternAggregator> aggs;
    for (double a : cfg.alphas) aggs.emplace_back(pool_pats, pool_labels, a);

    const int m_count = static_cast<int>(ks.size());
    std::vector<long long> errors(aggs.size() + 2 * ks.size(), 0);
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const Observation x = test.points.col(i);  // raw, never smoothed
        const int y = test.labels(i);
        const PatternVector pat{ens_k.predictions(x), m_count};
        const std::uint32_t bits_n = ens_n.predictions(x);
        for (std::size_t a = 0; a < aggs.size(); ++a) {
            if (aggs[a].classify(pat) != y) ++errors[a];
        }
        for (int m = 0; m < m_count; ++m) {
            if (static_cast<int>((bits_n >> m) & 1u) != y) {
                ++errors[aggs.size() + static_cast<std::size_t>(m)];
            }
            if (pat.bit(m) != y) {
                ++errors[aggs.size() + ks.size() + static_cast<std::size_t>(m)];
            }
        }
    }
    std::vector<double> row(errors.size());
    for (std::size_t c = 0; c < errors.size(); ++c) row[c] = fraction(errors[c], test.size());
    return row;
}

}  // namespace

std::vector<double> run_repetition(const ExperimentConfig& cfg, int rep_index) {
    cfg.check_valid();
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(rep_index)));
    try {
        if (is_highdim(cfg.scenario)) return run_highdim_repetition(cfg, rng);
        if (is_functional(cfg.scenario)) return run_functional_repetition(cfg, rng);
    } catch (const std::exception& e) {
        throw std::runtime_error("repetition " + std::to_string(rep_index) + " failed: " + e.what());
    }
    throw config_error("run_repetition: scenario " + scenario_name(cfg.scenario) +
                       " is not repetition-based");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.check_valid();
    const auto layout = column_layout(cfg);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg.reps));

    const int workers = std::max(1, cfg.threads);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= cfg.reps || failed.load()) return;
            try {
                rows[static_cast<std::size_t>(r)] = run_repetition(cfg, r);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failure = e.what();
                failed.store(true);
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error(failure);

    ExperimentResult result;
    result.config = cfg;
    for (std::size_t c = 0; c < layout.size(); ++c) {
        double mean = 0.0;
        for (const auto& row : rows) mean += row.at(c);
        mean /= cfg.reps;
        double var = 0.0;
        for (const auto& row : rows) var += (row.at(c) - mean) * (row.at(c) - mean);
        const double std_error =
            cfg.reps > 1 ? std::sqrt(var / (cfg.reps - 1)) / std::sqrt(static_cast<double>(cfg.reps))
                         : 0.0;
        result.columns.push_back({layout[c].name, layout[c].alpha, mean, std_error, cfg.reps});
    }
    return result;
}

namespace {

struct FixedSweepSetup {
    std::shared_ptr<Dataset> d_k;
    std::vector<int> ks;
    HighDimSpec spec;
};

FixedSweepSetup sweep_setup(const ExperimentConfig& cfg) {
    FixedSweepSetup s;
    s.spec.dim = cfg.effective_dim();
    Rng rng(derive_seed(cfg.seed, 0));
    s.d_k = std::make_shared<Dataset>(gen_highdim(s.spec, cfg.k, rng));
    s.ks = cfg.effective_neighbors();
    return s;
}

struct PoolEvaluation {
    double risk_aggregate;
    std::vector<double> base_risks;
    double empirical_limit;
    double excluded_mass;
};

PoolEvaluation evaluate_pool(const KnnEnsemble& ensemble, const HighDimSpec& spec,
                             Eigen::Index l, Eigen::Index test_size, double alpha, Rng& rng,
                             double degeneracy_margin) {
    const Dataset pool_data = gen_highdim(spec, l, rng);
    auto [patterns, labels] = pool_patterns_of(ensemble, pool_data);
    const PatternAggregator agg(patterns, labels, alpha);
    const PatternCellTable table = empirical_cell_table(patterns, labels);

    const Dataset test = gen_highdim(spec, test_size, rng);
    const int m_count = ensemble.size();
    long long agg_errors = 0;
    std::vector<long long> base_errors(static_cast<std::size_t>(m_count), 0);
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const PatternVector pat{ensemble.predictions(test.points.col(i)), m_count};
        const int y = test.labels(i);
        if (agg.classify(pat) != y) ++agg_errors;
        for (int m = 0; m < m_count; ++m) {
            if (pat.bit(m) != y) ++base_errors[static_cast<std::size_t>(m)];
        }
    }
    PoolEvaluation out;
    out.risk_aggregate = fraction(agg_errors, test.size());
    for (int m = 0; m < m_count; ++m) {
        out.base_risks.push_back(fraction(base_errors[static_cast<std::size_t>(m)], test.size()));
    }
    out.empirical_limit = limit_risk(table);
    out.excluded_mass = 0.0;
    for (std::size_t nu = 0; nu < table.p1.size(); ++nu) {
        const double mass = table.p1[nu] + table.p0[nu];
        if (mass > 0.0 && std::abs(table.p1[nu] - table.p0[nu]) < degeneracy_margin) {
            out.excluded_mass += mass;
        }
    }
    return out;
}

}  // namespace

SweepResult thm2_sweep(const ExperimentConfig& cfg) {
    cfg.check_valid();
    if (cfg.sweep_ls.empty()) throw config_error("thm2_sweep: empty l sweep");
    const FixedSweepSetup setup = sweep_setup(cfg);
    const KnnEnsemble ensemble(setup.d_k, Metric::euclidean(), setup.ks);
    SweepResult result;
    result.config = cfg;
    for (std::size_t i = 0; i < cfg.sweep_ls.size(); ++i) {
        const Eigen::Index l = cfg.sweep_ls[i];
        Rng rng(derive_seed(cfg.seed, 1000 + i));
        const PoolEvaluation eval = evaluate_pool(ensemble, setup.spec, l,
                                                  cfg.effective_test_size(), cfg.alphas.front(),
                                                  rng, 0.0);
        SweepRow row;
        row.l = l;
        row.risk_aggregate = eval.risk_aggregate;
        row.min_base_risk = *std::min_element(eval.base_risks.begin(), eval.base_risks.end());
        row.gap = row.risk_aggregate - row.min_base_risk;
        row.empirical_limit_risk = eval.empirical_limit;
        row.base_risks = eval.base_risks;
        result.rows.push_back(row);
    }
    return result;
}

BridgeResult oracle_bridge(const ExperimentConfig& cfg, double degeneracy_margin) {
    cfg.check_valid();
    const FixedSweepSetup setup = sweep_setup(cfg);
    const KnnEnsemble ensemble(setup.d_k, Metric::euclidean(), setup.ks);
    const Eigen::Index l = cfg.sweep_ls.empty() ? 50000 : cfg.sweep_ls.back();
    Rng rng(derive_seed(cfg.seed, 1000 + cfg.sweep_ls.size()));
    const PoolEvaluation eval = evaluate_pool(ensemble, setup.spec, l, cfg.effective_test_size(),
                                              cfg.alphas.front(), rng, degeneracy_margin);
    BridgeResult out;
    out.config = cfg;
    out.l = l;
    out.test_risk = eval.risk_aggregate;
    out.limit_risk_value = eval.empirical_limit;
    out.excluded_mass = eval.excluded_mass;
    out.abs_difference = std::abs(out.test_risk - out.limit_risk_value);
    return out;
}

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::string manifest_line(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_name(cfg.scenario);
    j["n"] = cfg.n;
    j["k"] = cfg.k;
    j["alphas"] = cfg.alphas;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    j["test_size"] = cfg.effective_test_size();
    j["dim"] = cfg.effective_dim();
    if (cfg.ensemble.mode == EnsembleSpec::Mode::random_odd) {
        j["neighbors"] = "random:" + std::to_string(cfg.ensemble.count);
    } else {
        j["neighbors"] = cfg.effective_neighbors();
    }
    if (cfg.scenario == Scenario::functional_II) {
        const SmootherSpec sm = cfg.smoother.value_or(SmootherSpec{});
        j["h1"] = sm.h1;
        j["h2"] = sm.h2;
        j["cv_bandwidths"] = cfg.select_bandwidths;
        j["theta_form"] =
            cfg.theta_form == ThetaForm::exponential ? "exp" : "inverse-square";
    }
    if (cfg.scenario == Scenario::thm2_sweep || cfg.scenario == Scenario::oracle_bridge) {
        j["sweep_ls"] = cfg.sweep_ls;
    }
    j["threads"] = cfg.threads;
    return j.dump();
}

std::string format_table(const ExperimentResult& result, OutputFormat format) {
    const ExperimentConfig& cfg = result.config;
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << "classifier,alpha,mean_error,std_error,reps,n,k,seed\n";
        for (const auto& col : result.columns) {
            out << col.name << ',' << (std::isnan(col.alpha) ? "" : fixed4(col.alpha)) << ','
                << fixed4(col.mean_error) << ',' << fixed4(col.std_error) << ',' << col.reps << ','
                << cfg.n << ',' << cfg.k << ',' << cfg.seed << '\n';
        }
        return out.str();
    }
    out << "classifier   alpha    mean_error  std_error  reps\n";
    for (const auto& col : result.columns) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-12s %-8s %-11s %-10s %d\n", col.name.c_str(),
                      std::isnan(col.alpha) ? "-" : fixed4(col.alpha).c_str(),
                      fixed4(col.mean_error).c_str(), fixed4(col.std_error).c_str(), col.reps);
        out << line;
    }
    return out.str();
}

std::string format_sweep(const SweepResult& result, OutputFormat format) {
    std::ostringstream out;
    const std::size_t m_count = result.rows.empty() ? 0 : result.rows.front().base_risks.size();
    if (format == OutputFormat::csv) {
        out << "l,risk_gT,min_base_risk,gap,empirical_limit_risk";
        for (std::size_t m = 0; m < m_count; ++m) out << ",base_" << (m + 1);
        out << '\n';
        for (const auto& row : result.rows) {
            out << row.l << ',' << fixed4(row.risk_aggregate) << ',' << fixed4(row.min_base_risk)
                << ',' << fixed4(row.gap) << ',' << fixed4(row.empirical_limit_risk);
            for (double b : row.base_risks) out << ',' << fixed4(b);
            out << '\n';
        }
        return out.str();
    }
    out << "l        risk_gT  min_base  gap      limit\n";
    for (const auto& row : result.rows) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-8lld %-8s %-9s %-8s %s\n",
                      static_cast<long long>(row.l), fixed4(row.risk_aggregate).c_str(),
                      fixed4(row.min_base_risk).c_str(), fixed4(row.gap).c_str(),
                      fixed4(row.empirical_limit_risk).c_str());
        out << line;
    }
    return out.str();
}

std::string format_bridge(const BridgeResult& result, OutputFormat format) {
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << "l,test_risk,limit_risk,excluded_mass,abs_difference\n";
        out << result.l << ',' << fixed4(result.test_risk) << ',' << fixed4(result.limit_risk_value)
            << ',' << fixed4(result.excluded_mass) << ',' << fixed4(result.abs_difference) << '\n';
        return out.str();
    }
    out << "l=" << result.l << " test_risk=" << fixed4(result.test_risk)
        << " limit_risk=" << fixed4(result.limit_risk_value)
        << " excluded_mass=" << fixed4(result.excluded_mass)
        << " abs_difference=" << fixed4(result.abs_difference) << '\n';
    return out.str();
}

void emit_text(const std::string& body, const std::string& manifest, OutputFormat format,
               const std::string& path) {
    if (path.empty()) {
        if (format == OutputFormat::text) {
            std::cout << manifest << '\n' << body;
        } else {
            std::cerr << manifest << '\n';
            std::cout << body;
        }
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output path: " + path);
    if (format == OutputFormat::text) {
        file << manifest << '\n' << body;
    } else {
        file << body;
        std::ofstream mf(path + ".manifest.json", std::ios::binary);
        if (!mf) throw std::runtime_error("cannot open manifest path: " + path + ".manifest.json");
        mf << manifest << '\n';
    }
}

void emit_table(const ExperimentResult& result, OutputFormat format, const std::string& path) {
    emit_text(format_table(result, format), manifest_line(result.config), format, path);
}

}  // namespace agg
