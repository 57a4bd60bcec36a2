#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "agg/experiment.hpp"

using namespace agg;

namespace {

ExperimentConfig small_highdim() {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::highdim_fixed;
    cfg.n = 40;
    cfg.k = 30;
    cfg.dim = 5;
    cfg.test_size = 50;
    cfg.reps = 3;
    cfg.seed = 12345;
    cfg.alphas = {0.0, 0.25};
    cfg.ensemble.list = {1, 3};
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("column layout per scenario") {
    ExperimentConfig cfg = small_highdim();
    auto cols = column_layout(cfg);
    // one aggregate per alpha, then each base rule fit on n and on k
    CHECK(cols.size() == 2 + 2 + 2);
    CHECK(cols[0].name == "g_T");
    CHECK(cols[0].alpha == 0.0);
    CHECK(cols[1].alpha == 0.25);
    CHECK(cols[2].name == "g_1k(n)");
    CHECK(cols[4].name == "g_1k(k)");

    cfg.scenario = Scenario::highdim_random;
    cfg.ensemble.mode = EnsembleSpec::Mode::random_odd;
    cfg.ensemble.list.clear();
    cols = column_layout(cfg);
    CHECK(cols.size() == 2 + 2);
    CHECK(cols[2].name == "gcv(n)");
    CHECK(cols[3].name == "gcv(k)");

    ExperimentConfig fun;
    fun.scenario = Scenario::functional_I;
    fun.n = 50;
    fun.k = 30;
    CHECK(column_layout(fun).size() == 1 + 5 + 5);
}

TEST_CASE("repetition determinism") {
    const ExperimentConfig cfg = small_highdim();
    const auto a = run_repetition(cfg, 0);
    const auto b = run_repetition(cfg, 0);
    CHECK(a == b);
    CHECK(a.size() == column_layout(cfg).size());
    for (double e : a) {
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
    }
}

TEST_CASE("experiment results are schedule independent") {
    ExperimentConfig cfg = small_highdim();
    cfg.threads = 1;
    const ExperimentResult serial = run_experiment(cfg);
    cfg.threads = 4;
    const ExperimentResult threaded = run_experiment(cfg);
    REQUIRE(serial.columns.size() == threaded.columns.size());
    for (std::size_t c = 0; c < serial.columns.size(); ++c) {
        REQUIRE(serial.columns[c].mean_error == threaded.columns[c].mean_error);
        REQUIRE(serial.columns[c].std_error == threaded.columns[c].std_error);
    }
    CHECK(format_table(serial, OutputFormat::csv) == format_table(threaded, OutputFormat::csv));
}

TEST_CASE("degenerate variance with equal rows") {
    ExperimentConfig cfg = small_highdim();
    cfg.reps = 1;
    const ExperimentResult one = run_experiment(cfg);
    for (const auto& col : one.columns) CHECK(col.std_error == 0.0);
}

TEST_CASE("functional repetitions run and mix populations") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::functional_I;
    cfg.n = 20;
    cfg.k = 12;
    cfg.test_size = 40;
    cfg.reps = 2;
    cfg.seed = 77;
    cfg.alphas = {0.0, 0.2};
    const ExperimentResult result = run_experiment(cfg);
    CHECK(result.columns.size() == 2 + 5 + 5);
    CHECK(run_repetition(cfg, 1) == run_repetition(cfg, 1));

    cfg.scenario = Scenario::functional_II;
    cfg.smoother = SmootherSpec{0.15, 0.7};
    const ExperimentResult ii = run_experiment(cfg);
    CHECK(ii.columns.size() == 2 + 5 + 5);
}

TEST_CASE("csv emission is byte stable and well formed") {
    ExperimentConfig cfg = small_highdim();
    cfg.reps = 2;
    const ExperimentResult result = run_experiment(cfg);
    const std::string csv = format_table(result, OutputFormat::csv);
    CHECK(csv == format_table(result, OutputFormat::csv));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "classifier,alpha,mean_error,std_error,reps,n,k,seed");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == static_cast<int>(result.columns.size()));

    const std::string path = "emit_test_out.csv";
    emit_table(result, OutputFormat::csv, path);
    emit_table(result, OutputFormat::csv, path + "2");
    CHECK(slurp(path) == slurp(path + "2"));
    CHECK(slurp(path) == csv);
    const std::string manifest = slurp(path + ".manifest.json");
    CHECK(manifest.find("\"scenario\":\"highdim-fixed\"") != std::string::npos);
    std::remove(path.c_str());
    std::remove((path + "2").c_str());
    std::remove((path + ".manifest.json").c_str());
    std::remove((path + "2.manifest.json").c_str());

    const std::string text = format_table(result, OutputFormat::text);
    CHECK(text.find("g_T") != std::string::npos);
}

TEST_CASE("config validation and error paths") {
    ExperimentConfig cfg = small_highdim();
    cfg.k = cfg.n;
    CHECK_THROWS_AS(run_experiment(cfg), config_error);
    cfg = small_highdim();
    cfg.alphas = {1.5};
    CHECK_THROWS_AS(run_experiment(cfg), config_error);
    cfg = small_highdim();
    cfg.ensemble.list = {2, 4};
    CHECK_THROWS_AS(run_experiment(cfg), config_error);
    cfg = small_highdim();
    cfg.scenario = Scenario::functional_I;
    cfg.n = 41;  // odd
    CHECK_THROWS_AS(run_experiment(cfg), config_error);
}

TEST_CASE("thm2 sweep shapes") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::thm2_sweep;
    cfg.n = 200;  // unused beyond validation
    cfg.k = 60;
    cfg.test_size = 2000;
    cfg.seed = 5;
    cfg.sweep_ls = {200};
    const SweepResult one = thm2_sweep(cfg);
    CHECK(one.rows.size() == 1);
    CHECK(one.rows[0].l == 200);
    CHECK(one.rows[0].base_risks.size() == 3);
    CHECK(one.rows[0].gap == one.rows[0].risk_aggregate - one.rows[0].min_base_risk);

    const std::string csv = format_sweep(one, OutputFormat::csv);
    CHECK(csv.find("l,risk_gT,min_base_risk,gap,empirical_limit_risk") == 0);

    // M=1 ensemble: the aggregate's cells are the base rule's level sets
    cfg.ensemble.list = {3};
    const SweepResult single = thm2_sweep(cfg);
    CHECK(single.rows[0].base_risks.size() == 1);
    CHECK(single.rows[0].gap <= 0.05);
}

TEST_CASE("oracle bridge report") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::oracle_bridge;
    cfg.n = 200;
    cfg.k = 60;
    cfg.test_size = 4000;
    cfg.seed = 6;
    cfg.sweep_ls = {4000};
    const BridgeResult r = oracle_bridge(cfg);
    CHECK(r.l == 4000);
    CHECK(r.test_risk >= 0.0);
    CHECK(r.limit_risk_value >= 0.0);
    CHECK(r.excluded_mass >= 0.0);
    CHECK(r.abs_difference == doctest::Approx(std::abs(r.test_risk - r.limit_risk_value)));
    const std::string csv = format_bridge(r, OutputFormat::csv);
    CHECK(csv.find("l,test_risk,limit_risk,excluded_mass,abs_difference") == 0);
}
