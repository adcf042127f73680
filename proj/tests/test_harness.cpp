// test_harness.cpp — presets, scenario grammar, runs and emission

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmetro/harness.hpp"
#include "pmetro/jc_analytic.hpp"

using namespace pmetro;
using namespace pmetro::harness;

namespace {

Scenario tiny() {
    Scenario sc;
    sc.name = "tiny";
    sc.models = {Model::correlated, Model::fresh, Model::repeated_no_control};
    sc.n_steps = {1, 2};
    sc.iss.restarts = 2;
    sc.iss.max_sweeps = 8;
    return sc;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST(Presets, Fig2b) {
    const auto sc = preset("fig2b");
    EXPECT_EQ(sc.models.size(), 3u);
    EXPECT_DOUBLE_EQ(sc.bath.gamma0, 2.457);
    EXPECT_DOUBLE_EQ(sc.bath.lambda, 100.0);
    EXPECT_EQ(sc.dts, std::vector<double>{0.5});
    EXPECT_EQ(sc.n_steps.back() * sc.dts[0], 6.0);
    EXPECT_NO_THROW(sc.validate());
}

TEST(Presets, Fig2c) {
    const auto sc = preset("fig2c");
    EXPECT_DOUBLE_EQ(sc.bath.lambda, 2.5);
    EXPECT_EQ(sc.d_anc, (std::vector<Index>{1, 2}));
}

TEST(Presets, Fig3) {
    const auto sc = preset("fig3");
    EXPECT_EQ(sc.dts, (std::vector<double>{2.0, 1.0, 0.5, 0.25}));
    EXPECT_TRUE(sc.rescale);
    EXPECT_DOUBLE_EQ(sc.ref_dt, 0.5);
    EXPECT_DOUBLE_EQ(coupling_for(sc, 0.5), 2.457);
    const double g = coupling_for(sc, 0.25);
    EXPECT_NEAR(std::pow(jc::c1({g, 2.5, 0.0, 0.0}, 0.25).real(), 2),
                jc::c1({2.457, 2.5, 0.0, 0.0}, 0.5).real(), 1e-10);
}

TEST(Presets, UnknownName) { EXPECT_THROW(preset("fig9"), DomainError); }

TEST(Models, StringRoundTrip) {
    for (Model m : {Model::correlated, Model::fresh, Model::repeated_no_control}) {
        EXPECT_EQ(model_from_string(to_string(m)), m);
    }
    EXPECT_EQ(to_string(Model::repeated_no_control), "repeated-no-control");
    EXPECT_THROW(model_from_string("markov"), DomainError);
}

TEST(ScenarioJson, FullGrammar) {
    const auto sc = scenario_from_json(R"({
        "name": "demo",
        "models": ["correlated", "repeated-no-control"],
        "bath": {"gamma0": 1.5, "lambda": 3.0, "omega0": 0.25},
        "omega": 0.1,
        "dt": [1.0, 0.5],
        "rescale": {"enabled": true, "ref_dt": 1.0},
        "n_steps": {"from": 2, "to": 5},
        "max_time": 2.0,
        "d_anc": [1, 3],
        "iss": {"restarts": 4, "seed": 7, "max_sweeps": 11, "tol": 1e-6},
        "workers": 2
    })");
    EXPECT_EQ(sc.name, "demo");
    EXPECT_EQ(sc.models, (std::vector<Model>{Model::correlated, Model::repeated_no_control}));
    EXPECT_DOUBLE_EQ(sc.bath.omega0, 0.25);
    EXPECT_DOUBLE_EQ(sc.omega, 0.1);
    EXPECT_EQ(sc.dts, (std::vector<double>{1.0, 0.5}));
    EXPECT_TRUE(sc.rescale);
    EXPECT_DOUBLE_EQ(sc.ref_dt, 1.0);
    EXPECT_EQ(sc.n_steps, (std::vector<int>{2, 3, 4, 5}));
    EXPECT_EQ(sc.d_anc, (std::vector<Index>{1, 3}));
    EXPECT_EQ(sc.iss.restarts, 4);
    EXPECT_EQ(sc.iss.seed, 7u);
    EXPECT_EQ(sc.iss.max_sweeps, 11);
    EXPECT_EQ(sc.workers, 2);
}

TEST(ScenarioJson, PresetWithOverrides) {
    const auto sc = scenario_from_json(R"({"preset": "fig2c", "n_steps": [1, 2], "iss": {"restarts": 1}})");
    EXPECT_EQ(sc.d_anc, (std::vector<Index>{1, 2}));
    EXPECT_EQ(sc.n_steps, (std::vector<int>{1, 2}));
    EXPECT_EQ(sc.iss.restarts, 1);
}

TEST(ScenarioJson, RoundTrip) {
    const auto sc = preset("fig3");
    const auto back = scenario_from_json(scenario_to_json(sc));
    EXPECT_EQ(scenario_to_json(back), scenario_to_json(sc));
}

TEST(ScenarioJson, Errors) {
    EXPECT_THROW(scenario_from_json("{"), DomainError);
    EXPECT_THROW(scenario_from_json(R"({"colour": 1})"), DomainError);
    EXPECT_THROW(scenario_from_json(R"({"bath": {"gamma0": 1, "width": 2}})"), DomainError);
    EXPECT_THROW(scenario_from_json(R"({"dt": -0.5})"), DomainError);
    EXPECT_THROW(scenario_from_json(R"({"n_steps": [3, 2]})"), DomainError);
    EXPECT_THROW(scenario_from_json(R"({"n_steps": []})"), DomainError);
    EXPECT_THROW(scenario_from_json(R"({"models": ["bogus"]})"), DomainError);
    EXPECT_THROW(scenario_from_json(R"({"dt": "half"})"), DomainError);
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), std::exception);
}

TEST(Emit, EmptyRecordIsHeaderOnly) {
    RunRecord rr;
    rr.scenario = tiny();
    const auto csv = to_csv(rr);
    EXPECT_EQ(count_lines(csv), 2u);
    EXPECT_NE(csv.find("model,N,t,qfi,converged,sweeps,seed"), std::string::npos);
    EXPECT_EQ(csv.front(), '#');
}

TEST(Emit, WritesFile) {
    RunRecord rr;
    rr.scenario = tiny();
    const std::string path = ::testing::TempDir() + "pmetro_emit.csv";
    emit(rr, Format::csv, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), to_csv(rr));
    std::remove(path.c_str());
    EXPECT_THROW(emit(rr, Format::csv, "/nonexistent/dir/out.csv"), std::exception);
    EXPECT_EQ(format_from_string("json"), Format::json);
    EXPECT_THROW(format_from_string("xml"), DomainError);
}

TEST(Run, RowsOrderedAndComplete) {
    const auto rr = run_scenario(tiny());
    ASSERT_EQ(rr.rows.size(), 6u);
    EXPECT_TRUE(rr.all_ok());
    const std::vector<Model> order{Model::correlated, Model::correlated, Model::fresh, Model::fresh,
                                   Model::repeated_no_control, Model::repeated_no_control};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(rr.rows[i].model, order[i]);
        EXPECT_EQ(rr.rows[i].n, int(i % 2) + 1);
        EXPECT_GT(rr.rows[i].result.value, 0.0);
    }
    // repeated rows are exact multiples of the single step
    EXPECT_EQ(rr.rows[5].result.value, 2.0 * rr.rows[4].result.value);
    // the single step is model independent
    EXPECT_NEAR(rr.rows[0].result.value, rr.rows[2].result.value, 1e-9);
    EXPECT_EQ(rr.seed, tiny().iss.seed);
    EXPECT_FALSE(rr.version.empty());
    EXPECT_EQ(count_lines(to_csv(rr)), 8u);
}

TEST(Run, BitIdenticalReruns) {
    const auto a = run_scenario(tiny());
    const auto b = run_scenario(tiny());
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].result.value, b.rows[i].result.value);
    EXPECT_EQ(to_csv(a), to_csv(b));
}

TEST(Run, WorkerCountDoesNotChangeResults) {
    auto sc = tiny();
    const auto one = run_scenario(sc);
    sc.workers = 3;
    const auto three = run_scenario(sc);
    EXPECT_EQ(to_csv(one), to_csv(three));
}

TEST(Run, MaxTimeDropsLongRows) {
    auto sc = tiny();
    sc.models = {Model::fresh};
    sc.n_steps = {1, 2, 3};
    sc.max_time = 1.0;
    const auto rr = run_scenario(sc);
    ASSERT_EQ(rr.rows.size(), 2u);
    EXPECT_EQ(rr.rows.back().n, 2);
}

TEST(Run, RescaledRunReportsGammaC) {
    auto sc = tiny();
    sc.models = {Model::fresh};
    sc.n_steps = {1};
    sc.dts = {0.5, 0.25};
    sc.rescale = true;
    const auto rr = run_scenario(sc);
    ASSERT_TRUE(rr.gamma_c.has_value());
    EXPECT_NEAR(*rr.gamma_c, jc::gamma_c(0.5, 2.457, 2.5), 1e-12);
    EXPECT_DOUBLE_EQ(rr.rows[0].gamma0, 2.457);
    EXPECT_NE(rr.rows[1].gamma0, 2.457);
}

TEST(Emit, JsonRoundTrip) {
    const auto rr = run_scenario(tiny());
    const auto back = record_from_json(to_json(rr));
    EXPECT_EQ(to_json(back), to_json(rr));
    ASSERT_EQ(back.rows.size(), rr.rows.size());
    for (std::size_t i = 0; i < rr.rows.size(); ++i) {
        EXPECT_EQ(back.rows[i].result.value, rr.rows[i].result.value);
        EXPECT_EQ(back.rows[i].result.sweep_history, rr.rows[i].result.sweep_history);
        ASSERT_EQ(back.rows[i].result.strategy.size(), rr.rows[i].result.strategy.size());
        for (std::size_t k = 0; k < rr.rows[i].result.strategy.size(); ++k) {
            EXPECT_EQ(back.rows[i].result.strategy.teeth[k].choi, rr.rows[i].result.strategy.teeth[k].choi);
        }
    }
}

TEST(Dynamics, NumericMatchesAnalytic) {
    const CMat plus = CMat::Constant(2, 2, cplx(0.5));
    const auto samples = simulate_dynamics({2.457, 2.5, 0.0}, 0.0, plus, 5.0, 26);
    ASSERT_EQ(samples.size(), 26u);
    for (const auto& s : samples) EXPECT_LT(trace_distance(s.numeric, s.analytic), 1e-8);
    const auto csv = dynamics_to_csv(samples);
    EXPECT_EQ(count_lines(csv), 28u);
}
