#include <ratkrylov/experiments.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ratkrylov;

namespace {

class Experiments : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("ratkrylov_exp_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    ExperimentConfig config(const std::string& id, Index n, std::size_t ell) const {
        ExperimentConfig c = default_config(id);
        c.n = n;
        c.ell_max = ell;
        c.out_dir = dir_.string();
        return c;
    }

    static const StrategyRun& find(const ExperimentResult& r, const std::string& strategy, const std::string& tag = "") {
        for (const auto& run : r.runs)
            if (run.strategy == strategy && run.tag == tag) return run;
        throw std::runtime_error("missing run " + strategy);
    }

    static std::string slurp(const std::string& path) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::filesystem::path dir_;
};

void expect_bounded(const StrategyRun& run) {
    for (const auto& row : run.trace) EXPECT_LE(row.true_error, row.bound) << run.tag << " " << run.strategy << " l=" << row.ell;
}

}  // namespace

TEST(Config, ParsesOverDefaults) {
    std::stringstream in("id = fig-cauchy-1d  # comment\nn = 500\nstrategies = eds, cauchy\nseed = 7\n");
    const auto c = parse_experiment_config(in, "x.cfg");
    EXPECT_EQ(c.n, 500);
    EXPECT_EQ(c.strategies, (std::vector<std::string>{"eds", "cauchy"}));
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.ell_max, 40u);
}

TEST(Config, DiagnosticsNameLineAndField) {
    auto message = [](const std::string& body) {
        std::stringstream in(body);
        try {
            parse_experiment_config(in, "x.cfg");
        } catch (const DomainError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("id = fig-cauchy-1d\nn = 2.5\n").find("x.cfg:2 field 'n'"), std::string::npos);
    EXPECT_NE(message("id = fig-cauchy-1d\ncolour = red\n").find("x.cfg:2 field 'colour'"), std::string::npos);
    EXPECT_NE(message("id = fig-nope\n").find("x.cfg:1"), std::string::npos);
    EXPECT_NE(message("n = 4\n").find("missing field 'id'"), std::string::npos);
    EXPECT_NE(message("id = fig-cauchy-2d\nn = 5000\n").find("field 'n'"), std::string::npos);
    EXPECT_NE(message("id = fig-cauchy-1d\nstrategies = greedy\n").find("greedy"), std::string::npos);
    EXPECT_NE(message("id = fig-cauchy-1d\nnonsense\n").find("x.cfg:2"), std::string::npos);
}

TEST(Seeds, UnitAndReproducible) {
    const Vector a = seeded_unit_vector(100, 3), b = seeded_unit_vector(100, 3), c = seeded_unit_vector(100, 4);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_NEAR(a.norm(), 1.0, 1e-15);
}

TEST_F(Experiments, CauchyOneDimensionalDeterministicAndBounded) {
    auto c = config("fig-cauchy-1d", 600, 14);
    c.threads = 3;
    const auto r1 = run_experiment(c);
    const std::string first = slurp(r1.files.front());
    const auto r2 = run_experiment(c);
    EXPECT_EQ(slurp(r2.files.front()), first);
    EXPECT_EQ(first.substr(0, first.find('\n')), "ell,true_error,bound");
    for (std::size_t k = 0; k < r1.runs.size(); ++k)
        for (std::size_t j = 0; j < r1.runs[k].trace.size(); ++j)
            EXPECT_EQ(r1.runs[k].trace[j].true_error, r2.runs[k].trace[j].true_error);
    expect_bounded(find(r1, "cauchy"));
    EXPECT_GT(find(r1, "extended").trace.back().true_error, find(r1, "cauchy").trace.back().true_error);
    EXPECT_GT(find(r1, "extended").trace.back().true_error, find(r1, "eds").trace.back().true_error);
}

TEST_F(Experiments, LaplaceOneDimensional) {
    const auto r = run_experiment(config("fig-lapl-1d", 800, 16));
    expect_bounded(find(r, "zolotarev"));
    EXPECT_EQ(r.files.size(), 3u);
}

TEST_F(Experiments, ShiftedLaplaceBoundForSingularFunction) {
    auto c = config("fig-lapl-1d", 400, 12);
    c.function = "lambertw";
    c.strategies = {"zolotarev"};
    EXPECT_THROW(emit_bounds(c), DomainError);
    c.shift = "a/2";
    const auto curves = emit_bounds(c);
    ASSERT_EQ(curves.size(), 1u);
    const auto r = run_experiment(c);
    expect_bounded(r.runs.front());
    EXPECT_LE(r.runs.front().trace.back().true_error, 1e-3);
}

TEST_F(Experiments, EigenvalueDistributions) {
    auto c = config("fig-cauchy-1d-eig", 400, 12);
    c.strategies = {"cauchy", "eds"};
    c.gnuplot = true;
    const auto r = run_experiment(c);
    EXPECT_EQ(r.runs.size(), 6u);
    for (const char* tag : {"equispaced", "shifted-laplacian", "two-clusters"}) expect_bounded(find(r, "cauchy", tag));
    EXPECT_TRUE(std::filesystem::exists(dir_ / "fig-cauchy-1d-eig.gp"));
    EXPECT_TRUE(std::filesystem::exists(dir_ / "fig-cauchy-1d-eig-two-clusters-eds.csv"));
}

TEST_F(Experiments, OtherCauchyFunctions) {
    auto c = config("fig-cauchy-1d-funcs", 500, 12);
    c.strategies = {"cauchy"};
    const auto r = run_experiment(c);
    ASSERT_EQ(r.runs.size(), 3u);
    for (const auto& run : r.runs) expect_bounded(run);
}

TEST_F(Experiments, TableSummary) {
    auto c = config("table-times", 3000, 200);
    c.tolerances = {1e-2, 1e-4};
    const auto r = run_experiment(c);
    const std::string summary = slurp((dir_ / "table-times-summary.csv").string());
    EXPECT_EQ(summary.substr(0, summary.find('\n')), "tolerance,strategy,iterations,seconds");
    EXPECT_LT(find(r, "eds").trace.size(), find(r, "extended").trace.size());
    EXPECT_LE(find(r, "eds").trace.back().rel_true_error, 1e-4);
}

TEST_F(Experiments, KroneckerLaplace) {
    const auto r = run_experiment(config("fig-lapl-2d", 80, 10));
    expect_bounded(find(r, "zolotarev"));
    EXPECT_TRUE(std::filesystem::exists(dir_ / "fig-lapl-2d-singular-values.csv"));
    EXPECT_GT(find(r, "polynomial").trace.back().true_error, find(r, "zolotarev").trace.back().true_error);
}

TEST_F(Experiments, KroneckerCauchy) {
    const auto r = run_experiment(config("fig-cauchy-2d", 80, 10));
    expect_bounded(find(r, "cauchy"));
    const std::string sv = slurp((dir_ / "fig-cauchy-2d-singular-values.csv").string());
    EXPECT_EQ(sv.substr(0, sv.find('\n')), "index,sigma,bound");
}

TEST_F(Experiments, BoundsDecrease) {
    for (const char* id : {"fig-cauchy-1d", "fig-lapl-1d", "fig-cauchy-2d", "fig-lapl-2d"}) {
        auto c = config(id, 100, 20);
        for (const auto& [tag, table] : emit_bounds(c)) {
            std::stringstream ss;
            table.write(ss);
            std::string line;
            std::getline(ss, line);
            EXPECT_EQ(line, "ell,bound");
            double prev = kInf;
            while (std::getline(ss, line)) {
                const double b = std::stod(line.substr(line.find(',') + 1));
                EXPECT_LT(b, prev) << id;
                prev = b;
            }
        }
    }
}
