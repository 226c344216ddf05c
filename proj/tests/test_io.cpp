#include <ratkrylov/driver.hpp>
#include <ratkrylov/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ratkrylov;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("ratkrylov_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& body) const {
        const auto p = (dir_ / name).string();
        std::ofstream(p) << body;
        return p;
    }

    std::filesystem::path dir_;
};

}  // namespace

TEST(Format, DoublesRoundTrip) {
    for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23}) EXPECT_EQ(std::stod(io::format_double(x)), x);
    EXPECT_EQ(io::format_double(kInf), "inf");
    EXPECT_EQ(io::format_double(-kInf), "-inf");
    EXPECT_EQ(io::format_double(std::nan("")), "nan");
    EXPECT_EQ(io::parse_extended("Infinity", "x"), kInf);
    EXPECT_EQ(io::parse_extended("-inf", "x"), -kInf);
    EXPECT_THROW(io::parse_extended("1.5abc", "x"), DomainError);
}

TEST(Poles, RoundTripWithInfinity) {
    const PoleSequence p{{kInf, -0.25, -1.0 / 3.0, -1e-8}, PoleProvenance::custom, std::nullopt};
    std::stringstream ss;
    io::write_poles(ss, p);
    const auto q = io::read_poles(ss);
    ASSERT_EQ(q.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(q[i], p[i]);
}

TEST(Poles, RejectsComplexAndEmpty) {
    std::stringstream c("-1\n-2+3i\n");
    try {
        io::read_poles(c, "p.txt");
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("p.txt:2"), std::string::npos);
    }
    std::stringstream e("# nothing\n\n");
    EXPECT_THROW(io::read_poles(e), DomainError);
}

TEST_F(TempDir, MatrixMarketTridiagonalCoordinate) {
    const auto p = write("t.mtx",
                         "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 5\n"
                         "1 1 2\n2 1 -1\n2 2 2\n3 2 -1\n3 3 2\n");
    const auto op = io::read_matrix_market(p);
    EXPECT_EQ(op.kind(), OperatorKind::tridiagonal);
    EXPECT_LE((op.to_dense() - io::laplacian_1d(3).to_dense()).norm(), 0.0);
}

TEST_F(TempDir, MatrixMarketDiagonalAndDense) {
    const auto d = io::read_matrix_market(
        write("d.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 3\n2 2 5\n"));
    EXPECT_EQ(d.kind(), OperatorKind::diagonal);
    const auto a = io::read_matrix_market(
        write("a.mtx", "%%MatrixMarket matrix array real general\n3 3\n4\n1\n1\n1\n4\n1\n1\n1\n4\n"));
    EXPECT_EQ(a.kind(), OperatorKind::dense);
    EXPECT_DOUBLE_EQ(a.to_dense()(2, 0), 1.0);
    EXPECT_THROW(io::read_matrix_market(write("b.mtx", "%%MatrixMarket matrix array real general\n3 3\n4\n1\n1\n1\n4\n1\n1\n1\n4\n"), 2),
                 Error);
}

TEST_F(TempDir, MatrixMarketErrors) {
    EXPECT_THROW(io::read_matrix_market(write("n.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1\n2 1 3\n")),
                 Error);
    EXPECT_THROW(io::read_matrix_market(write("c.mtx", "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n")),
                 Error);
    EXPECT_THROW(io::read_matrix_market(write("r.mtx", "%%MatrixMarket matrix coordinate real general\n2 3 0\n")), Error);
    EXPECT_THROW(io::read_matrix_market(write("x.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n")),
                 Error);
    EXPECT_THROW(io::read_matrix_market((dir_ / "missing.mtx").string()), Error);
}

TEST_F(TempDir, LoadMatrixSpecs) {
    EXPECT_EQ(io::load_matrix("tridiag:7").size(), 7);
    const auto diff = io::load_matrix("diffusion:9");
    EXPECT_DOUBLE_EQ(diff.to_dense()(0, 0), 2.0 * 1e-2 * 0.1 * 100.0);
    EXPECT_THROW(io::load_matrix("tridiag:2.5"), DomainError);
    const auto d = io::load_matrix(write("diag.txt", "# eigenvalues\n1\n2.5\n4\n"));
    EXPECT_EQ(d.kind(), OperatorKind::diagonal);
    EXPECT_EQ(d.size(), 3);
}

TEST_F(TempDir, FactorFiles) {
    const Matrix f = io::read_factor(write("u.txt", "1 2\n3 4\n\n5 6\n"));
    EXPECT_EQ(f.rows(), 3);
    EXPECT_EQ(f.cols(), 2);
    EXPECT_EQ(f(2, 1), 6.0);
    EXPECT_THROW(io::read_factor(write("bad.txt", "1 2\n3\n")), Error);
}

TEST_F(TempDir, CsvTableSaveAndTrace) {
    std::vector<TraceRow> trace{{1, 3, kInf, 0.5, 0.25, 2.0}, {2, 5, 1e-3, 1e-4, 5e-5, 0.5}};
    const auto t = io::trace_table(trace, true);
    const auto path = (dir_ / "sub" / "trace.csv").string();
    t.save(path);
    EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
    std::ifstream in(path);
    std::stringstream body;
    body << in.rdbuf();
    EXPECT_EQ(body.str(), "ell,est_error,true_error,bound\n1,inf,0.5,2\n2,0.001,0.0001,0.5\n");
    io::CsvTable bad({"a", "b"});
    EXPECT_THROW(bad.add({"1"}), Error);
}
