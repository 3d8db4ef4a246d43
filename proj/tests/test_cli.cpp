#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "shiftgrad/cli.hpp"
#include "shiftgrad/format.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = shiftgrad::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(SHIFTGRAD_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("shiftgrad_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

double first_value(const std::string& text) { return shiftgrad::parse_double(text.substr(0, text.find('\n'))); }

}  // namespace

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, shiftgrad::cli::usage_error);
    EXPECT_EQ(run({"frobnicate"}).code, shiftgrad::cli::usage_error);
    EXPECT_EQ(run({"pascal"}).code, shiftgrad::cli::usage_error);
    EXPECT_EQ(run({"shift-terms", "--alpha", "0,x"}).code, shiftgrad::cli::usage_error);
    EXPECT_EQ(run({"deriv", "--cost", data("cos.cost"), "--theta", "1.0", "--alpha", "1"}).code,
              shiftgrad::cli::usage_error);
    EXPECT_EQ(run({"eval", "--cost", data("cos.cost"), "--theta", "1.0,2.0"}).code, shiftgrad::cli::usage_error);
    EXPECT_EQ(run({"bp-scan", "--qubits", "2,4", "--samples", "4"}).code, shiftgrad::cli::usage_error);
    EXPECT_EQ(run({"bp-scan", "--flavor", "rx"}).code, shiftgrad::cli::usage_error);
}

TEST(Cli, InputErrors) {
    const auto missing = run({"eval", "--cost", data("nope.cost"), "--theta", "0"});
    EXPECT_EQ(missing.code, shiftgrad::cli::input_error);

    const auto reused = run({"eval", "--circuit", data("reused.circ"), "--cost", data("cos.cost"), "--theta", "0"});
    EXPECT_EQ(reused.code, shiftgrad::cli::input_error);
    EXPECT_NE(reused.err.find("parameter reused"), std::string::npos) << reused.err;
    EXPECT_NE(reused.err.find("line 4"), std::string::npos) << reused.err;

    const auto width = run({"eval", "--circuit", data("product.circ"), "--cost", data("wrong_width.cost"), "--theta", "0,0"});
    EXPECT_EQ(width.code, shiftgrad::cli::input_error);
    EXPECT_NE(width.err.find("line 1"), std::string::npos) << width.err;
}

TEST(Cli, TailCheckAcceptsAllZeroSamples) {
    TempDir tmp;
    const std::string raw = tmp.file("zero.raw");
    {
        std::ofstream f(raw);
        f << "block n=2 order=1 samples=2 reference_variance=0\n0\n0\n";
    }
    EXPECT_EQ(run({"tail-check", "--from", raw, "--c", "0.1"}).code, shiftgrad::cli::ok);
}

TEST(Cli, PascalSignedRowFive) {
    const auto r = run({"pascal", "--max-order", "5", "--signed"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    std::string line, last;
    int rows = 0;
    while (std::getline(is, line)) {
        last = line;
        ++rows;
    }
    EXPECT_EQ(rows, 6);
    EXPECT_EQ(last, "N=5 omega=-3/2,-1/2,1/2,3/2 d=4,-12,12,-4");

    const auto u = run({"pascal", "--max-order", "2"});
    EXPECT_NE(u.out.find("N=2 omega=-1,0,1 d=1,2,1"), std::string::npos) << u.out;
}

TEST(Cli, ShiftTerms) {
    const auto r = run({"shift-terms", "--alpha", "0,1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "alpha=0,1 normalizer=4\n1,1 1\n1,-1 -1\n-1,1 -1\n-1,-1 1\n");
}

TEST(Cli, EvalUsesCostFileCircuit) {
    const auto r = run({"eval", "--cost", data("product.cost"), "--theta", "0.3,1.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(first_value(r.out), std::cos(0.3) * std::cos(1.1), 1e-14);
}

TEST(Cli, DerivThirdOrderOnCosine) {
    const auto r = run({"deriv", "--cost", data("cos.cost"), "--theta", "1.0", "--alpha", "0,0,0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(first_value(r.out), 0.841470984807897, 1e-12);
    EXPECT_NE(r.out.find("evaluations=4"), std::string::npos) << r.out;

    const auto s = run({"deriv", "--cost", data("cos.cost"), "--theta", "1.0", "--alpha", "0,0,0", "--method", "sinusoid"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_NEAR(first_value(s.out), std::sin(1.0), 1e-12);
    EXPECT_NE(s.out.find("evaluations=3"), std::string::npos);
}

TEST(Cli, ShiftAndFiniteDifferenceAgree) {
    const std::vector<std::string> base{"deriv", "--cost", data("product.cost"), "--theta", "0.4,2.1", "--alpha", "0,1,1"};
    auto fd = base;
    fd.insert(fd.end(), {"--method", "fd"});
    const auto a = run(base);
    const auto b = run(fd);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_NEAR(first_value(a.out), first_value(b.out), 1e-4);
    auto bad = base;
    bad.insert(bad.end(), {"--fd-step", "0.01"});
    EXPECT_EQ(run(bad).code, shiftgrad::cli::usage_error);
}

TEST(Cli, HessianCsv) {
    TempDir tmp;
    const auto r = run({"hessian", "--cost", data("product.cost"), "--theta", "1.5707963267948966,1.5707963267948966",
                        "--out", tmp.file("h.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(slurp(tmp.file("h.csv")));
    std::string row0, row1;
    std::getline(is, row0);
    std::getline(is, row1);
    EXPECT_NEAR(shiftgrad::parse_double(row0.substr(row0.find(',') + 1)), 1.0, 1e-14);
    EXPECT_NEAR(shiftgrad::parse_double(row1.substr(0, row1.find(','))), 1.0, 1e-14);
}

TEST(Cli, ScanFilesAreByteIdenticalAcrossThreadCounts) {
    TempDir tmp;
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "3", "0", "1"}) {
        ::setenv("SHIFTGRAD_THREADS", threads, 1);
        const std::string csv = tmp.file(std::string("scan_") + threads + ".csv");
        const auto r = run({"bp-scan", "--qubits", "2:6:2", "--layers", "fixed:2", "--samples", "40", "--quantity",
                            "hess:0,1", "--seed", "42", "--out", csv});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto tail = run({"tail-check", "--from", csv + ".raw", "--c", "0.01,0.05,0.1"});
        ASSERT_EQ(tail.code, 0) << tail.err;
        outputs.push_back(r.out + slurp(csv) + slurp(csv + ".raw") + tail.out);
    }
    ::unsetenv("SHIFTGRAD_THREADS");
    for (std::size_t k = 1; k < outputs.size(); ++k) EXPECT_EQ(outputs[k], outputs[0]) << k;
    EXPECT_NE(outputs[0].find("slope="), std::string::npos);
}

TEST(Cli, BadThreadEnvironment) {
    ::setenv("SHIFTGRAD_THREADS", "many", 1);
    const auto r = run({"bp-scan", "--qubits", "2,3,4", "--samples", "4"});
    ::unsetenv("SHIFTGRAD_THREADS");
    EXPECT_EQ(r.code, shiftgrad::cli::usage_error);
}

TEST(Cli, TailCheckRejectsMalformedRaw) {
    TempDir tmp;
    const std::string raw = tmp.file("bad.raw");
    {
        std::ofstream f(raw);
        f << "block n=2 order=1 samples=2 reference_variance=0.1\n0.1\nxyz\n";
    }
    const auto r = run({"tail-check", "--from", raw, "--c", "0.1"});
    EXPECT_EQ(r.code, shiftgrad::cli::input_error);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}
