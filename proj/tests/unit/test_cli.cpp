#include "cli.hpp"
#include "helpers.hpp"

#include "overtaking/casebook.hpp"
#include "overtaking/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace overtaking;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("overtaking_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
        write("ex1.json", mdp_to_json(build_example1().mdp));
        write("a.json", R"({"x":"a","y":"c","z":"d"})");
        write("b.json", R"({"x":"b","y":"c","z":"d"})");
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write(const std::string& name, const std::string& text) const { write_text_file(path(name), text); }

    std::filesystem::path dir_;
};

} // namespace

TEST_F(CliTest, SpectralOnExample1) {
    const auto r = run_cli({"spectral", path("ex1.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto table = parse_spectral_csv(r.out);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_NEAR(table.rows[0].lambda2, 0.89, 1e-12);
    EXPECT_NEAR(table.rows[1].lambda2, 0.90, 1e-12);
    EXPECT_EQ(table.selected, 0u);
}

TEST_F(CliTest, ValidateBadRowSum) {
    write("bad.json", R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{"x":{"a":{"x":0.5,"t":0.6}}}})");
    const auto r = run_cli({"validate", path("bad.json")});
    EXPECT_EQ(r.code, 1);
    const auto report = parse_validation(r.out);
    ASSERT_EQ(report.issues.size(), 1u);
    EXPECT_EQ(report.issues[0].location, "/kernel/x/a");
    EXPECT_EQ(run_cli({"validate", path("ex1.json")}).code, 0);
}

TEST_F(CliTest, UnreadableInputNamesPathAndLocation) {
    write("broken.json", R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{"x":{"a":{"q":1}}}})");
    const auto r = run_cli({"curve", path("broken.json"), "--strategy", path("a.json"), "--from", "x", "--horizon", "5"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(path("broken.json") + ":/kernel/x/a/q"), std::string::npos) << r.err;
    EXPECT_EQ(run_cli({"validate", path("missing.json")}).code, 1);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"curve", path("ex1.json")}).code, 2);
    EXPECT_EQ(run_cli({"compare", path("ex1.json"), "--a", path("a.json"), "--b", path("b.json"), "--from", "x",
                       "--window", "9:3"}).code, 2);
    EXPECT_EQ(run_cli({"compare", path("ex1.json"), "--a", path("a.json"), "--b", path("b.json"), "--from", "x",
                       "--window", "1:9", "--eq-tol", "0"}).code, 2);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, CurveAndCompare) {
    const auto curve = run_cli({"curve", path("ex1.json"), "--strategy", path("a.json"), "--from", "x", "--horizon", "10"});
    ASSERT_EQ(curve.code, 0) << curve.err;
    const auto values = parse_curve_csv(curve.out);
    ASSERT_EQ(values.size(), 10u);
    EXPECT_NEAR(values[1], 0.11, 1e-15);

    const auto cmp = run_cli({"compare", path("ex1.json"), "--a", path("a.json"), "--b", path("b.json"), "--from", "x",
                              "--window", "60:300"});
    ASSERT_EQ(cmp.code, 0) << cmp.err;
    EXPECT_EQ(parse_verdict(cmp.out).kind, VerdictKind::Overtakes);

    ASSERT_EQ(run_cli({"curve", path("ex1.json"), "--strategy", path("b.json"), "--from", "x", "--horizon", "10",
                       "--out", path("curve.csv")}).code, 0);
    EXPECT_EQ(parse_curve_csv(read_text_file(path("curve.csv"))).size(), 10u);
}

TEST_F(CliTest, BestHorizonBlackwellLoops) {
    const Mdp m = build_example1().mdp;
    const auto best = run_cli({"best", path("ex1.json")});
    ASSERT_EQ(best.code, 0);
    EXPECT_EQ(parse_strategy(m, best.out), parse_strategy(m, read_text_file(path("a.json"))));

    const auto cert = run_cli({"horizon", path("ex1.json"), "--a", path("a.json"), "--b", path("b.json")});
    ASSERT_EQ(cert.code, 0) << cert.err;
    EXPECT_GE(parse_certificate(m, cert.out).T, 54u);
    EXPECT_EQ(run_cli({"horizon", path("ex1.json"), "--a", path("b.json"), "--b", path("a.json")}).code, 1);

    const auto bw = run_cli({"blackwell", path("ex1.json"), "--check", "20", "--window-start", "10"});
    ASSERT_EQ(bw.code, 0) << bw.err;
    EXPECT_EQ(parse_strategy(m, bw.out), parse_strategy(m, best.out));

    write("ex3.json", mdp_to_json(build_example3()));
    EXPECT_EQ(run_cli({"blackwell", path("ex3.json")}).code, 1);

    const auto loops = run_cli({"loops", path("ex1.json")});
    ASSERT_EQ(loops.code, 0);
    EXPECT_EQ(parse_loops_csv(loops.out).loops.size(), 2u);
}

TEST_F(CliTest, CasebookAndSample) {
    const auto r = run_cli({"casebook", "--horizon", "300"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& c : parse_claims(r.out)) EXPECT_EQ(c.status, ClaimStatus::Passed) << c.id;

    const auto s1 = run_cli({"sample", "--states", "4", "--actions", "2", "--seed", "3"});
    const auto s2 = run_cli({"sample", "--states", "4", "--actions", "2", "--seed", "3"});
    ASSERT_EQ(s1.code, 0);
    EXPECT_EQ(s1.out, s2.out);
    EXPECT_LE(testing_helpers::max_kernel_gap(parse_mdp(s1.out), sample_generic(4, 2, 3)), 1e-15);
    const auto det = run_cli({"sample", "--states", "4", "--actions", "2", "--seed", "3", "--deterministic", "--objective", "safety"});
    EXPECT_EQ(parse_mdp(det.out).objective(), Objective::Safety);
}

TEST_F(CliTest, ObjectiveOverrideFlipsSelection) {
    const auto r = run_cli({"best", path("ex1.json"), "--objective", "safety"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(parse_strategy(build_example1().mdp, r.out), parse_strategy(build_example1().mdp, read_text_file(path("b.json"))));
}

TEST_F(CliTest, OutputIsDeterministic) {
    write("gen.json", run_cli({"sample", "--states", "4", "--actions", "3", "--seed", "8"}).out);
    EXPECT_EQ(run_cli({"spectral", path("gen.json")}).out, run_cli({"spectral", path("gen.json")}).out);
    EXPECT_EQ(run_cli({"casebook", "--horizon", "100"}).out, run_cli({"casebook", "--horizon", "100"}).out);
}
