#include "helpers.hpp"

#include "overtaking/casebook.hpp"
#include "overtaking/error.hpp"
#include "overtaking/io.hpp"

#include <gtest/gtest.h>

using namespace overtaking;
using testing_helpers::pure;

namespace {

std::string parse_error_location(const std::string& text) {
    try {
        parse_mdp(text, "in.json");
    } catch (const ParseError& e) {
        return e.location();
    }
    return "no error";
}

} // namespace

TEST(Io, MdpRoundTrip) {
    for (const Mdp& m : {build_example1().mdp, build_example2(Objective::Safety), build_example3(), sample_generic(5, 3, 1)}) {
        // loading renormalizes rows once, which may move entries by an ulp
        const Mdp back = parse_mdp(mdp_to_json(m));
        EXPECT_LE(testing_helpers::max_kernel_gap(back, m), 1e-15);
        EXPECT_EQ(parse_mdp_document(mdp_to_json(m)), m);
    }
}

TEST(Io, MdpSchemaErrorsCarryLocations) {
    EXPECT_EQ(parse_error_location("{"), "in.json:byte 2");
    EXPECT_EQ(parse_error_location(R"({"states":["x","t"],"target":"u","objective":"reach","kernel":{}})"),
              "in.json:/target");
    EXPECT_EQ(parse_error_location(R"({"states":["x","t"],"target":"t","objective":"max","kernel":{}})"),
              "in.json:/objective");
    EXPECT_EQ(parse_error_location(R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{"x":{"a":{"q":1}}}})"),
              "in.json:/kernel/x/a/q");
    EXPECT_EQ(parse_error_location(R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{"x":{"a":{"t":"1"}}}})"),
              "in.json:/kernel/x/a/t");
    EXPECT_EQ(parse_error_location(R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{"x":{"a":{"t":0.9}}}})"),
              "in.json:/kernel/x/a");
    EXPECT_EQ(parse_error_location(R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{},"extra":1})"),
              "in.json:/extra");
    EXPECT_EQ(parse_error_location(R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{}})"),
              "in.json:/kernel/x");
}

TEST(Io, LoadRenormalizesRowsOnce) {
    const Mdp m = parse_mdp(R"({"states":["x","t"],"target":"t","objective":"reach","kernel":{"x":{"a":{"x":0.3,"t":0.7000000000001}}}})");
    EXPECT_NEAR(m.prob(0, 0, 0) + m.prob(0, 0, 1), 1.0, 1e-16);
    EXPECT_THROW(load_mdp("/nonexistent/file.json"), ParseError);
}

TEST(Io, StrategyRoundTrip) {
    const Mdp m = build_example2();
    const auto mixed = stationary_from_first_actions(m, {{"x", {{"a", 0.25}, {"b", 0.75}}}, {"y", {{"d", 1}}}, {"z", {{"e", 1}}}});
    EXPECT_EQ(parse_strategy(m, strategy_to_json(m, mixed)), mixed);
    const auto p = pure(m, {{"x", "b"}});
    EXPECT_EQ(strategy_to_json(m, p).find("\"x\": \"b\""), strategy_to_json(m, p).find("\"x\""));
    EXPECT_EQ(parse_strategy(m, strategy_to_json(m, p)), p);
    EXPECT_THROW(parse_strategy(m, R"({"x":"q","y":"d","z":"e"})"), ParseError);
    EXPECT_THROW(parse_strategy(m, R"({"x":"a","y":"d"})"), ParseError);
    EXPECT_THROW(parse_strategy(m, R"({"x":{"a":0.5,"b":0.4},"y":"d","z":"e"})"), ParseError);
}

TEST(Io, PlanRoundTrip) {
    const Mdp m = build_example2();
    const MarkovPlan plan = example2_plan(m, {0.0, 0.5, 1.0}, 0.125);
    const MarkovPlan back = parse_plan(m, plan_to_json(m, plan));
    EXPECT_EQ(back.rows, plan.rows);
    EXPECT_EQ(back.tail, plan.tail);
    const MarkovPlan bare = parse_plan(m, R"({"x":"a","y":"d","z":"e"})");
    EXPECT_EQ(bare.horizon(), 0u);
    try {
        parse_plan(m, R"({"rows":[{"x":"a","y":"d","z":"e"},{"x":"nope","y":"d","z":"e"}],"tail":{"x":"a","y":"d","z":"e"}})", "p.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.location(), "p.json:/rows/1/x");
    }
}

TEST(Io, CurveCsvRoundTrip) {
    const Mdp m = build_example1().mdp;
    const auto curve = reach_curve(m, pure(m, {{"x", "b"}}), 0, 100);
    const std::string csv = curve_to_csv(curve);
    EXPECT_EQ(csv.substr(0, 11), "t,prob\n1,0\n");
    EXPECT_EQ(parse_curve_csv(csv), curve.values());
    EXPECT_THROW(parse_curve_csv("t,prob\n2,0.5\n"), ParseError);
    EXPECT_THROW(parse_curve_csv("time,prob\n"), ParseError);
}

TEST(Io, SpectralCsvRoundTrip) {
    const Mdp m = build_example1().mdp;
    const auto report = genericity_check(m);
    const auto table = parse_spectral_csv(spectral_to_csv(m, report));
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].profile, "x=a;y=c;z=d");
    EXPECT_EQ(table.rows[1].lambda2, report.entries[1].lambda2);
    EXPECT_EQ(table.rows[0].gap, report.entries[0].gap);
    EXPECT_EQ(table.selected, 0u);
    EXPECT_TRUE(table.generic);
    EXPECT_EQ(table.min_gap, report.min_gap);
}

TEST(Io, LoopsCsvRoundTrip) {
    const AverageMdp avg = to_average_mdp(build_example2(Objective::Safety));
    const auto report = loop_report(avg);
    const auto table = parse_loops_csv(loops_to_csv(avg, report));
    ASSERT_EQ(table.loops.size(), report.loops.size());
    EXPECT_EQ(table.loops[0].second, report.loops[0].phi);
    EXPECT_EQ(table.delta, report.delta);
    EXPECT_FALSE(parse_loops_csv(loops_to_csv(to_average_mdp(build_example2()), loop_report(to_average_mdp(build_example2())))).delta);
}

TEST(Io, CertificateRoundTrip) {
    const Mdp m = build_example1().mdp;
    const auto cert = certified_horizon(m, pure(m, {{"x", "a"}}), pure(m, {{"x", "b"}}));
    const std::string json = certificate_to_json(m, cert);
    const auto back = parse_certificate(m, json);
    EXPECT_EQ(back.sigma, cert.sigma);
    EXPECT_EQ(back.c_tilde, cert.c_tilde);
    EXPECT_EQ(back.T, cert.T);
    EXPECT_EQ(back.verified_states, cert.verified_states);
    EXPECT_EQ(certificate_to_json(m, back), json);
}

TEST(Io, ClaimsVerdictValidationRoundTrip) {
    const auto claims = check_claims(300);
    const std::string json = claims_to_json(claims);
    EXPECT_EQ(claims_to_json(parse_claims(json)), json);

    std::vector<ClaimResult> odd{{"id", ClaimStatus::Inconclusive, "s", {{"inf", std::numeric_limits<double>::infinity()}}, ""}};
    const auto back = parse_claims(claims_to_json(odd));
    EXPECT_TRUE(std::isinf(back[0].evidence[0].value));

    const Verdict v{VerdictKind::WeaklyOvertakes, {3, 9}, 1e-10, 1, {4, 5}, {}};
    EXPECT_EQ(verdict_to_json(parse_verdict(verdict_to_json(v))), verdict_to_json(v));

    const Mdp bad = MdpBuilder({"x", "t"}, "t").action("x", "a", {{"t", 0.5}}).build();
    const auto report = validate(bad);
    EXPECT_EQ(validation_to_json(parse_validation(validation_to_json(report))), validation_to_json(report));
}
