#include "helpers.hpp"

#include "overtaking/casebook.hpp"
#include "overtaking/error.hpp"
#include "overtaking/strategy.hpp"

#include <gtest/gtest.h>

using namespace overtaking;
using testing_helpers::pure;

TEST(Strategy, EnumerationOrderAndCount) {
    const Mdp m = MdpBuilder({"x", "y", "t"}, "t")
                      .action("x", "a", {{"t", 1.0}})
                      .action("x", "b", {{"t", 1.0}})
                      .action("y", "c", {{"t", 1.0}})
                      .action("y", "d", {{"t", 1.0}})
                      .action("y", "e", {{"t", 1.0}})
                      .build();
    const auto all = enumerate_pure_stationary(m);
    ASSERT_EQ(all.size(), 6u);
    EXPECT_EQ(pure_stationary_count(m), 6u);
    EXPECT_EQ(action_profile(m, all[0]), "x=a;y=c");
    EXPECT_EQ(action_profile(m, all[1]), "x=a;y=d");
    EXPECT_EQ(action_profile(m, all[3]), "x=b;y=c");
    EXPECT_THROW(enumerate_pure_stationary(m, 5), CapExceeded);
}

TEST(Strategy, PureActionAndProfile) {
    const Mdp m = build_example2();
    const auto sigma = stationary_from_first_actions(m, {{"x", {{"a", 0.5}, {"b", 0.5}}}, {"y", {{"d", 1.0}}}, {"z", {{"e", 1.0}}}});
    EXPECT_FALSE(sigma.is_pure());
    EXPECT_FALSE(sigma.pure_action(0));
    EXPECT_EQ(sigma.pure_action(1), 0u);
    EXPECT_EQ(action_profile(m, sigma), "x=a:0.5|b:0.5;y=d;z=e");
}

TEST(Strategy, CheckStrategyRejectsBadRows) {
    const Mdp m = build_example2();
    EXPECT_THROW(check_strategy(m, StationaryStrategy({{0.5, 0.4}, {1.0}, {1.0}, {}})), ModelError);
    EXPECT_THROW(check_strategy(m, StationaryStrategy({{1.0}, {1.0}, {1.0}, {}})), ModelError);
    EXPECT_THROW(check_strategy(m, StationaryStrategy({{1.0, 0.0}})), ModelError);
    EXPECT_NO_THROW(check_strategy(m, StationaryStrategy::uniform(m)));
}

TEST(Strategy, InducedMatrixIsStochasticWithAbsorbingTarget) {
    const Mdp m = sample_generic(4, 2, 3);
    const auto t = induced_matrix(m, StationaryStrategy::uniform(m));
    for (Eigen::Index i = 0; i < t.p.rows(); ++i) EXPECT_NEAR(t.p.row(i).sum(), 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(t.p(3, 3), 1.0);
}

TEST(Strategy, InducedMatrixIsAffineInOneState) {
    const Mdp m = sample_generic(5, 3, 11);
    const auto s1 = pure(m, {{"s2", "a1"}});
    const auto s2 = pure(m, {{"s2", "a3"}});
    const double alpha = 0.3;
    std::vector<std::vector<double>> mix;
    for (std::size_t s = 0; s < m.state_count(); ++s) {
        std::vector<double> row = s1.at(s);
        for (std::size_t a = 0; a < row.size(); ++a) row[a] = alpha * s1.prob(s, a) + (1 - alpha) * s2.prob(s, a);
        mix.push_back(row);
    }
    const auto lhs = induced_matrix(m, StationaryStrategy(mix)).p;
    const Eigen::MatrixXd rhs = alpha * induced_matrix(m, s1).p + (1 - alpha) * induced_matrix(m, s2).p;
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Strategy, DeterministicRowsHaveTwoEntries) {
    const Mdp m = sample_deterministic(5, 3, 4);
    for (const auto& sigma : enumerate_pure_stationary(m)) {
        const auto t = induced_matrix(m, sigma);
        for (std::size_t s : m.non_target_states()) {
            int nonzero = 0;
            for (Eigen::Index z = 0; z < t.p.cols(); ++z) nonzero += t.p(static_cast<Eigen::Index>(s), z) > 0.0;
            EXPECT_LE(nonzero, 2);
        }
    }
}

TEST(Strategy, MarkovPlanPeriods) {
    const Mdp m = build_example2();
    const MarkovPlan plan = example2_plan(m, {0.0, 0.25}, 1.0);
    const std::size_t x = m.state_index("x");
    EXPECT_EQ(plan.horizon(), 2u);
    EXPECT_DOUBLE_EQ(plan.at_period(1).prob(x, 1), 0.0);
    EXPECT_DOUBLE_EQ(plan.at_period(2).prob(x, 1), 0.25);
    EXPECT_DOUBLE_EQ(plan.at_period(3).prob(x, 1), 1.0);
    EXPECT_DOUBLE_EQ(plan.at_period(100).prob(x, 1), 1.0);
}
