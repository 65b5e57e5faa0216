#include "helpers.hpp"

#include "overtaking/casebook.hpp"
#include "overtaking/det_blackwell.hpp"
#include "overtaking/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace overtaking;
using testing_helpers::pure;

namespace {

// Brute force: every prefix of length H-1 continued by the policy, judged on a long explicit horizon.
bool brute_force_passes(const AverageMdp& avg, const std::vector<std::size_t>& policy, std::size_t horizon,
                        std::size_t window_start, bool reach) {
    constexpr std::size_t kLong = 3000;
    auto run = [&](std::size_t s, const std::vector<std::size_t>& prefix) {
        std::vector<long double> logs{0.0L};
        for (std::size_t k = 0; k + 1 < kLong; ++k) {
            const std::size_t a = k < prefix.size() ? prefix[k] : policy[s];
            logs.push_back(logs.back() + std::log(static_cast<long double>(avg.stay[s][a])));
            s = avg.successor[s][a];
        }
        return logs;
    };
    bool passed = true;
    for (std::size_t s0 = 0; s0 < avg.state_count(); ++s0) {
        const auto cand = run(s0, {});
        std::vector<std::size_t> prefix;
        std::function<void(std::size_t)> dfs = [&](std::size_t s) {
            if (prefix.size() + 1 == horizon) {
                const auto path = run(s0, prefix);
                bool never_worse = true, strict_late = false;
                for (std::size_t t = window_start; t <= kLong; ++t) {
                    long double adv = cand[t - 1] - path[t - 1];
                    if (!reach) adv = -adv;
                    if (adv < -1e-10L) never_worse = false;
                    if (t > kLong - 500 && adv > 1e-10L) strict_late = true;
                }
                if (never_worse && strict_late) passed = false;
                return;
            }
            for (std::size_t a = 0; a < avg.actions[s].size(); ++a) {
                prefix.push_back(a);
                dfs(avg.successor[s][a]);
                prefix.pop_back();
            }
        };
        dfs(s0);
    }
    return passed;
}

} // namespace

TEST(DetBlackwell, TransformOfExample1) {
    const Mdp m = build_example1().mdp;
    const AverageMdp avg = to_average_mdp(m);
    ASSERT_EQ(avg.state_count(), 3u);
    EXPECT_EQ(avg.states[0], "x");
    EXPECT_EQ(avg.successor[0][0], 1u);
    EXPECT_EQ(avg.successor[0][1], 2u);
    EXPECT_NEAR(avg.payoff[0][0], -std::log(0.89), 1e-15);
    EXPECT_NEAR(avg.payoff[0][1], std::log(2.0), 1e-15);
    const AverageMdp safe = to_average_mdp(m.with_objective(Objective::Safety));
    EXPECT_NEAR(safe.payoff[0][1], -std::log(2.0), 1e-15);
}

TEST(DetBlackwell, TransformRejectsNonDeterministicModels) {
    EXPECT_THROW(to_average_mdp(build_example3()), ModelError);
    const Mdp jump = MdpBuilder({"x", "t"}, "t").action("x", "a", {{"t", 1.0}}).action("x", "b", {{"x", 0.5}, {"t", 0.5}}).build();
    EXPECT_THROW(to_average_mdp(jump), ModelError);
}

TEST(DetBlackwell, LiftAndPolicyRoundTrip) {
    const Mdp m = build_example1().mdp;
    const AverageMdp avg = to_average_mdp(m);
    const auto sigma = lift_policy(m, avg, {1, 0, 0});
    EXPECT_EQ(sigma, pure(m, {{"x", "b"}}));
    EXPECT_EQ(policy_of(avg, sigma), (std::vector<std::size_t>{1, 0, 0}));
    EXPECT_THROW(policy_of(avg, StationaryStrategy::uniform(m)), ModelError);
}

TEST(DetBlackwell, LoopsOfExample2) {
    const Mdp m = build_example2();
    const AverageMdp avg = to_average_mdp(m);
    const auto report = loop_report(avg);
    ASSERT_EQ(report.loops.size(), 2u);
    EXPECT_EQ(loop_label(avg, report.loops[0]), "x:a");
    EXPECT_NEAR(report.loops[0].phi, std::log(2.0), 1e-15);
    EXPECT_FALSE(report.delta);

    const auto safety = loop_report(to_average_mdp(build_example2(Objective::Safety)));
    ASSERT_TRUE(safety.delta);
    EXPECT_NEAR(*safety.delta, -std::log(2.0), 1e-15);
}

TEST(DetBlackwell, LoopCap) {
    const Mdp m = sample_deterministic(6, 2, 1);
    EXPECT_THROW(loop_report(to_average_mdp(m), 3), CapExceeded);
}

TEST(DetBlackwell, Example1PicksA) {
    const Mdp m = build_example1().mdp;
    const AverageMdp avg = to_average_mdp(m);
    const auto policy = blackwell_optimal(avg);
    EXPECT_EQ(policy[0], 0u);
    // direct discounted payoff sums along the two paths from x at beta = 0.999
    auto discounted = [&](std::size_t first) {
        long double sum = 0.0L, w = 1.0L;
        std::size_t s = 0, a = first;
        for (int k = 0; k < 200000; ++k) {
            sum += w * avg.payoff[s][a];
            w *= 0.999L;
            s = avg.successor[s][a];
            a = 0;
        }
        return sum;
    };
    EXPECT_GT(discounted(0), discounted(1));
}

TEST(DetBlackwell, SingleActionModel) {
    const Mdp m = MdpBuilder({"x", "t"}, "t").action("x", "only", {{"x", 0.3}, {"t", 0.7}}).build();
    EXPECT_EQ(blackwell_optimal(to_average_mdp(m)), (std::vector<std::size_t>{0}));
}

TEST(DetBlackwell, PathCheckExample1) {
    const Mdp m = build_example1().mdp;
    const auto a = pure(m, {{"x", "a"}});
    const auto b = pure(m, {{"x", "b"}});
    EXPECT_TRUE(not_weakly_overtaken_check(m, a, 200, 60).passed);
    // b is ahead until period 53, so a window inside that stretch cannot see the reversal
    EXPECT_TRUE(not_weakly_overtaken_check(m, b, 20, 10).passed);
    const auto fail = not_weakly_overtaken_check(m, b, 70, 60);
    EXPECT_FALSE(fail.passed);
    ASSERT_TRUE(fail.witness);
    EXPECT_EQ(fail.witness->start, 0u);
    EXPECT_EQ(fail.witness->actions.front(), 0u);
    EXPECT_GE(fail.witness->strict_period, 60u);
}

TEST(DetBlackwell, PathCheckExample2Ties) {
    const Mdp m = build_example2();
    const auto check = not_weakly_overtaken_check(m, pure(m, {{"x", "a"}}), 12, 6);
    EXPECT_TRUE(check.passed);
    EXPECT_GT(check.complete_paths, 0u);
    EXPECT_LE(check.transform_error, 1e-12);
}

TEST(DetBlackwell, PathCheckCap) {
    const Mdp m = sample_deterministic(5, 3, 2);
    PathCheckOptions options;
    options.node_cap = 10;
    EXPECT_THROW(not_weakly_overtaken_check(m, pure(m, {}), 20, 20, options), CapExceeded);
}

TEST(DetBlackwell, PathCheckMatchesBruteForce) {
    std::size_t failures = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const Mdp m = sample_deterministic(4, 2, seed);
        const AverageMdp avg = to_average_mdp(m);
        for (const auto& sigma : enumerate_pure_stationary(m)) {
            const auto policy = policy_of(avg, sigma);
            const bool got = not_weakly_overtaken_check(m, sigma, 7, 4).passed;
            EXPECT_EQ(got, brute_force_passes(avg, policy, 7, 4, true)) << seed;
            failures += !got;
        }
    }
    EXPECT_GT(failures, 0u);
}

TEST(DetBlackwell, BlackwellPolicyPassesOnRandomModels) {
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const Mdp m = sample_deterministic(4, 2, seed);
        const AverageMdp avg = to_average_mdp(m);
        const auto sigma = lift_policy(m, avg, blackwell_optimal(avg));
        const auto check = not_weakly_overtaken_check(m, sigma, 20, 10);
        EXPECT_TRUE(check.passed) << seed;
        EXPECT_LE(check.transform_error, 1e-12);
    }
}
