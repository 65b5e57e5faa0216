#include "helpers.hpp"

#include "overtaking/casebook.hpp"
#include "overtaking/error.hpp"
#include "overtaking/horizon.hpp"
#include "overtaking/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace overtaking;
using testing_helpers::pure;

namespace {

std::size_t brute_exponent(std::size_t order, double ratio, double bound, std::size_t m) {
    std::size_t last_bad = 0;
    for (std::size_t t = 1; t < 2'000'000; ++t) {
        const long double lhs = static_cast<long double>(order) * std::log(static_cast<long double>(t)) +
                                static_cast<long double>(t) * std::log(static_cast<long double>(ratio));
        if (!(lhs < std::log(static_cast<long double>(bound)))) last_bad = t;
    }
    return std::max(m, last_bad + 1);
}

void expect_power_bounds(const Eigen::MatrixXd& m, const JordanConstants& k, std::size_t last) {
    Eigen::MatrixXd p = m;
    const double order = static_cast<double>(m.rows());
    for (std::size_t t = 1; t <= last; ++t) {
        const double rt = std::pow(k.rho, static_cast<double>(t));
        const double upper = k.c * (k.diagonalizable ? 1.0 : std::pow(static_cast<double>(t), order)) * rt;
        EXPECT_LE(p.maxCoeff(), upper * (1 + 1e-9)) << t;
        if (t >= k.m) EXPECT_GE(p.minCoeff(), k.c_tilde * rt * (1 - 1e-9)) << t;
        p = p * m;
    }
}

} // namespace

TEST(Horizon, DominanceExponentMatchesScan) {
    for (std::size_t order : {1u, 3u, 5u})
        for (double ratio : {0.5, 0.9, 0.989})
            for (double bound : {1.0, 0.3, 5.0 / 18.0, 1e-3})
                for (std::size_t m : {1u, 7u})
                    EXPECT_EQ(smallest_dominance_exponent(order, ratio, bound, m), brute_exponent(order, ratio, bound, m))
                        << order << " " << ratio << " " << bound << " " << m;
    EXPECT_THROW(smallest_dominance_exponent(3, 1.0, 0.5, 1), ModelError);
    EXPECT_THROW(smallest_dominance_exponent(3, 0.5, 0.0, 1), ModelError);
}

TEST(Horizon, ExponentIsMonotoneInSlack) {
    std::size_t prev = 0;
    for (double bound : {1.0, 0.5, 0.25, 0.1, 0.01}) {
        const std::size_t t = smallest_dominance_exponent(4, 0.95, bound, 1);
        EXPECT_GE(t, prev);
        prev = t;
    }
}

TEST(Horizon, JordanConstantsBoundPowersOfPositiveMatrices) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 15; ++trial) {
        Eigen::MatrixXd m(3, 3);
        for (Eigen::Index i = 0; i < 9; ++i) m(i / 3, i % 3) = u(rng) / 3.0;
        const auto k = jordan_constants(m);
        EXPECT_TRUE(k.diagonalizable);
        EXPECT_NEAR(k.rho, perron_root(m), 1e-12);
        EXPECT_LT(k.mu, k.rho);
        expect_power_bounds(m, k, 200);
    }
}

TEST(Horizon, JordanConstantsDefectiveMatrix) {
    // J/3 plus a nilpotent perturbation orthogonal to the all-ones vectors
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
    const Eigen::Vector3d u(1, -1, 0), z(1, 1, -2);
    m += 0.1 * u * z.transpose();
    ASSERT_GT(m.minCoeff(), 0.0);
    const auto k = jordan_constants(m);
    EXPECT_FALSE(k.diagonalizable);
    EXPECT_NEAR(k.rho, 1.0, 1e-12);
    expect_power_bounds(m, k, 50);
}

TEST(Horizon, Example1Certificate) {
    const Mdp m = build_example1().mdp;
    const auto cert = certified_horizon(m, pure(m, {{"x", "a"}}), pure(m, {{"x", "b"}}));
    EXPECT_NEAR(cert.c, 1.0, 1e-12);
    EXPECT_NEAR(cert.c_tilde, 5.0 / 18.0, 1e-12);
    EXPECT_EQ(cert.m, 1u);
    EXPECT_FALSE(cert.entrywise);
    EXPECT_GE(cert.T, 54u);
    EXPECT_EQ(cert.verified_window.first, cert.T);
    EXPECT_EQ(cert.verified_window.last, cert.T + 50);
    EXPECT_NEAR(cert.lambda2_pair.first, 0.89, 1e-12);
    // the inequality with these constants: 4 ln t + t ln(0.89/0.9) < ln(5/18), first holding at t - 1
    EXPECT_EQ(cert.T, brute_exponent(4, 0.89 / 0.9, 5.0 / 18.0, 1) + 1);
}

TEST(Horizon, CertificateRejectsTiesAndWrongOrder) {
    const Mdp m1 = build_example1().mdp;
    EXPECT_THROW(certified_horizon(m1, pure(m1, {{"x", "b"}}), pure(m1, {{"x", "a"}})), ModelError);
    const Mdp m2 = build_example2();
    EXPECT_THROW(certified_horizon(m2, pure(m2, {{"x", "a"}}), pure(m2, {{"x", "b"}})), ModelError);
}

TEST(Horizon, CertificatesAreConservativeOnGenericModels) {
    std::size_t issued = 0;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Mdp m = sample_generic(3 + seed % 2, 2, seed + 40);
        const auto [best, report] = best_pure_stationary(m);
        for (std::size_t i = 0; i < report.entries.size(); ++i) {
            if (i == report.selected) continue;
            const auto cert = certified_horizon(m, best, report.entries[i].strategy);
            ++issued;
            EXPECT_TRUE(cert.entrywise);
            for (std::size_t s0 : m.non_target_states()) {
                const auto a = reach_curve(m, best, s0, cert.T + 50);
                const auto b = reach_curve(m, report.entries[i].strategy, s0, cert.T + 50);
                const auto emp = empirical_crossover(a, b, m.objective());
                ASSERT_TRUE(emp);
                EXPECT_GE(cert.T, *emp);
            }
        }
    }
    EXPECT_GT(issued, 0u);
}

TEST(Horizon, EmpiricalCrossover) {
    const Mdp m = build_example1().mdp;
    const auto a = reach_curve(m, pure(m, {{"x", "a"}}), 0, 300);
    const auto b = reach_curve(m, pure(m, {{"x", "b"}}), 0, 300);
    EXPECT_EQ(empirical_crossover(a, b, Objective::Reach), 54u);
    EXPECT_FALSE(empirical_crossover(b, a, Objective::Reach));
    EXPECT_FALSE(empirical_crossover(a, a, Objective::Reach));
}
