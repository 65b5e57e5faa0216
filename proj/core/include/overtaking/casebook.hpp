#pragma once

#include "overtaking/evaluate.hpp"
#include "overtaking/mdp.hpp"
#include "overtaking/strategy.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace overtaking {

struct Example1 {
    Mdp mdp;
    /// Parameters outside 0 < p < q < 2p/(2p+1).
    bool warning = false;
};

/// States x, y, z, s*. x: a -> (q s*, 1-q y), b -> (1/2 s*, 1/2 z); y: c -> (q s*, 1-q y); z: d -> (p s*, 1-p z).
Example1 build_example1(double p = 0.1, double q = 0.11);

/// States x, y, z, s*. The Safety variant moves b's target mass onto d.
Mdp build_example2(Objective objective = Objective::Reach);

/// States x, x', y, z, s*, with the composite action c flattened to its one-step distribution.
Mdp build_example3(Objective objective = Objective::Reach);

/// States x, s* with actions a0, a1/2, a7/8 (subscript = target probability).
Mdp build_incomparable();

/// Plan for Example 2 playing b at x with probability z[n-1] at period n, then tail_z.
MarkovPlan example2_plan(const Mdp& ex2, const std::vector<double>& z, double tail_z);
/// Probability of b at x in periods 1..count.
std::vector<double> b_probabilities(const Mdp& ex2, const MarkovPlan& plan, std::size_t count);
/// P(at x and playing b at period n) = prod_{k<n} (1 - z_k)/2 * z_n.
double prob_b_at(const std::vector<double>& z, std::size_t n);

struct Improvement {
    MarkovPlan plan;
    /// Returned the stationary (1/2, 1/2) plan.
    bool stationary_half = false;
    /// First period with positive b probability (0 when none).
    std::size_t m = 0;
};

/**
 * A plan that overtakes `plan` in Example 2. With every z_n < 1 and some z_m > 0,
 * z_m is halved and 1 - z_n is scaled by one common factor for n > m, chosen so
 * that the products prod (1 - z_n) agree up to period max(horizon, m + 1).
 * Otherwise the stationary (1/2, 1/2) plan.
 */
Improvement example2_improve(const Mdp& ex2, const MarkovPlan& plan, std::size_t horizon = 20);

/// Example 3: a for `t` periods, then c.
MarkovPlan example3_plan(const Mdp& ex3, std::size_t t);
/// Example 3: a forever.
MarkovPlan example3_a_forever(const Mdp& ex3);

/// The alternating plan a0, a7/8, a0 repeated, explicit for `horizon` periods.
MarkovPlan incomparable_cycle_plan(const Mdp& mdp, std::size_t horizon);

enum class ClaimStatus { Passed, Failed, Inconclusive };
std::string_view to_string(ClaimStatus status);

struct Evidence {
    std::string name;
    double value;
};

struct ClaimResult {
    std::string id;
    ClaimStatus status = ClaimStatus::Failed;
    std::string statement;
    std::vector<Evidence> evidence;
    std::string note;
};

struct ClaimOptions {
    double p = 0.1;
    double q = 0.11;
    std::uint64_t seed = 2024;
    std::size_t sampled_plans = 20;
};

/// Runs every casebook check; failures are reported, never thrown.
std::vector<ClaimResult> check_claims(std::size_t horizon, const ClaimOptions& options = {});

} // namespace overtaking
