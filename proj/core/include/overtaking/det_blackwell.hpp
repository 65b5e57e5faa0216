#pragma once

#include "overtaking/mdp.hpp"
#include "overtaking/strategy.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace overtaking {

/// Deterministic average-payoff model on the non-target states of a deterministic MDP.
struct AverageMdp {
    Objective objective = Objective::Reach;
    std::vector<std::string> states;
    /// Index of each state in the source model.
    std::vector<std::size_t> source;
    std::vector<std::vector<std::string>> actions;
    std::vector<std::vector<std::size_t>> successor;
    std::vector<std::vector<double>> payoff;
    /// Probability of the non-target branch, p(successor | s, a).
    std::vector<std::vector<double>> stay;

    std::size_t state_count() const noexcept { return states.size(); }
};

/// Payoff -log p(z|s,a) for Reach, +log p(z|s,a) for Safety; the decision maker maximizes either.
AverageMdp to_average_mdp(const Mdp& mdp);

/// Average-model policy (one action index per state) as a pure strategy of the source model.
StationaryStrategy lift_policy(const Mdp& mdp, const AverageMdp& avg, const std::vector<std::size_t>& policy);
/// Inverse of lift_policy; throws unless sigma is pure.
std::vector<std::size_t> policy_of(const AverageMdp& avg, const StationaryStrategy& sigma);

struct LoopStep {
    std::size_t state;
    std::size_t action;
};

struct Loop {
    std::vector<LoopStep> steps;
    double phi = 0.0;
};

struct LoopReport {
    std::vector<Loop> loops;
    /// Largest strictly negative loop value.
    std::optional<double> delta;
};

inline constexpr std::size_t kDefaultLoopStateCap = 12;

/// Every simple cycle of the successor multigraph, each listed once starting from its smallest state.
LoopReport loop_report(const AverageMdp& avg, std::size_t state_cap = kDefaultLoopStateCap);

/// "x:a|y:c"
std::string loop_label(const AverageMdp& avg, const Loop& loop);

struct BlackwellOptions {
    std::vector<double> betas{1 - 1e-2, 1 - 1e-3, 1 - 1e-4, 1 - 1e-5, 1 - 1e-6};
    double residual_tol = 1e-10;
    std::size_t stable_tail = 3;
};

/**
 * Policy iteration at each discount factor of the grid, warm-started from the
 * previous one. The policy must be discount-optimal at every grid point and
 * identical on the last `stable_tail` points; otherwise NumericalError.
 */
std::vector<std::size_t> blackwell_optimal(const AverageMdp& avg, const BlackwellOptions& options = {});

/// Normalized discounted values (1 - beta) * sum beta^(t-1) u'_t of a policy.
std::vector<double> discounted_policy_values(const AverageMdp& avg, const std::vector<std::size_t>& policy,
                                             double beta);

struct OvertakingWitness {
    std::size_t start = 0;
    /// Actions (source action indices) for periods 1..H-1; the candidate is followed afterwards.
    std::vector<std::size_t> actions;
    std::size_t strict_period = 0;
};

struct PathCheck {
    bool passed = true;
    std::optional<OvertakingWitness> witness;
    std::size_t nodes = 0;
    std::size_t complete_paths = 0;
    /// max |survival - exp(-+ payoff sum)| over every visited prefix.
    double transform_error = 0.0;
    double eq_tol = 0.0;
};

struct PathCheckOptions {
    std::size_t node_cap = 1'000'000;
    double eq_tol = 1e-10;
};

/**
 * Surrogate of "not weakly overtaken by any pure strategy". Enumerates every
 * pure action prefix of periods 1..H-1 from every non-target state, continued
 * by the candidate. A continuation is a witness when it is never worse from
 * window_start on and strictly better infinitely often; after period H both
 * runs are eventually periodic, so the infinite tail is decided exactly.
 * Prefixes that fall behind inside [window_start, H] are pruned.
 */
PathCheck not_weakly_overtaken_check(const Mdp& mdp, const StationaryStrategy& candidate, std::size_t horizon,
                                     std::size_t window_start, const PathCheckOptions& options = {});

} // namespace overtaking
