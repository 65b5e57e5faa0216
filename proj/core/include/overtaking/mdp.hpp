#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace overtaking {

enum class Objective { Reach, Safety };

std::string_view to_string(Objective objective);
Objective objective_from_string(std::string_view text);

/// Tolerance on transition row sums accepted on input.
inline constexpr double kRowSumTolerance = 1e-12;

/// Probability vector over all states of a model, indexed by state.
using Distribution = std::vector<double>;

/**
 * Finite MDP with a distinguished target state.
 *
 * States and actions are identified by strings; their indices follow declaration
 * order. The target state carries no actions. The constructor checks only that
 * the containers have consistent shapes; numerical well-formedness (row sums,
 * nonnegativity, nonempty action sets) is reported by validate().
 */
class Mdp {
public:
    Mdp(std::vector<std::string> states, std::size_t target, Objective objective,
        std::vector<std::vector<std::string>> actions,
        std::vector<std::vector<Distribution>> kernel);

    std::size_t state_count() const noexcept { return states_.size(); }
    std::size_t target() const noexcept { return target_; }
    Objective objective() const noexcept { return objective_; }
    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::string& state_name(std::size_t s) const { return states_.at(s); }

    const std::vector<std::string>& actions(std::size_t s) const { return actions_.at(s); }
    std::size_t action_count(std::size_t s) const { return actions_.at(s).size(); }
    const Distribution& row(std::size_t s, std::size_t a) const { return kernel_.at(s).at(a); }
    double prob(std::size_t s, std::size_t a, std::size_t z) const { return kernel_[s][a][z]; }

    /// Index of a state; throws ModelError naming the missing identifier.
    std::size_t state_index(std::string_view name) const;
    std::optional<std::size_t> find_state(std::string_view name) const;
    /// Index of an action at state `s`; throws ModelError when absent.
    std::size_t action_index(std::size_t s, std::string_view name) const;

    /// Non-target state indices in declaration order.
    std::vector<std::size_t> non_target_states() const;

    /// Same model with a different objective flag.
    Mdp with_objective(Objective objective) const;

    friend bool operator==(const Mdp&, const Mdp&) = default;

private:
    std::vector<std::string> states_;
    std::size_t target_;
    Objective objective_;
    std::vector<std::vector<std::string>> actions_;
    std::vector<std::vector<Distribution>> kernel_;
};

/// Incremental construction by name; used by the example builders and tests.
class MdpBuilder {
public:
    MdpBuilder(std::vector<std::string> states, std::string target,
               Objective objective = Objective::Reach);

    /// Adds action `action` at `state` with the given sparse successor distribution.
    MdpBuilder& action(const std::string& state, const std::string& action,
                       const std::vector<std::pair<std::string, double>>& successors);

    Mdp build() const;

private:
    std::vector<std::string> states_;
    std::size_t target_;
    Objective objective_;
    std::vector<std::vector<std::string>> actions_;
    std::vector<std::vector<Distribution>> kernel_;
};

struct ValidationIssue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
    /// Every action splits its mass between the target and at most one other state.
    bool determinism = false;
    /// Every action puts strictly positive mass on every non-target state.
    bool positivity = false;
};

ValidationReport validate(const Mdp& mdp);

/// Divides every row by its sum. Rows must already be within kRowSumTolerance of 1.
Mdp renormalize_rows(const Mdp& mdp);

/**
 * Removes trivial structure around the target, to a fixed point.
 *
 * Reach: a state with an action that jumps to the target with probability 1 is
 * deleted and mass flowing into it is redirected to the target. Safety: such
 * actions are deleted, and states left without actions are deleted with their
 * inbound mass redirected to the target. Throws ModelError if no non-target
 * state survives.
 */
Mdp normalize(const Mdp& mdp);

/**
 * Reach MDP on states "s1".."sn" with target "sn". Every (state, action) row is an
 * independent symmetric Dirichlet(concentration) draw over all n states, so all
 * entries are strictly positive. Fully determined by `seed`.
 */
Mdp sample_generic(std::size_t n_states, std::size_t actions_per_state, std::uint64_t seed,
                   double concentration = 1.0);

/**
 * Deterministic Reach MDP on states "s1".."sn" (target "sn"): every action moves to
 * one uniformly chosen non-target state with probability 1 - p and to the target
 * with probability p, p uniform in [min_target_mass, max_target_mass].
 */
Mdp sample_deterministic(std::size_t n_states, std::size_t actions_per_state, std::uint64_t seed,
                         double min_target_mass = 0.05, double max_target_mass = 0.6);

} // namespace overtaking
