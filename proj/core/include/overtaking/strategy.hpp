#pragma once

#include "overtaking/mdp.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace overtaking {

/// Mixed action per state: probabilities over that state's actions (empty at the target).
class StationaryStrategy {
public:
    StationaryStrategy() = default;
    explicit StationaryStrategy(std::vector<std::vector<double>> probabilities);

    /// Pure strategy choosing `choice[s]` at every non-target state (entry at the target ignored).
    static StationaryStrategy pure(const Mdp& mdp, const std::vector<std::size_t>& choice);
    /// Uniform mixed action at every non-target state.
    static StationaryStrategy uniform(const Mdp& mdp);

    std::size_t state_count() const noexcept { return probabilities_.size(); }
    const std::vector<double>& at(std::size_t s) const { return probabilities_.at(s); }
    double prob(std::size_t s, std::size_t a) const { return probabilities_[s][a]; }

    bool is_pure() const;
    /// Action index if the mixed action at `s` is degenerate.
    std::optional<std::size_t> pure_action(std::size_t s) const;

    friend bool operator==(const StationaryStrategy&, const StationaryStrategy&) = default;

private:
    std::vector<std::vector<double>> probabilities_;
};

/// Throws ModelError unless `sigma` is a well-formed strategy for `mdp`.
void check_strategy(const Mdp& mdp, const StationaryStrategy& sigma);

/// Time-dependent strategy: explicit mixed actions for periods 1..horizon, then a stationary tail.
struct MarkovPlan {
    std::vector<StationaryStrategy> rows;
    StationaryStrategy tail;

    std::size_t horizon() const noexcept { return rows.size(); }
    /// Strategy used at `period` (1-based).
    const StationaryStrategy& at_period(std::size_t period) const;

    static MarkovPlan stationary(StationaryStrategy sigma) { return {{}, std::move(sigma)}; }
};

void check_plan(const Mdp& mdp, const MarkovPlan& plan);

/// Row-stochastic matrix induced by a stationary strategy; the target row is a unit self-loop.
struct TransitionMatrix {
    Eigen::MatrixXd p;
    std::size_t target = 0;
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Pure stationary strategies in lexicographic order (first non-target state most significant).
std::vector<StationaryStrategy> enumerate_pure_stationary(const Mdp& mdp,
                                                          std::size_t cap = kDefaultEnumerationCap);

/// Number of pure stationary strategies, saturating at SIZE_MAX.
std::size_t pure_stationary_count(const Mdp& mdp);

TransitionMatrix induced_matrix(const Mdp& mdp, const StationaryStrategy& sigma);

/// Stationary strategy from one mixed action per non-target state, keyed by state and action names.
StationaryStrategy stationary_from_first_actions(
    const Mdp& mdp, const std::map<std::string, std::map<std::string, double>>& per_state);

/// "x=a;y=c" for pure strategies, "x=a:0.5|b:0.5;..." otherwise.
std::string action_profile(const Mdp& mdp, const StationaryStrategy& sigma);

} // namespace overtaking
