#pragma once

#include "overtaking/mdp.hpp"
#include "overtaking/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace testing_helpers {

// Pure strategy from state -> action names; unspecified states take their first action.
inline overtaking::StationaryStrategy pure(const overtaking::Mdp& mdp, const std::map<std::string, std::string>& pick) {
    std::vector<std::size_t> choice(mdp.state_count(), 0);
    for (const auto& [state, action] : pick) {
        const auto s = mdp.state_index(state);
        choice[s] = mdp.action_index(s, action);
    }
    return overtaking::StationaryStrategy::pure(mdp, choice);
}

// Largest entry difference between kernels of identical shape; infinity when the shapes differ.
inline double max_kernel_gap(const overtaking::Mdp& x, const overtaking::Mdp& y) {
    if (x.states() != y.states() || x.target() != y.target() || x.objective() != y.objective())
        return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (std::size_t s = 0; s < x.state_count(); ++s) {
        if (x.actions(s) != y.actions(s)) return std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < x.action_count(s); ++a)
            for (std::size_t z = 0; z < x.state_count(); ++z)
                gap = std::max(gap, std::abs(x.row(s, a)[z] - y.row(s, a)[z]));
    }
    return gap;
}

} // namespace testing_helpers
