#include "overtaking/strategy.hpp"

#include "overtaking/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace overtaking {

StationaryStrategy::StationaryStrategy(std::vector<std::vector<double>> probabilities)
    : probabilities_(std::move(probabilities)) {}

StationaryStrategy StationaryStrategy::pure(const Mdp& mdp, const std::vector<std::size_t>& choice) {
    if (choice.size() != mdp.state_count()) throw ModelError("pure strategy needs one choice per state");
    std::vector<std::vector<double>> probs(mdp.state_count());
    for (std::size_t s : mdp.non_target_states()) {
        if (choice[s] >= mdp.action_count(s))
            throw ModelError("state '" + mdp.state_name(s) + "': action index out of range");
        probs[s].assign(mdp.action_count(s), 0.0);
        probs[s][choice[s]] = 1.0;
    }
    return StationaryStrategy(std::move(probs));
}

StationaryStrategy StationaryStrategy::uniform(const Mdp& mdp) {
    std::vector<std::vector<double>> probs(mdp.state_count());
    for (std::size_t s : mdp.non_target_states()) {
        const auto k = mdp.action_count(s);
        probs[s].assign(k, 1.0 / static_cast<double>(k));
    }
    return StationaryStrategy(std::move(probs));
}

bool StationaryStrategy::is_pure() const {
    for (std::size_t s = 0; s < probabilities_.size(); ++s)
        if (!probabilities_[s].empty() && !pure_action(s)) return false;
    return true;
}

std::optional<std::size_t> StationaryStrategy::pure_action(std::size_t s) const {
    const auto& row = probabilities_.at(s);
    std::optional<std::size_t> found;
    for (std::size_t a = 0; a < row.size(); ++a) {
        if (row[a] == 1.0) found = a;
        else if (row[a] != 0.0) return std::nullopt;
    }
    return found;
}

void check_strategy(const Mdp& mdp, const StationaryStrategy& sigma) {
    if (sigma.state_count() != mdp.state_count())
        throw ModelError("strategy covers " + std::to_string(sigma.state_count()) + " states, model has " +
                         std::to_string(mdp.state_count()));
    for (std::size_t s : mdp.non_target_states()) {
        const auto& row = sigma.at(s);
        if (row.size() != mdp.action_count(s))
            throw ModelError("strategy at state '" + mdp.state_name(s) + "' does not match its action set");
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw ModelError("strategy at state '" + mdp.state_name(s) + "' has an invalid probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw ModelError("strategy at state '" + mdp.state_name(s) + "' does not sum to 1");
    }
}

const StationaryStrategy& MarkovPlan::at_period(std::size_t period) const {
    if (period >= 1 && period <= rows.size()) return rows[period - 1];
    return tail;
}

void check_plan(const Mdp& mdp, const MarkovPlan& plan) {
    for (const auto& row : plan.rows) check_strategy(mdp, row);
    check_strategy(mdp, plan.tail);
}

std::size_t pure_stationary_count(const Mdp& mdp) {
    std::size_t count = 1;
    for (std::size_t s : mdp.non_target_states()) {
        const std::size_t k = mdp.action_count(s);
        if (k != 0 && count > std::numeric_limits<std::size_t>::max() / k)
            return std::numeric_limits<std::size_t>::max();
        count *= k;
    }
    return count;
}

std::vector<StationaryStrategy> enumerate_pure_stationary(const Mdp& mdp, std::size_t cap) {
    const std::size_t count = pure_stationary_count(mdp);
    if (count > cap)
        throw CapExceeded("model has " + (count == std::numeric_limits<std::size_t>::max()
                                              ? std::string("more than 2^64")
                                              : std::to_string(count)) +
                          " pure stationary strategies, cap is " + std::to_string(cap));
    const auto states = mdp.non_target_states();
    std::vector<std::size_t> choice(mdp.state_count(), 0);
    std::vector<StationaryStrategy> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(StationaryStrategy::pure(mdp, choice));
        // odometer: the last state varies fastest
        for (auto it = states.rbegin(); it != states.rend(); ++it) {
            if (++choice[*it] < mdp.action_count(*it)) break;
            choice[*it] = 0;
        }
    }
    return out;
}

TransitionMatrix induced_matrix(const Mdp& mdp, const StationaryStrategy& sigma) {
    check_strategy(mdp, sigma);
    const auto n = static_cast<Eigen::Index>(mdp.state_count());
    TransitionMatrix m{Eigen::MatrixXd::Zero(n, n), mdp.target()};
    for (std::size_t s : mdp.non_target_states()) {
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) {
            const double w = sigma.prob(s, a);
            if (w == 0.0) continue;
            const auto& row = mdp.row(s, a);
            for (Eigen::Index z = 0; z < n; ++z) m.p(static_cast<Eigen::Index>(s), z) += w * row[z];
        }
    }
    const auto t = static_cast<Eigen::Index>(mdp.target());
    m.p(t, t) = 1.0;
    return m;
}

StationaryStrategy stationary_from_first_actions(
    const Mdp& mdp, const std::map<std::string, std::map<std::string, double>>& per_state) {
    std::vector<std::vector<double>> probs(mdp.state_count());
    for (const auto& entry : per_state)
        if (mdp.state_index(entry.first) == mdp.target())
            throw ModelError("the target state '" + entry.first + "' takes no action");
    for (std::size_t s : mdp.non_target_states()) {
        auto it = per_state.find(mdp.state_name(s));
        if (it == per_state.end())
            throw ModelError("no mixed action given for state '" + mdp.state_name(s) + "'");
        probs[s].assign(mdp.action_count(s), 0.0);
        for (const auto& [action, p] : it->second) probs[s][mdp.action_index(s, action)] = p;
    }
    StationaryStrategy sigma(std::move(probs));
    check_strategy(mdp, sigma);
    return sigma;
}

std::string action_profile(const Mdp& mdp, const StationaryStrategy& sigma) {
    std::ostringstream out;
    out.precision(17);
    bool first = true;
    for (std::size_t s : mdp.non_target_states()) {
        if (!first) out << ';';
        first = false;
        out << mdp.state_name(s) << '=';
        if (auto a = sigma.pure_action(s)) {
            out << mdp.actions(s)[*a];
            continue;
        }
        bool first_action = true;
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) {
            if (sigma.prob(s, a) == 0.0) continue;
            if (!first_action) out << '|';
            first_action = false;
            out << mdp.actions(s)[a] << ':' << sigma.prob(s, a);
        }
    }
    return out.str();
}

} // namespace overtaking
