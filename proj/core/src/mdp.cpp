#include "overtaking/mdp.hpp"

#include "overtaking/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace overtaking {

std::string_view to_string(Objective objective) {
    return objective == Objective::Reach ? "reach" : "safety";
}

Objective objective_from_string(std::string_view text) {
    if (text == "reach") return Objective::Reach;
    if (text == "safety") return Objective::Safety;
    throw ModelError("unknown objective '" + std::string(text) + "' (expected reach or safety)");
}

Mdp::Mdp(std::vector<std::string> states, std::size_t target, Objective objective,
         std::vector<std::vector<std::string>> actions, std::vector<std::vector<Distribution>> kernel)
    : states_(std::move(states)), target_(target), objective_(objective), actions_(std::move(actions)),
      kernel_(std::move(kernel)) {
    const std::size_t n = states_.size();
    if (n == 0) throw ModelError("an MDP needs at least one state");
    if (target_ >= n) throw ModelError("target index out of range");
    if (actions_.size() != n || kernel_.size() != n)
        throw ModelError("action and kernel tables must have one entry per state");
    for (std::size_t s = 0; s < n; ++s) {
        if (kernel_[s].size() != actions_[s].size())
            throw ModelError("state '" + states_[s] + "': one transition row per action required");
        for (const auto& row : kernel_[s])
            if (row.size() != n)
                throw ModelError("state '" + states_[s] + "': transition row must cover every state");
    }
}

std::optional<std::size_t> Mdp::find_state(std::string_view name) const {
    auto it = std::find(states_.begin(), states_.end(), name);
    if (it == states_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
}

std::size_t Mdp::state_index(std::string_view name) const {
    if (auto s = find_state(name)) return *s;
    throw ModelError("unknown state '" + std::string(name) + "'");
}

std::size_t Mdp::action_index(std::size_t s, std::string_view name) const {
    const auto& acts = actions_.at(s);
    auto it = std::find(acts.begin(), acts.end(), name);
    if (it == acts.end())
        throw ModelError("state '" + states_[s] + "' has no action '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - acts.begin());
}

std::vector<std::size_t> Mdp::non_target_states() const {
    std::vector<std::size_t> out;
    out.reserve(states_.size());
    for (std::size_t s = 0; s < states_.size(); ++s)
        if (s != target_) out.push_back(s);
    return out;
}

Mdp Mdp::with_objective(Objective objective) const {
    Mdp copy = *this;
    copy.objective_ = objective;
    return copy;
}

MdpBuilder::MdpBuilder(std::vector<std::string> states, std::string target, Objective objective)
    : states_(std::move(states)), objective_(objective) {
    auto it = std::find(states_.begin(), states_.end(), target);
    if (it == states_.end()) throw ModelError("target '" + target + "' is not a declared state");
    target_ = static_cast<std::size_t>(it - states_.begin());
    actions_.resize(states_.size());
    kernel_.resize(states_.size());
}

MdpBuilder& MdpBuilder::action(const std::string& state, const std::string& action,
                               const std::vector<std::pair<std::string, double>>& successors) {
    auto index = [&](const std::string& name) {
        auto it = std::find(states_.begin(), states_.end(), name);
        if (it == states_.end()) throw ModelError("unknown state '" + name + "'");
        return static_cast<std::size_t>(it - states_.begin());
    };
    const std::size_t s = index(state);
    Distribution row(states_.size(), 0.0);
    for (const auto& [to, p] : successors) row[index(to)] += p;
    actions_[s].push_back(action);
    kernel_[s].push_back(std::move(row));
    return *this;
}

Mdp MdpBuilder::build() const { return Mdp(states_, target_, objective_, actions_, kernel_); }

namespace {

std::string pointer_token(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

} // namespace

ValidationReport validate(const Mdp& mdp) {
    ValidationReport report;
    auto issue = [&](std::string location, std::string message) {
        report.issues.push_back({std::move(location), std::move(message)});
    };

    const std::size_t n = mdp.state_count();
    const std::size_t target = mdp.target();
    std::set<std::string> seen;
    for (const auto& name : mdp.states())
        if (!seen.insert(name).second) issue("/states", "duplicate state '" + name + "'");

    if (!mdp.actions(target).empty())
        issue("/kernel/" + pointer_token(mdp.state_name(target)), "target state must not have actions");

    bool deterministic = true;
    bool positive = true;
    for (std::size_t s : mdp.non_target_states()) {
        const std::string loc = "/kernel/" + pointer_token(mdp.state_name(s));
        if (mdp.action_count(s) == 0) issue(loc, "state has no actions");
        std::set<std::string> names;
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) {
            const std::string aloc = loc + "/" + pointer_token(mdp.actions(s)[a]);
            if (!names.insert(mdp.actions(s)[a]).second) issue(aloc, "duplicate action name");
            const auto& row = mdp.row(s, a);
            double sum = 0.0;
            std::size_t support = 0;
            bool row_ok = true;
            for (std::size_t z = 0; z < n; ++z) {
                const double p = row[z];
                if (!std::isfinite(p)) {
                    issue(aloc + "/" + pointer_token(mdp.state_name(z)), "probability is not finite");
                    row_ok = false;
                    continue;
                }
                if (p < 0.0) {
                    issue(aloc + "/" + pointer_token(mdp.state_name(z)), "probability is negative");
                    row_ok = false;
                }
                sum += p;
                if (z != target) {
                    if (p > 0.0) ++support;
                    else positive = false;
                }
            }
            if (row_ok && std::abs(sum - 1.0) > kRowSumTolerance)
                issue(aloc, "row sums to " + std::to_string(sum) + ", expected 1");
            if (support > 1) deterministic = false;
        }
    }
    if (n < 2) issue("/states", "need at least one non-target state");

    report.ok = report.issues.empty();
    report.determinism = deterministic;
    report.positivity = positive && n >= 2;
    return report;
}

Mdp renormalize_rows(const Mdp& mdp) {
    std::vector<std::vector<Distribution>> kernel(mdp.state_count());
    std::vector<std::vector<std::string>> actions(mdp.state_count());
    for (std::size_t s = 0; s < mdp.state_count(); ++s) {
        actions[s] = mdp.actions(s);
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) {
            Distribution row = mdp.row(s, a);
            const double sum = std::accumulate(row.begin(), row.end(), 0.0);
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                throw ModelError("state '" + mdp.state_name(s) + "', action '" + actions[s][a] +
                                 "': row sum outside tolerance");
            for (double& p : row) p /= sum;
            kernel[s].push_back(std::move(row));
        }
    }
    return Mdp(mdp.states(), mdp.target(), mdp.objective(), std::move(actions), std::move(kernel));
}

namespace {

bool jumps_to_target(const Distribution& row, std::size_t target) {
    return row[target] >= 1.0 - kRowSumTolerance;
}

// Working copy used by normalize(); indices refer to the original model.
struct Draft {
    std::vector<bool> alive;
    std::vector<std::vector<std::size_t>> kept_actions;
};

} // namespace

Mdp normalize(const Mdp& mdp) {
    const std::size_t n = mdp.state_count();
    const std::size_t target = mdp.target();
    Draft draft{std::vector<bool>(n, true), std::vector<std::vector<std::size_t>>(n)};
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) draft.kept_actions[s].push_back(a);
    draft.kept_actions[target].clear();

    // Redirected rows: mass into deleted states flows to the target.
    auto effective_row = [&](std::size_t s, std::size_t a) {
        Distribution row = mdp.row(s, a);
        for (std::size_t z = 0; z < n; ++z) {
            if (z != target && !draft.alive[z]) {
                row[target] += row[z];
                row[z] = 0.0;
            }
        }
        return row;
    };

    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (s == target || !draft.alive[s]) continue;
            auto& acts = draft.kept_actions[s];
            if (mdp.objective() == Objective::Reach) {
                bool jump = std::any_of(acts.begin(), acts.end(), [&](std::size_t a) {
                    return jumps_to_target(effective_row(s, a), target);
                });
                if (jump) {
                    draft.alive[s] = false;
                    changed = true;
                }
            } else {
                auto removed = std::remove_if(acts.begin(), acts.end(), [&](std::size_t a) {
                    return jumps_to_target(effective_row(s, a), target);
                });
                if (removed != acts.end()) {
                    acts.erase(removed, acts.end());
                    changed = true;
                }
                if (acts.empty()) {
                    draft.alive[s] = false;
                    changed = true;
                }
            }
        }
    }

    std::vector<std::size_t> keep;
    for (std::size_t s = 0; s < n; ++s)
        if (draft.alive[s]) keep.push_back(s);
    if (keep.size() < 2)
        throw ModelError("normalization removed every non-target state: all states are forced to the target");

    std::vector<std::string> states;
    std::vector<std::vector<std::string>> actions;
    std::vector<std::vector<Distribution>> kernel;
    std::size_t new_target = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const std::size_t s = keep[i];
        states.push_back(mdp.state_name(s));
        if (s == target) new_target = i;
        actions.emplace_back();
        kernel.emplace_back();
        if (s == target) continue;
        for (std::size_t a : draft.kept_actions[s]) {
            const Distribution full = effective_row(s, a);
            Distribution row(keep.size(), 0.0);
            for (std::size_t j = 0; j < keep.size(); ++j) row[j] = full[keep[j]];
            actions.back().push_back(mdp.actions(s)[a]);
            kernel.back().push_back(std::move(row));
        }
    }
    return Mdp(std::move(states), new_target, mdp.objective(), std::move(actions), std::move(kernel));
}

namespace {

std::vector<std::string> numbered_states(std::size_t n) {
    std::vector<std::string> states;
    for (std::size_t i = 1; i <= n; ++i) states.push_back("s" + std::to_string(i));
    return states;
}

std::vector<std::string> numbered_actions(std::size_t k) {
    std::vector<std::string> actions;
    for (std::size_t i = 1; i <= k; ++i) actions.push_back("a" + std::to_string(i));
    return actions;
}

} // namespace

Mdp sample_generic(std::size_t n_states, std::size_t actions_per_state, std::uint64_t seed,
                   double concentration) {
    if (n_states < 2) throw ModelError("sample_generic needs at least 2 states");
    if (actions_per_state < 1) throw ModelError("sample_generic needs at least 1 action per state");
    if (!(concentration > 0.0)) throw ModelError("Dirichlet concentration must be positive");

    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(concentration, 1.0);
    const std::size_t target = n_states - 1;

    std::vector<std::vector<std::string>> actions(n_states);
    std::vector<std::vector<Distribution>> kernel(n_states);
    for (std::size_t s = 0; s < target; ++s) {
        actions[s] = numbered_actions(actions_per_state);
        for (std::size_t a = 0; a < actions_per_state; ++a) {
            Distribution row(n_states);
            double sum = 0.0;
            do {
                for (double& p : row) p = gamma(rng);
                sum = std::accumulate(row.begin(), row.end(), 0.0);
            } while (!(sum > 0.0) || std::any_of(row.begin(), row.end(), [](double p) { return p <= 0.0; }));
            for (double& p : row) p /= sum;
            kernel[s].push_back(std::move(row));
        }
    }
    return Mdp(numbered_states(n_states), target, Objective::Reach, std::move(actions), std::move(kernel));
}

Mdp sample_deterministic(std::size_t n_states, std::size_t actions_per_state, std::uint64_t seed,
                         double min_target_mass, double max_target_mass) {
    if (n_states < 2) throw ModelError("sample_deterministic needs at least 2 states");
    if (actions_per_state < 1) throw ModelError("sample_deterministic needs at least 1 action per state");
    if (!(0.0 < min_target_mass && min_target_mass <= max_target_mass && max_target_mass < 1.0))
        throw ModelError("target mass range must lie inside (0, 1)");

    std::mt19937_64 rng(seed);
    const std::size_t target = n_states - 1;
    std::uniform_int_distribution<std::size_t> successor(0, target - 1);
    std::uniform_real_distribution<double> mass(min_target_mass, max_target_mass);

    std::vector<std::vector<std::string>> actions(n_states);
    std::vector<std::vector<Distribution>> kernel(n_states);
    for (std::size_t s = 0; s < target; ++s) {
        actions[s] = numbered_actions(actions_per_state);
        for (std::size_t a = 0; a < actions_per_state; ++a) {
            Distribution row(n_states, 0.0);
            const double p = mass(rng);
            row[successor(rng)] = 1.0 - p;
            row[target] = p;
            kernel[s].push_back(std::move(row));
        }
    }
    return Mdp(numbered_states(n_states), target, Objective::Reach, std::move(actions), std::move(kernel));
}

} // namespace overtaking
