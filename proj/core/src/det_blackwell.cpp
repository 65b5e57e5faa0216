#include "overtaking/det_blackwell.hpp"

#include "overtaking/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace overtaking {

AverageMdp to_average_mdp(const Mdp& mdp) {
    const ValidationReport report = validate(mdp);
    if (!report.ok) throw ModelError("model does not validate: " + report.issues.front().message);

    AverageMdp avg;
    avg.objective = mdp.objective();
    std::vector<std::size_t> index(mdp.state_count(), 0);
    for (std::size_t s : mdp.non_target_states()) {
        index[s] = avg.states.size();
        avg.states.push_back(mdp.state_name(s));
        avg.source.push_back(s);
    }

    std::string violations;
    for (std::size_t s : mdp.non_target_states()) {
        avg.actions.push_back(mdp.actions(s));
        auto& succ = avg.successor.emplace_back();
        auto& pay = avg.payoff.emplace_back();
        auto& stay = avg.stay.emplace_back();
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) {
            std::optional<std::size_t> next;
            bool deterministic = true;
            for (std::size_t z = 0; z < mdp.state_count(); ++z) {
                if (z == mdp.target() || mdp.prob(s, a, z) <= 0.0) continue;
                if (next) deterministic = false;
                next = z;
            }
            const std::string where = "(" + mdp.state_name(s) + ", " + mdp.actions(s)[a] + ")";
            if (!deterministic) {
                violations += violations.empty() ? where : " " + where;
                succ.push_back(0);
                pay.push_back(0.0);
                stay.push_back(0.0);
                continue;
            }
            if (!next) throw ModelError("action " + where + " reaches the target with probability 1; normalize first");
            const double p = mdp.prob(s, a, *next);
            succ.push_back(index[*next]);
            stay.push_back(p);
            pay.push_back(mdp.objective() == Objective::Reach ? -std::log(p) : std::log(p));
        }
    }
    if (!violations.empty()) throw ModelError("model is not deterministic at " + violations);
    return avg;
}

StationaryStrategy lift_policy(const Mdp& mdp, const AverageMdp& avg, const std::vector<std::size_t>& policy) {
    if (policy.size() != avg.state_count()) throw ModelError("policy needs one action per state");
    std::vector<std::size_t> choice(mdp.state_count(), 0);
    for (std::size_t i = 0; i < avg.state_count(); ++i) choice[avg.source[i]] = policy[i];
    return StationaryStrategy::pure(mdp, choice);
}

std::vector<std::size_t> policy_of(const AverageMdp& avg, const StationaryStrategy& sigma) {
    std::vector<std::size_t> policy;
    for (std::size_t i = 0; i < avg.state_count(); ++i) {
        const auto a = sigma.pure_action(avg.source[i]);
        if (!a) throw ModelError("strategy is not pure at state '" + avg.states[i] + "'");
        policy.push_back(*a);
    }
    return policy;
}

LoopReport loop_report(const AverageMdp& avg, std::size_t state_cap) {
    const std::size_t n = avg.state_count();
    if (n > state_cap)
        throw CapExceeded("loop enumeration limited to " + std::to_string(state_cap) + " states, model has " +
                          std::to_string(n));
    LoopReport report;
    std::vector<LoopStep> path;
    std::vector<bool> on_path(n, false);
    double sum = 0.0;

    // Cycles through `root` whose other states all exceed it.
    auto extend = [&](auto&& self, std::size_t root, std::size_t s) -> void {
        for (std::size_t a = 0; a < avg.actions[s].size(); ++a) {
            const std::size_t z = avg.successor[s][a];
            path.push_back({s, a});
            sum += avg.payoff[s][a];
            if (z == root) {
                report.loops.push_back({path, sum});
            } else if (z > root && !on_path[z]) {
                on_path[z] = true;
                self(self, root, z);
                on_path[z] = false;
            }
            sum -= avg.payoff[s][a];
            path.pop_back();
        }
    };
    for (std::size_t root = 0; root < n; ++root) {
        on_path[root] = true;
        extend(extend, root, root);
        on_path[root] = false;
    }
    for (const auto& loop : report.loops)
        if (loop.phi < 0.0 && (!report.delta || loop.phi > *report.delta)) report.delta = loop.phi;
    return report;
}

std::string loop_label(const AverageMdp& avg, const Loop& loop) {
    std::string out;
    for (const auto& step : loop.steps) {
        if (!out.empty()) out += '|';
        out += avg.states[step.state] + ":" + avg.actions[step.state][step.action];
    }
    return out;
}

namespace {

// Unnormalized values sum beta^(t-1) u'_t of a policy.
Eigen::VectorXd policy_values(const AverageMdp& avg, const std::vector<std::size_t>& policy, double beta) {
    const auto n = static_cast<Eigen::Index>(avg.state_count());
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd u(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const std::size_t a = policy[static_cast<std::size_t>(s)];
        lhs(s, static_cast<Eigen::Index>(avg.successor[s][a])) -= beta;
        u(s) = avg.payoff[s][a];
    }
    return lhs.partialPivLu().solve(u);
}

double q_value(const AverageMdp& avg, const Eigen::VectorXd& v, double beta, std::size_t s, std::size_t a) {
    return avg.payoff[s][a] + beta * v(static_cast<Eigen::Index>(avg.successor[s][a]));
}

constexpr std::size_t kPolicyIterationCap = 10'000;

} // namespace

std::vector<double> discounted_policy_values(const AverageMdp& avg, const std::vector<std::size_t>& policy,
                                             double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw ModelError("discount factor must lie in (0, 1)");
    const Eigen::VectorXd v = policy_values(avg, policy, beta);
    std::vector<double> out(v.size());
    for (Eigen::Index s = 0; s < v.size(); ++s) out[s] = (1.0 - beta) * v(s);
    return out;
}

std::vector<std::size_t> blackwell_optimal(const AverageMdp& avg, const BlackwellOptions& options) {
    if (options.betas.empty()) throw ModelError("discount grid is empty");
    const std::size_t n = avg.state_count();
    std::vector<std::size_t> policy(n, 0);
    std::vector<std::vector<std::size_t>> history;

    for (double beta : options.betas) {
        if (!(beta > 0.0 && beta < 1.0)) throw ModelError("discount factor must lie in (0, 1)");
        Eigen::VectorXd v;
        bool stable = false;
        for (std::size_t it = 0; it < kPolicyIterationCap && !stable; ++it) {
            v = policy_values(avg, policy, beta);
            stable = true;
            for (std::size_t s = 0; s < n; ++s) {
                const double current = q_value(avg, v, beta, s, policy[s]);
                std::size_t best = policy[s];
                double best_q = current;
                for (std::size_t a = 0; a < avg.actions[s].size(); ++a) {
                    const double q = q_value(avg, v, beta, s, a);
                    if (q > best_q + 1e-12 * (1.0 + std::abs(best_q))) {
                        best = a;
                        best_q = q;
                    }
                }
                if (best != policy[s]) {
                    policy[s] = best;
                    stable = false;
                }
            }
        }
        if (!stable) throw NumericalError("policy iteration did not settle at beta = " + std::to_string(beta));

        double residual = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            double best_q = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < avg.actions[s].size(); ++a) best_q = std::max(best_q, q_value(avg, v, beta, s, a));
            residual = std::max(residual, std::abs(best_q - v(static_cast<Eigen::Index>(s))));
        }
        if ((1.0 - beta) * residual > options.residual_tol)
            throw NumericalError("discounted optimality residual " + std::to_string((1.0 - beta) * residual) +
                                 " at beta = " + std::to_string(beta));
        history.push_back(policy);
    }

    const std::size_t tail = std::min(options.stable_tail, history.size());
    for (std::size_t i = history.size() - tail; i < history.size(); ++i)
        if (history[i] != history.back())
            throw NumericalError("discount-optimal policy keeps changing near beta = 1; "
                                 "exact arithmetic is needed to identify the Blackwell policy");
    return policy;
}

namespace {

struct PathSearch {
    const AverageMdp& avg;
    const std::vector<std::size_t>& policy;
    std::size_t horizon;
    std::size_t window_start;
    PathCheckOptions options;
    bool reach;

    // Candidate log-survival after k transitions, k = 0..horizon-1, and its state at period horizon.
    std::vector<long double> cand;
    std::size_t cand_state = 0;
    std::vector<std::size_t> actions;
    PathCheck result;
    std::size_t start = 0;

    static constexpr long double kDriftTol = 1e-12L;

    // Positive when the path is ahead of the candidate.
    long double advantage(long double path_log, long double cand_log) const {
        const long double d = cand_log - path_log;
        return reach ? d : -d;
    }

    void record_transform(long double product, long double payoff_sum) {
        const long double via_payoff = reach ? std::exp(-payoff_sum) : std::exp(payoff_sum);
        const auto err = static_cast<double>(std::abs(product - via_payoff));
        result.transform_error = std::max(result.transform_error, err);
    }

    long double step(std::size_t& s) const {
        const std::size_t a = policy[s];
        const long double l = std::log(static_cast<long double>(avg.stay[s][a]));
        s = avg.successor[s][a];
        return l;
    }

    // Both runs follow the candidate after period H, so the pair of states is
    // eventually periodic and the advantage grows by a fixed drift per cycle.
    void finish(std::size_t s, long double log_surv) {
        ++result.complete_paths;
        const long double tol = options.eq_tol;
        const std::size_t n = avg.state_count();
        std::size_t c = cand_state;
        long double cand_log = cand[horizon - 1];
        std::vector<std::size_t> seen(n * n, 0);
        std::vector<long double> adv{advantage(log_surv, cand_log)};
        std::size_t t = horizon;
        seen[s * n + c] = t;
        for (;;) {
            log_surv += step(s);
            cand_log += step(c);
            ++t;
            adv.push_back(advantage(log_surv, cand_log));
            if (adv.back() < -tol) return;
            if (seen[s * n + c] != 0) break;
            seen[s * n + c] = t;
        }
        const std::size_t j = seen[s * n + c];
        const std::size_t period = t - j;
        const long double drift = adv[t - horizon] - adv[j - horizon];
        std::optional<std::size_t> strict;
        if (drift < -kDriftTol) return;
        if (drift > kDriftTol) {
            // ahead from some cycle on; locate the first strict period for the witness
            for (std::size_t u = j + 1;; ++u) {
                const long double a = adv[(u - j - 1) % period + j + 1 - horizon] +
                                      drift * static_cast<long double>((u - j - 1) / period);
                if (a > tol) {
                    strict = u;
                    break;
                }
            }
        } else {
            for (std::size_t u = j + 1; u <= t && !strict; ++u)
                if (adv[u - horizon] > tol) strict = u;
        }
        if (strict && !result.witness) {
            result.passed = false;
            result.witness = OvertakingWitness{avg.source[start], actions, *strict};
        }
    }

    void dfs(std::size_t s, std::size_t depth, long double log_surv, long double product, long double payoff_sum) {
        if (result.witness) return;
        if (++result.nodes > options.node_cap)
            throw CapExceeded("path enumeration exceeded " + std::to_string(options.node_cap) + " nodes");
        record_transform(product, payoff_sum);
        const std::size_t period = depth + 1;
        if (period >= window_start && advantage(log_surv, cand[depth]) < -options.eq_tol) return;
        if (period == horizon) {
            finish(s, log_surv);
            return;
        }
        for (std::size_t a = 0; a < avg.actions[s].size(); ++a) {
            const long double p = avg.stay[s][a];
            actions.push_back(a);
            dfs(avg.successor[s][a], depth + 1, log_surv + std::log(p), product * p, payoff_sum + avg.payoff[s][a]);
            actions.pop_back();
        }
    }
};

} // namespace

PathCheck not_weakly_overtaken_check(const Mdp& mdp, const StationaryStrategy& candidate, std::size_t horizon,
                                     std::size_t window_start, const PathCheckOptions& options) {
    if (horizon < 2) throw ModelError("path check horizon must be at least 2");
    if (window_start < 1 || window_start > horizon) throw ModelError("window start must lie in [1, H]");
    if (!candidate.is_pure()) throw ModelError("candidate must be a pure stationary strategy");
    const AverageMdp avg = to_average_mdp(mdp);
    const auto policy = policy_of(avg, candidate);

    PathSearch search{avg, policy, horizon, window_start, options, mdp.objective() == Objective::Reach,
                      {}, 0, {}, {}, 0};
    search.result.eq_tol = options.eq_tol;
    for (std::size_t s0 = 0; s0 < avg.state_count() && !search.result.witness; ++s0) {
        search.start = s0;
        search.cand.assign(horizon, 0.0L);
        std::size_t s = s0;
        for (std::size_t k = 1; k < horizon; ++k) search.cand[k] = search.cand[k - 1] + search.step(s);
        search.cand_state = s;
        search.dfs(s0, 0, 0.0L, 1.0L, 0.0L);
    }
    return search.result;
}

} // namespace overtaking
