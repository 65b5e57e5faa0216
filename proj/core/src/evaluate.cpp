#include "overtaking/evaluate.hpp"

#include "overtaking/det_blackwell.hpp"
#include "overtaking/detail/graph.hpp"
#include "overtaking/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace overtaking {

ReachCurve::ReachCurve(std::size_t initial, std::vector<long double> log_survival)
    : initial_(initial), log_survival_(std::move(log_survival)) {}

std::vector<double> ReachCurve::values() const {
    std::vector<double> out(log_survival_.size());
    for (std::size_t t = 1; t <= log_survival_.size(); ++t) out[t - 1] = value(t);
    return out;
}

namespace {

using LongMatrix = std::vector<std::vector<long double>>;

// Non-target block of the induced matrix, in extended precision.
LongMatrix reduced_long(const Mdp& mdp, const StationaryStrategy& sigma) {
    check_strategy(mdp, sigma);
    const std::size_t n = mdp.state_count();
    LongMatrix m(n, std::vector<long double>(n, 0.0L));
    for (std::size_t s : mdp.non_target_states())
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) {
            const long double w = sigma.prob(s, a);
            if (w == 0.0L) continue;
            for (std::size_t z = 0; z < n; ++z)
                if (z != mdp.target()) m[s][z] += w * static_cast<long double>(mdp.prob(s, a, z));
        }
    return m;
}

void check_start(const Mdp& mdp, std::size_t s0, std::size_t horizon) {
    if (s0 >= mdp.state_count()) throw ModelError("initial state index out of range");
    if (s0 == mdp.target()) throw ModelError("initial state must differ from the target");
    if (horizon < 1) throw ModelError("horizon must be at least 1");
}

// Keeps the sub-distribution renormalized and accumulates the log of the scale.
template <typename StepFor>
ReachCurve propagate(const Mdp& mdp, std::size_t s0, std::size_t horizon, StepFor&& matrix_for_period) {
    const std::size_t n = mdp.state_count();
    std::vector<long double> dist(n, 0.0L), next(n);
    dist[s0] = 1.0L;
    std::vector<long double> log_survival;
    log_survival.reserve(horizon);
    log_survival.push_back(0.0L);
    long double log_scale = 0.0L;
    for (std::size_t period = 1; period < horizon; ++period) {
        const LongMatrix& m = matrix_for_period(period);
        std::fill(next.begin(), next.end(), 0.0L);
        for (std::size_t s = 0; s < n; ++s) {
            if (dist[s] == 0.0L) continue;
            for (std::size_t z = 0; z < n; ++z) next[z] += dist[s] * m[s][z];
        }
        long double total = 0.0L;
        for (long double x : next) total += x;
        if (total > 1.0L) total = 1.0L;
        if (total > 0.0L) {
            log_scale += std::log(total);
            for (auto& x : next) x /= total;
        } else {
            log_scale = -std::numeric_limits<long double>::infinity();
        }
        dist.swap(next);
        log_survival.push_back(log_scale);
    }
    return ReachCurve(s0, std::move(log_survival));
}

} // namespace

ReachCurve reach_curve(const Mdp& mdp, const StationaryStrategy& sigma, std::size_t s0, std::size_t horizon) {
    check_start(mdp, s0, horizon);
    const LongMatrix m = reduced_long(mdp, sigma);
    return propagate(mdp, s0, horizon, [&](std::size_t) -> const LongMatrix& { return m; });
}

ReachCurve reach_curve(const Mdp& mdp, const MarkovPlan& plan, std::size_t s0, std::size_t horizon) {
    check_start(mdp, s0, horizon);
    std::vector<LongMatrix> rows;
    rows.reserve(plan.rows.size());
    for (const auto& row : plan.rows) rows.push_back(reduced_long(mdp, row));
    const LongMatrix tail = reduced_long(mdp, plan.tail);
    return propagate(mdp, s0, horizon, [&](std::size_t period) -> const LongMatrix& {
        return period <= rows.size() ? rows[period - 1] : tail;
    });
}

namespace {

// Non-target states from which the target is reachable in the support graph of sigma.
std::vector<std::size_t> live_states(const Mdp& mdp, const TransitionMatrix& t) {
    const auto reach = detail::can_reach(detail::support_graph(t.p), {t.target});
    std::vector<std::size_t> live;
    for (std::size_t s : mdp.non_target_states())
        if (reach[s]) live.push_back(s);
    return live;
}

Eigen::MatrixXd block(const Eigen::MatrixXd& p, const std::vector<std::size_t>& idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd b(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            b(i, j) = p(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
    return b;
}

} // namespace

std::vector<double> hitting_probabilities(const Mdp& mdp, const StationaryStrategy& sigma, bool* pruned) {
    const TransitionMatrix t = induced_matrix(mdp, sigma);
    const auto live = live_states(mdp, t);
    if (pruned) *pruned = live.size() + 1 < mdp.state_count();

    std::vector<double> out(mdp.state_count(), 0.0);
    out[mdp.target()] = 1.0;
    if (live.empty()) return out;

    const auto k = static_cast<Eigen::Index>(live.size());
    const Eigen::MatrixXd a = block(t.p, live);
    Eigen::VectorXd b(k);
    for (Eigen::Index i = 0; i < k; ++i)
        b(i) = t.p(static_cast<Eigen::Index>(live[i]), static_cast<Eigen::Index>(t.target));
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(k, k) - a;
    Eigen::VectorXd x = lhs.partialPivLu().solve(b);
    // one refinement step
    x += lhs.partialPivLu().solve(b - lhs * x);
    for (Eigen::Index i = 0; i < k; ++i) out[live[i]] = std::clamp(x(i), 0.0, 1.0);
    return out;
}

HittingProbability hitting_probability(const Mdp& mdp, const StationaryStrategy& sigma, std::size_t s0) {
    check_start(mdp, s0, 1);
    bool pruned = false;
    const auto all = hitting_probabilities(mdp, sigma, &pruned);
    return {all[s0], pruned};
}

double expected_hitting_time(const Mdp& mdp, const StationaryStrategy& sigma, std::size_t s0) {
    check_start(mdp, s0, 1);
    const auto prob = hitting_probabilities(mdp, sigma);
    if (prob[s0] < 1.0 - kSureHitTolerance) return std::numeric_limits<double>::infinity();

    std::vector<std::size_t> sure;
    for (std::size_t s : mdp.non_target_states())
        if (prob[s] >= 1.0 - kSureHitTolerance) sure.push_back(s);
    const TransitionMatrix t = induced_matrix(mdp, sigma);
    const auto k = static_cast<Eigen::Index>(sure.size());
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(k, k) - block(t.p, sure);
    const Eigen::VectorXd h = lhs.partialPivLu().solve(Eigen::VectorXd::Ones(k));
    const auto pos = std::find(sure.begin(), sure.end(), s0) - sure.begin();
    return h(pos);
}

double discounted_value(const Mdp& mdp, const StationaryStrategy& sigma, double beta, std::size_t s0) {
    check_start(mdp, s0, 1);
    if (!(beta > 0.0 && beta < 1.0)) throw ModelError("discount factor must lie in (0, 1)");
    const TransitionMatrix t = induced_matrix(mdp, sigma);
    const auto states = mdp.non_target_states();
    const auto k = static_cast<Eigen::Index>(states.size());
    Eigen::VectorXd b(k);
    for (Eigen::Index i = 0; i < k; ++i)
        b(i) = beta * t.p(static_cast<Eigen::Index>(states[i]), static_cast<Eigen::Index>(t.target));
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(k, k) - beta * block(t.p, states);
    const Eigen::VectorXd v = lhs.partialPivLu().solve(b);
    const auto pos = std::find(states.begin(), states.end(), s0) - states.begin();
    return v(pos);
}

std::vector<double> avg_prefix_payoffs(const AverageMdp& avg, const std::vector<PathStep>& path, std::size_t steps) {
    if (steps > path.size()) throw ModelError("path is shorter than the requested number of steps");
    std::vector<double> out;
    out.reserve(steps);
    double sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& [s, a] = path[k];
        if (s >= avg.state_count() || a >= avg.actions[s].size())
            throw ModelError("path step " + std::to_string(k + 1) + " names an unknown state or action");
        if (k > 0) {
            const auto& prev = path[k - 1];
            if (avg.successor[prev.state][prev.action] != s)
                throw ModelError("path step " + std::to_string(k + 1) + " does not follow the deterministic successor");
        }
        sum += avg.payoff[s][a];
        out.push_back(sum / static_cast<double>(k + 1));
    }
    return out;
}

std::string_view to_string(VerdictKind kind) {
    switch (kind) {
    case VerdictKind::Overtakes: return "overtakes";
    case VerdictKind::Overtaken: return "overtaken";
    case VerdictKind::WeaklyOvertakes: return "weakly_overtakes";
    case VerdictKind::WeaklyOvertaken: return "weakly_overtaken";
    case VerdictKind::EqualOnWindow: return "equal_on_window";
    case VerdictKind::Incomparable: return "incomparable";
    }
    return "unknown";
}

double relative_advantage(const ReachCurve& a, const ReachCurve& b, std::size_t t, Objective objective) {
    const long double la = a.log_survival(t);
    const long double lb = b.log_survival(t);
    long double d = 0.0L;
    // (s_b - s_a) / max(s_a, s_b), without forming either survival
    if (la != lb) d = lb > la ? -std::expm1(la - lb) : std::expm1(lb - la);
    return static_cast<double>(objective == Objective::Reach ? d : -d);
}

Verdict compare(const ReachCurve& a, const ReachCurve& b, Window window, Objective objective, double eq_tol) {
    if (a.initial() != b.initial()) throw ModelError("compared curves start from different states");
    if (window.first < 1 || window.first > window.last) throw ModelError("comparison window is empty");
    if (window.last > a.horizon() || window.last > b.horizon())
        throw ModelError("comparison window exceeds the curve horizon");
    if (!(eq_tol >= 0.0)) throw ModelError("equality tolerance must be nonnegative");

    Verdict v{VerdictKind::Incomparable, window, eq_tol,
              std::max<std::size_t>(1, (window.last - window.first + 9) / 10), {}, {}};
    for (std::size_t t = window.first; t <= window.last; ++t) {
        const double d = relative_advantage(a, b, t, objective);
        if (d > eq_tol) v.first_ahead.push_back(t);
        else if (d < -eq_tol) v.second_ahead.push_back(t);
    }
    const std::size_t len = window.last - window.first + 1;
    if (v.first_ahead.size() == len) v.kind = VerdictKind::Overtakes;
    else if (v.second_ahead.size() == len) v.kind = VerdictKind::Overtaken;
    else if (v.first_ahead.empty() && v.second_ahead.empty()) v.kind = VerdictKind::EqualOnWindow;
    else if (v.second_ahead.empty() && v.first_ahead.size() >= v.strict_needed) v.kind = VerdictKind::WeaklyOvertakes;
    else if (v.first_ahead.empty() && v.second_ahead.size() >= v.strict_needed) v.kind = VerdictKind::WeaklyOvertaken;
    return v;
}

} // namespace overtaking
