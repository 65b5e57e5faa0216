#pragma once

#include "overtaking/mdp.hpp"
#include "overtaking/strategy.hpp"

#include <cmath>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace overtaking {

/**
 * t -> P(t* <= t) for t = 1..horizon, counting the initial state as period 1,
 * so v_t is the target mass after t-1 transitions and v_1 = 0.
 *
 * Stored as log(1 - v_t) in extended precision: competing curves agree to
 * many digits near 1 and their order is decided there, long after 1 - v_t
 * would underflow.
 */
class ReachCurve {
public:
    ReachCurve(std::size_t initial, std::vector<long double> log_survival);

    std::size_t initial() const noexcept { return initial_; }
    std::size_t horizon() const noexcept { return log_survival_.size(); }
    /// log(1 - v_t) for 1 <= t <= horizon; -inf once the target is reached surely.
    long double log_survival(std::size_t t) const { return log_survival_.at(t - 1); }
    long double survival(std::size_t t) const { return std::exp(log_survival(t)); }
    double value(std::size_t t) const { return static_cast<double>(-std::expm1(log_survival(t))) + 0.0; }
    std::vector<double> values() const;

private:
    std::size_t initial_;
    std::vector<long double> log_survival_;
};

ReachCurve reach_curve(const Mdp& mdp, const StationaryStrategy& sigma, std::size_t s0, std::size_t horizon);
ReachCurve reach_curve(const Mdp& mdp, const MarkovPlan& plan, std::size_t s0, std::size_t horizon);

struct HittingProbability {
    double value = 0.0;
    /// Some states could not reach the target and were fixed at 0 before solving.
    bool pruned = false;
};

/// Limit hitting probability from every state (target = 1).
std::vector<double> hitting_probabilities(const Mdp& mdp, const StationaryStrategy& sigma, bool* pruned = nullptr);
HittingProbability hitting_probability(const Mdp& mdp, const StationaryStrategy& sigma, std::size_t s0);

inline constexpr double kSureHitTolerance = 1e-9;

/// Expected number of transitions until the target is hit; +inf unless it is hit almost surely.
double expected_hitting_time(const Mdp& mdp, const StationaryStrategy& sigma, std::size_t s0);

/// (1 - beta) * sum_t beta^(t-1) P(s_t = s*).
double discounted_value(const Mdp& mdp, const StationaryStrategy& sigma, double beta, std::size_t s0);

struct AverageMdp;

/// One step of an explicit path in an AverageMdp.
struct PathStep {
    std::size_t state;
    std::size_t action;
};

/// Running averages (1/t) * sum_{k<=t} u'(s_k, a_k), t = 1..steps.
std::vector<double> avg_prefix_payoffs(const AverageMdp& avg, const std::vector<PathStep>& path, std::size_t steps);

enum class VerdictKind { Overtakes, Overtaken, WeaklyOvertakes, WeaklyOvertaken, EqualOnWindow, Incomparable };

std::string_view to_string(VerdictKind kind);

struct Window {
    std::size_t first;
    std::size_t last;
};

struct Verdict {
    VerdictKind kind;
    Window window;
    double eq_tol;
    /// Strict periods needed for a weak verdict.
    std::size_t strict_needed;
    /// Periods where the first curve is strictly better, and where the second is.
    std::vector<std::size_t> first_ahead;
    std::vector<std::size_t> second_ahead;
};

inline constexpr double kDefaultEqTol = 1e-10;

/// Signed, relative advantage of curve a over b at period t (positive = a better for `objective`).
double relative_advantage(const ReachCurve& a, const ReachCurve& b, std::size_t t, Objective objective);

/**
 * Finite-window classification. Two periods count as tied when the survival
 * probabilities differ by at most eq_tol relative to the larger one.
 */
Verdict compare(const ReachCurve& a, const ReachCurve& b, Window window, Objective objective,
                double eq_tol = kDefaultEqTol);

} // namespace overtaking
