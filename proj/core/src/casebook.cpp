#include "overtaking/casebook.hpp"

#include "overtaking/error.hpp"
#include "overtaking/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace overtaking {

Example1 build_example1(double p, double q) {
    if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0))
        throw ModelError("Example 1 needs p and q in (0, 1)");
    Example1 ex{MdpBuilder({"x", "y", "z", "s*"}, "s*")
                    .action("x", "a", {{"s*", q}, {"y", 1.0 - q}})
                    .action("x", "b", {{"s*", 0.5}, {"z", 0.5}})
                    .action("y", "c", {{"s*", q}, {"y", 1.0 - q}})
                    .action("z", "d", {{"s*", p}, {"z", 1.0 - p}})
                    .build(),
                false};
    ex.warning = !(p < q && q < 2.0 * p / (2.0 * p + 1.0));
    return ex;
}

Mdp build_example2(Objective objective) {
    const bool safety = objective == Objective::Safety;
    MdpBuilder b({"x", "y", "z", "s*"}, "s*", objective);
    b.action("x", "a", {{"s*", 0.5}, {"x", 0.5}});
    if (safety) b.action("x", "b", {{"y", 1.0}});
    else b.action("x", "b", {{"s*", 0.75}, {"y", 0.25}});
    if (safety) b.action("y", "d", {{"s*", 0.75}, {"z", 0.25}});
    else b.action("y", "d", {{"z", 1.0}});
    b.action("z", "e", {{"s*", 0.5}, {"z", 0.5}});
    return b.build();
}

Mdp build_example3(Objective objective) {
    const bool safety = objective == Objective::Safety;
    // c is a fair lottery between a b-like branch and (1/2 s*, 1/2 x')
    const std::vector<std::pair<std::string, double>> c =
        safety ? std::vector<std::pair<std::string, double>>{{"s*", 0.25}, {"y", 0.5}, {"x'", 0.25}}
               : std::vector<std::pair<std::string, double>>{{"s*", 0.625}, {"y", 0.125}, {"x'", 0.25}};
    MdpBuilder b({"x", "x'", "y", "z", "s*"}, "s*", objective);
    b.action("x", "a", {{"s*", 0.5}, {"x", 0.5}});
    b.action("x", "c", c);
    b.action("x'", "c'", c);
    if (safety) b.action("y", "d", {{"s*", 0.75}, {"z", 0.25}});
    else b.action("y", "d", {{"z", 1.0}});
    b.action("z", "e", {{"s*", 0.5}, {"z", 0.5}});
    return b.build();
}

Mdp build_incomparable() {
    return MdpBuilder({"x", "s*"}, "s*")
        .action("x", "a0", {{"x", 1.0}})
        .action("x", "a1/2", {{"s*", 0.5}, {"x", 0.5}})
        .action("x", "a7/8", {{"s*", 0.875}, {"x", 0.125}})
        .build();
}

namespace {

StationaryStrategy example2_row(const Mdp& ex2, double z) {
    std::vector<std::vector<double>> probs(ex2.state_count());
    for (std::size_t s : ex2.non_target_states()) probs[s].assign(ex2.action_count(s), 0.0);
    const std::size_t x = ex2.state_index("x");
    probs[x][ex2.action_index(x, "a")] = 1.0 - z;
    probs[x][ex2.action_index(x, "b")] = z;
    for (std::size_t s : ex2.non_target_states())
        if (s != x) probs[s][0] = 1.0;
    return StationaryStrategy(std::move(probs));
}

StationaryStrategy pure_at_x(const Mdp& mdp, const std::string& action) {
    std::vector<std::size_t> choice(mdp.state_count(), 0);
    const std::size_t x = mdp.state_index("x");
    choice[x] = mdp.action_index(x, action);
    return StationaryStrategy::pure(mdp, choice);
}

} // namespace

MarkovPlan example2_plan(const Mdp& ex2, const std::vector<double>& z, double tail_z) {
    MarkovPlan plan;
    for (double zn : z) plan.rows.push_back(example2_row(ex2, zn));
    plan.tail = example2_row(ex2, tail_z);
    check_plan(ex2, plan);
    return plan;
}

std::vector<double> b_probabilities(const Mdp& ex2, const MarkovPlan& plan, std::size_t count) {
    const std::size_t x = ex2.state_index("x");
    const std::size_t b = ex2.action_index(x, "b");
    std::vector<double> z;
    for (std::size_t n = 1; n <= count; ++n) z.push_back(plan.at_period(n).prob(x, b));
    return z;
}

double prob_b_at(const std::vector<double>& z, std::size_t n) {
    double at_x = 1.0;
    for (std::size_t k = 1; k < n; ++k) at_x *= (1.0 - z.at(k - 1)) * 0.5;
    return at_x * z.at(n - 1);
}

Improvement example2_improve(const Mdp& ex2, const MarkovPlan& plan, std::size_t horizon) {
    check_plan(ex2, plan);
    const std::size_t x = ex2.state_index("x");
    const std::size_t b = ex2.action_index(x, "b");
    std::vector<double> z = b_probabilities(ex2, plan, plan.horizon());
    const double tail = plan.tail.prob(x, b);

    Improvement out;
    const bool some_one = tail == 1.0 || std::find(z.begin(), z.end(), 1.0) != z.end();
    auto first = std::find_if(z.begin(), z.end(), [](double v) { return v > 0.0; });
    if (first != z.end()) out.m = static_cast<std::size_t>(first - z.begin()) + 1;
    else if (tail > 0.0) out.m = z.size() + 1;
    if (some_one || out.m == 0) {
        out.plan = MarkovPlan::stationary(example2_row(ex2, 0.5));
        out.stationary_half = true;
        return out;
    }

    const std::size_t m = out.m;
    const std::size_t len = std::max({horizon, m + 1, plan.horizon()});
    z = b_probabilities(ex2, plan, len);
    const double zm = z[m - 1];
    const double kappa = std::pow((1.0 - zm) / (1.0 - 0.5 * zm), 1.0 / static_cast<double>(len - m));
    std::vector<double> zp = z;
    zp[m - 1] = 0.5 * zm;
    for (std::size_t n = m + 1; n <= len; ++n) zp[n - 1] = 1.0 - kappa * (1.0 - z[n - 1]);
    out.plan = example2_plan(ex2, zp, 1.0 - kappa * (1.0 - tail));
    return out;
}

MarkovPlan example3_plan(const Mdp& ex3, std::size_t t) {
    MarkovPlan plan;
    plan.rows.assign(t, pure_at_x(ex3, "a"));
    plan.tail = pure_at_x(ex3, "c");
    return plan;
}

MarkovPlan example3_a_forever(const Mdp& ex3) { return MarkovPlan::stationary(pure_at_x(ex3, "a")); }

MarkovPlan incomparable_cycle_plan(const Mdp& mdp, std::size_t horizon) {
    const std::string cycle[] = {"a0", "a7/8", "a0"};
    MarkovPlan plan;
    for (std::size_t n = 0; n < horizon; ++n) plan.rows.push_back(pure_at_x(mdp, cycle[n % 3]));
    plan.tail = pure_at_x(mdp, "a0");
    return plan;
}

std::string_view to_string(ClaimStatus status) {
    switch (status) {
    case ClaimStatus::Passed: return "passed";
    case ClaimStatus::Failed: return "failed";
    case ClaimStatus::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

namespace {

ClaimStatus status_of(bool ok) { return ok ? ClaimStatus::Passed : ClaimStatus::Failed; }

int sign_of(double v, double zero) { return v > zero ? 1 : (v < -zero ? -1 : 0); }

ClaimResult example1_overtaking(const Example1& ex, std::size_t horizon) {
    ClaimResult r{"example1-overtaking", ClaimStatus::Failed, "action a overtakes action b from x", {}, {}};
    const Mdp& mdp = ex.mdp;
    const std::size_t x = mdp.state_index("x");
    const auto a = reach_curve(mdp, pure_at_x(mdp, "a"), x, std::max<std::size_t>(horizon, 1));
    const auto b = reach_curve(mdp, pure_at_x(mdp, "b"), x, std::max<std::size_t>(horizon, 1));
    const auto cross = empirical_crossover(a, b, Objective::Reach);
    r.evidence.push_back({"crossover", cross ? static_cast<double>(*cross) : -1.0});
    r.evidence.push_back({"horizon", static_cast<double>(horizon)});
    if (horizon < 60) {
        r.status = ClaimStatus::Inconclusive;
        r.note = "window [60, horizon] is empty";
        return r;
    }
    const Verdict v = compare(a, b, {60, horizon}, Objective::Reach);
    r.evidence.push_back({"window_first", 60});
    r.evidence.push_back({"window_last", static_cast<double>(horizon)});
    r.note = std::string("verdict ") + std::string(to_string(v.kind));
    r.status = status_of(v.kind == VerdictKind::Overtakes);
    return r;
}

ClaimResult example1_discounted(const Example1& ex) {
    ClaimResult r{"example1-discounted", ClaimStatus::Failed, "b has the higher discounted payoff for beta near 1", {}, {}};
    const Mdp& mdp = ex.mdp;
    const std::size_t x = mdp.state_index("x");
    bool ok = true;
    for (double beta : {0.99, 0.999}) {
        const double da = discounted_value(mdp, pure_at_x(mdp, "a"), beta, x);
        const double db = discounted_value(mdp, pure_at_x(mdp, "b"), beta, x);
        std::ostringstream name;
        name << "d_b_minus_d_a_beta_" << beta;
        r.evidence.push_back({name.str(), db - da});
        ok = ok && db > da;
    }
    r.status = status_of(ok);
    return r;
}

ClaimResult example1_hitting(const Example1& ex, double p, double q) {
    ClaimResult r{"example1-hitting-time", ClaimStatus::Failed, "expected hitting time is smaller under b", {}, {}};
    const Mdp& mdp = ex.mdp;
    const std::size_t x = mdp.state_index("x");
    const double ea = expected_hitting_time(mdp, pure_at_x(mdp, "a"), x);
    const double eb = expected_hitting_time(mdp, pure_at_x(mdp, "b"), x);
    r.evidence = {{"e_a", ea}, {"e_b", eb}, {"closed_form_a", 1.0 / q}, {"closed_form_b", 1.0 + 1.0 / (2.0 * p)}};
    r.status = status_of(std::abs(ea - 1.0 / q) <= 1e-10 && std::abs(eb - (1.0 + 1.0 / (2.0 * p))) <= 1e-10 && eb < ea);
    return r;
}

ClaimResult example2_pure_tie() {
    ClaimResult r{"example2-pure-tie", ClaimStatus::Failed,
                  "every pure plan reaches the curve 1 - 2^(1-t) after committing", {}, {}};
    const Mdp ex2 = build_example2();
    const std::size_t x = ex2.state_index("x");
    constexpr std::size_t last = 20;
    double worst = 0.0;
    // n = 0 stands for a forever; otherwise b at period n
    for (std::size_t n = 0; n < last; ++n) {
        std::vector<double> z(n, 0.0);
        if (n > 0) z.back() = 1.0;
        const auto curve = reach_curve(ex2, example2_plan(ex2, z, 0.0), x, last);
        // b at period n leaves y for z at n + 1, so the tie starts at n + 2
        for (std::size_t t = n == 0 ? 1 : n + 2; t <= last; ++t)
            worst = std::max(worst, std::abs(curve.value(t) - (1.0 - std::ldexp(1.0, 1 - static_cast<int>(t)))));
    }
    r.evidence = {{"max_abs_error", worst}, {"last_period", last}};
    r.status = status_of(worst <= 1e-12);
    return r;
}

ClaimResult example2_later_b() {
    ClaimResult r{"example2-later-b", ClaimStatus::Failed,
                  "curve order at t matches the order of P(a_{t-1} = b)", {}, {}};
    const Mdp ex2 = build_example2();
    const std::size_t x = ex2.state_index("x");
    const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    struct Candidate {
        std::vector<double> z;
        ReachCurve curve;
    };
    std::vector<Candidate> plans;
    for (double z1 : grid)
        for (double z2 : grid) {
            const MarkovPlan plan = example2_plan(ex2, {z1, z1, z1}, z2);
            plans.push_back({b_probabilities(ex2, plan, 12), reach_curve(ex2, plan, x, 12)});
        }
    std::size_t checked = 0, mismatched = 0;
    for (std::size_t i = 0; i < plans.size(); ++i)
        for (std::size_t j = i + 1; j < plans.size(); ++j)
            for (std::size_t t = 3; t <= 12; ++t) {
                const int by_curve = sign_of(relative_advantage(plans[i].curve, plans[j].curve, t, Objective::Reach), 1e-14);
                const int by_b = sign_of(prob_b_at(plans[i].z, t - 1) - prob_b_at(plans[j].z, t - 1), 0.0);
                ++checked;
                if (by_curve != by_b) ++mismatched;
            }
    r.evidence = {{"plans", static_cast<double>(plans.size())}, {"comparisons", static_cast<double>(checked)},
                  {"mismatches", static_cast<double>(mismatched)}};
    r.status = status_of(mismatched == 0);
    return r;
}

ClaimResult example2_no_optimal(const ClaimOptions& options) {
    ClaimResult r{"example2-no-optimal", ClaimStatus::Failed,
                  "every sampled plan is strictly improved after its first b period", {}, {}};
    const Mdp ex2 = build_example2();
    const std::size_t x = ex2.state_index("x");
    constexpr std::size_t last = 20;
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> length(1, 10);
    std::uniform_real_distribution<double> prob(0.0, 0.9);
    std::bernoulli_distribution zero(0.3);

    std::size_t improved = 0, comparisons = 0;
    for (std::size_t i = 0; i < options.sampled_plans; ++i) {
        std::vector<double> z(length(rng));
        for (double& v : z) v = zero(rng) ? 0.0 : prob(rng);
        double tail = prob(rng);
        if (tail == 0.0) tail = 0.5;
        const MarkovPlan plan = example2_plan(ex2, z, tail);
        const Improvement imp = example2_improve(ex2, plan, last);
        const auto before = reach_curve(ex2, plan, x, last + 1);
        const auto after = reach_curve(ex2, imp.plan, x, last + 1);
        bool strict = !imp.stationary_half;
        // action periods n in (m, 20] decide the curve at t = n + 1
        for (std::size_t n = imp.m + 1; n <= last; ++n) {
            ++comparisons;
            strict = strict && relative_advantage(after, before, n + 1, Objective::Reach) > 0.0;
        }
        if (strict) ++improved;
    }
    // Case 1 inputs: a forever, and b at period 1. The gap shrinks like 4^-t, so the window stays early.
    bool case1 = true;
    for (const auto& z : {std::vector<double>{}, std::vector<double>{1.0}}) {
        const MarkovPlan plan = example2_plan(ex2, z, 0.0);
        const Improvement imp = example2_improve(ex2, plan, last);
        const auto v = compare(reach_curve(ex2, imp.plan, x, 15), reach_curve(ex2, plan, x, 15), {3, 15},
                               Objective::Reach);
        case1 = case1 && imp.stationary_half && v.kind == VerdictKind::Overtakes;
    }
    r.evidence = {{"sampled_plans", static_cast<double>(options.sampled_plans)},
                  {"strictly_improved", static_cast<double>(improved)},
                  {"period_checks", static_cast<double>(comparisons)},
                  {"case1_overtaken", case1 ? 1.0 : 0.0}};
    r.status = status_of(improved == options.sampled_plans && case1);
    return r;
}

ClaimResult example3_chain(Objective objective) {
    const bool safety = objective == Objective::Safety;
    ClaimResult r{safety ? "example3-safety-chain" : "example3-chain", ClaimStatus::Failed,
                  "c overtakes a forever and a^(t+1)c overtakes a^t c", {}, {}};
    const Mdp ex3 = build_example3(objective);
    const std::size_t x = ex3.state_index("x");
    constexpr Window window{10, 30};
    bool ok = true;
    const auto first = compare(reach_curve(ex3, example3_plan(ex3, 0), x, window.last),
                               reach_curve(ex3, example3_a_forever(ex3), x, window.last), window, objective);
    ok = ok && first.kind == VerdictKind::Overtakes;
    r.evidence.push_back({"c_vs_a_forever", first.kind == VerdictKind::Overtakes ? 1.0 : 0.0});
    for (std::size_t t = 0; t <= 6; ++t) {
        const auto v = compare(reach_curve(ex3, example3_plan(ex3, t + 1), x, window.last),
                               reach_curve(ex3, example3_plan(ex3, t), x, window.last), window, objective);
        r.evidence.push_back({"a^" + std::to_string(t + 1) + "c_vs_a^" + std::to_string(t) + "c",
                              v.kind == VerdictKind::Overtakes ? 1.0 : 0.0});
        ok = ok && v.kind == VerdictKind::Overtakes;
    }
    r.evidence.push_back({"window_first", static_cast<double>(window.first)});
    r.evidence.push_back({"window_last", static_cast<double>(window.last)});
    r.status = status_of(ok);
    return r;
}

ClaimResult incomparable() {
    ClaimResult r{"incomparable", ClaimStatus::Failed,
                  "always a1/2 and the cycle a0, a7/8, a0 are incomparable", {}, {}};
    const Mdp mdp = build_incomparable();
    const std::size_t x = mdp.state_index("x");
    constexpr Window window{10, 100};
    const auto half = reach_curve(mdp, MarkovPlan::stationary(pure_at_x(mdp, "a1/2")), x, window.last);
    const auto cycle = reach_curve(mdp, incomparable_cycle_plan(mdp, window.last), x, window.last);
    const auto v = compare(half, cycle, window, Objective::Reach);
    // both leave (1/8)^k at x after 3k transitions
    double tie_error = 0.0;
    for (std::size_t t = 1; t <= window.last; t += 3) {
        const double expected = -std::expm1(-3.0 * std::log(2.0) * static_cast<double>((t - 1) / 3));
        tie_error = std::max({tie_error, std::abs(half.value(t) - expected), std::abs(cycle.value(t) - expected)});
    }
    bool pattern = v.kind == VerdictKind::Incomparable && tie_error <= 1e-12;
    for (std::size_t t : v.first_ahead) pattern = pattern && t % 3 == 2;
    for (std::size_t t : v.second_ahead) pattern = pattern && t % 3 == 0;
    const std::size_t tied = (window.last - window.first + 1) - v.first_ahead.size() - v.second_ahead.size();
    r.evidence = {{"first_ahead", static_cast<double>(v.first_ahead.size())},
                  {"second_ahead", static_cast<double>(v.second_ahead.size())},
                  {"tied", static_cast<double>(tied)},
                  {"tie_value_error", tie_error}};
    r.note = std::string("verdict ") + std::string(to_string(v.kind));
    r.status = status_of(pattern && !v.first_ahead.empty() && !v.second_ahead.empty());
    return r;
}

template <typename F>
ClaimResult guarded(const std::string& id, F&& check) {
    try {
        return check();
    } catch (const std::exception& e) {
        return {id, ClaimStatus::Failed, "", {}, std::string("error: ") + e.what()};
    }
}

} // namespace

std::vector<ClaimResult> check_claims(std::size_t horizon, const ClaimOptions& options) {
    std::vector<ClaimResult> out;
    const Example1 ex1 = build_example1(options.p, options.q);
    out.push_back(guarded("example1-overtaking", [&] { return example1_overtaking(ex1, horizon); }));
    out.push_back(guarded("example1-discounted", [&] { return example1_discounted(ex1); }));
    out.push_back(guarded("example1-hitting-time", [&] { return example1_hitting(ex1, options.p, options.q); }));
    if (ex1.warning)
        for (auto& r : out) r.note += (r.note.empty() ? "" : "; ") + std::string("parameters outside 0 < p < q < 2p/(2p+1)");
    out.push_back(guarded("example2-pure-tie", [] { return example2_pure_tie(); }));
    out.push_back(guarded("example2-later-b", [] { return example2_later_b(); }));
    out.push_back(guarded("example2-no-optimal", [&] { return example2_no_optimal(options); }));
    out.push_back(guarded("example3-chain", [] { return example3_chain(Objective::Reach); }));
    out.push_back(guarded("example3-safety-chain", [] { return example3_chain(Objective::Safety); }));
    out.push_back(guarded("incomparable", [] { return incomparable(); }));
    return out;
}

} // namespace overtaking
