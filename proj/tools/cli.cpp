#include "cli.hpp"

#include "overtaking/casebook.hpp"
#include "overtaking/det_blackwell.hpp"
#include "overtaking/error.hpp"
#include "overtaking/evaluate.hpp"
#include "overtaking/horizon.hpp"
#include "overtaking/io.hpp"
#include "overtaking/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <optional>
#include <ostream>
#include <vector>

namespace overtaking::cli {

namespace {

struct RunConfig {
    std::string command;
    std::string mdp_path;
    std::string strategy_a;
    std::string strategy_b;
    std::string output;
    std::string from;
    std::string window_text;
    Window window{0, 0};
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
    std::size_t states = 0;
    std::size_t actions = 0;
    bool deterministic = false;
    double eq_tol = kDefaultEqTol;
    double gap_tol = kDefaultGapTol;
    double p = 0.1;
    double q = 0.11;
    std::size_t check_horizon = 0;
    std::size_t window_start = 0;
    std::string objective;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Window parse_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--window expects T0:T1");
    try {
        std::size_t used0 = 0, used1 = 0;
        const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
        const unsigned long first = std::stoul(a, &used0);
        const unsigned long last = std::stoul(b, &used1);
        if (used0 != a.size() || used1 != b.size() || a.front() == '-' || b.front() == '-') throw std::exception();
        if (first < 1 || first > last) throw UsageError("--window needs 1 <= T0 <= T1");
        return {first, last};
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("--window expects T0:T1 with positive integers");
    }
}

Mdp load(const RunConfig& cfg) {
    Mdp mdp = load_mdp(cfg.mdp_path);
    if (!cfg.objective.empty()) mdp = mdp.with_objective(objective_from_string(cfg.objective));
    return mdp;
}

std::size_t start_state(const Mdp& mdp, const std::string& name) {
    const auto s = mdp.find_state(name);
    if (!s) throw ModelError("unknown initial state '" + name + "'");
    if (*s == mdp.target()) throw ModelError("initial state must differ from the target");
    return *s;
}

StationaryStrategy load_strategy(const Mdp& mdp, const std::string& path) {
    return parse_strategy(mdp, read_text_file(path), path);
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.output.empty()) out << text;
    else write_text_file(cfg.output, text);
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    const Mdp raw = parse_mdp_document(read_text_file(cfg.mdp_path), cfg.mdp_path);
    const ValidationReport report = validate(raw);
    emit(cfg, out, validation_to_json(report));
    return report.ok ? kExitOk : kExitFailure;
}

int cmd_curve(const RunConfig& cfg, std::ostream& out) {
    const Mdp mdp = load(cfg);
    const MarkovPlan plan = parse_plan(mdp, read_text_file(cfg.strategy_a), cfg.strategy_a);
    emit(cfg, out, curve_to_csv(reach_curve(mdp, plan, start_state(mdp, cfg.from), cfg.horizon)));
    return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    const Mdp mdp = load(cfg);
    const Window w = parse_window(cfg.window_text);
    const std::size_t s0 = start_state(mdp, cfg.from);
    const MarkovPlan a = parse_plan(mdp, read_text_file(cfg.strategy_a), cfg.strategy_a);
    const MarkovPlan b = parse_plan(mdp, read_text_file(cfg.strategy_b), cfg.strategy_b);
    const Verdict v =
        compare(reach_curve(mdp, a, s0, w.last), reach_curve(mdp, b, s0, w.last), w, mdp.objective(), cfg.eq_tol);
    emit(cfg, out, verdict_to_json(v));
    return kExitOk;
}

int cmd_spectral(const RunConfig& cfg, std::ostream& out) {
    const Mdp mdp = load(cfg);
    emit(cfg, out, spectral_to_csv(mdp, best_pure_stationary(mdp, cfg.gap_tol).second));
    return kExitOk;
}

int cmd_best(const RunConfig& cfg, std::ostream& out) {
    const Mdp mdp = load(cfg);
    emit(cfg, out, strategy_to_json(mdp, best_pure_stationary(mdp, cfg.gap_tol).first));
    return kExitOk;
}

int cmd_horizon(const RunConfig& cfg, std::ostream& out) {
    const Mdp mdp = load(cfg);
    const auto cert = certified_horizon(mdp, load_strategy(mdp, cfg.strategy_a), load_strategy(mdp, cfg.strategy_b));
    emit(cfg, out, certificate_to_json(mdp, cert));
    return kExitOk;
}

int cmd_blackwell(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Mdp mdp = load(cfg);
    const AverageMdp avg = to_average_mdp(mdp);
    const StationaryStrategy sigma = lift_policy(mdp, avg, blackwell_optimal(avg));
    if (cfg.check_horizon > 0) {
        const std::size_t start = cfg.window_start > 0 ? cfg.window_start : std::max<std::size_t>(1, cfg.check_horizon / 2);
        const PathCheck check = not_weakly_overtaken_check(mdp, sigma, cfg.check_horizon, start);
        err << "path check: " << (check.passed ? "passed" : "failed") << " (" << check.complete_paths
            << " paths, transform error " << check.transform_error << ")\n";
        if (!check.passed) {
            emit(cfg, out, strategy_to_json(mdp, sigma));
            return kExitFailure;
        }
    }
    emit(cfg, out, strategy_to_json(mdp, sigma));
    return kExitOk;
}

int cmd_loops(const RunConfig& cfg, std::ostream& out) {
    const Mdp mdp = load(cfg);
    const AverageMdp avg = to_average_mdp(mdp);
    emit(cfg, out, loops_to_csv(avg, loop_report(avg)));
    return kExitOk;
}

int cmd_casebook(const RunConfig& cfg, std::ostream& out) {
    ClaimOptions options;
    options.p = cfg.p;
    options.q = cfg.q;
    options.seed = cfg.seed;
    const auto claims = check_claims(cfg.horizon, options);
    emit(cfg, out, claims_to_json(claims));
    const bool failed = std::any_of(claims.begin(), claims.end(),
                                    [](const ClaimResult& c) { return c.status == ClaimStatus::Failed; });
    return failed ? kExitFailure : kExitOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
    Mdp mdp = cfg.deterministic ? sample_deterministic(cfg.states, cfg.actions, cfg.seed)
                                : sample_generic(cfg.states, cfg.actions, cfg.seed);
    if (!cfg.objective.empty()) mdp = mdp.with_objective(objective_from_string(cfg.objective));
    emit(cfg, out, mdp_to_json(mdp));
    return kExitOk;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Overtaking analysis for finite MDPs with reach and safety objectives", "overtaking"};
    app.require_subcommand(1);

    auto objective_opt = [&](CLI::App* sub) {
        sub->add_option("--objective", cfg.objective, "Override the objective of the model")
            ->check(CLI::IsMember({"reach", "safety"}));
    };
    auto output_opt = [&](CLI::App* sub) { sub->add_option("--out", cfg.output, "Write to a file instead of stdout"); };
    auto mdp_arg = [&](CLI::App* sub) { sub->add_option("mdp", cfg.mdp_path, "MDP JSON document")->required(); };
    auto positive = CLI::PositiveNumber;

    auto* validate_cmd = app.add_subcommand("validate", "Check an MDP document");
    mdp_arg(validate_cmd);
    output_opt(validate_cmd);

    auto* curve_cmd = app.add_subcommand("curve", "Reach curve of a strategy or plan as CSV");
    mdp_arg(curve_cmd);
    curve_cmd->add_option("--strategy", cfg.strategy_a, "Strategy or plan JSON")->required();
    curve_cmd->add_option("--from", cfg.from, "Initial state")->required();
    curve_cmd->add_option("--horizon", cfg.horizon, "Number of periods")->required()->check(positive);
    objective_opt(curve_cmd);
    output_opt(curve_cmd);

    auto* compare_cmd = app.add_subcommand("compare", "Classify two strategies on a window");
    mdp_arg(compare_cmd);
    compare_cmd->add_option("--a", cfg.strategy_a, "First strategy or plan JSON")->required();
    compare_cmd->add_option("--b", cfg.strategy_b, "Second strategy or plan JSON")->required();
    compare_cmd->add_option("--from", cfg.from, "Initial state")->required();
    compare_cmd->add_option("--window", cfg.window_text, "Window T0:T1")->required();
    compare_cmd->add_option("--eq-tol", cfg.eq_tol, "Relative tie tolerance")->check(positive);
    objective_opt(compare_cmd);
    output_opt(compare_cmd);

    auto* spectral_cmd = app.add_subcommand("spectral", "lambda2 of every pure stationary strategy as CSV");
    mdp_arg(spectral_cmd);
    spectral_cmd->add_option("--gap-tol", cfg.gap_tol, "Genericity gap tolerance")->check(positive);
    objective_opt(spectral_cmd);
    output_opt(spectral_cmd);

    auto* best_cmd = app.add_subcommand("best", "Spectrally best pure stationary strategy as JSON");
    mdp_arg(best_cmd);
    best_cmd->add_option("--gap-tol", cfg.gap_tol, "Genericity gap tolerance")->check(positive);
    objective_opt(best_cmd);
    output_opt(best_cmd);

    auto* horizon_cmd = app.add_subcommand("horizon", "Certified dominance horizon of a over b");
    mdp_arg(horizon_cmd);
    horizon_cmd->add_option("--a", cfg.strategy_a, "Dominating strategy JSON")->required();
    horizon_cmd->add_option("--b", cfg.strategy_b, "Dominated strategy JSON")->required();
    objective_opt(horizon_cmd);
    output_opt(horizon_cmd);

    auto* blackwell_cmd = app.add_subcommand("blackwell", "Blackwell optimal policy of a deterministic MDP");
    mdp_arg(blackwell_cmd);
    blackwell_cmd->add_option("--check", cfg.check_horizon, "Also run the path check up to this period");
    blackwell_cmd->add_option("--window-start", cfg.window_start, "First period of the path check window");
    objective_opt(blackwell_cmd);
    output_opt(blackwell_cmd);

    auto* loops_cmd = app.add_subcommand("loops", "Simple loops of a deterministic MDP as CSV");
    mdp_arg(loops_cmd);
    objective_opt(loops_cmd);
    output_opt(loops_cmd);

    auto* casebook_cmd = app.add_subcommand("casebook", "Check the worked examples");
    casebook_cmd->add_option("--horizon", cfg.horizon, "Horizon for Example 1")->required()->check(positive);
    casebook_cmd->add_option("--p", cfg.p, "Example 1 parameter p");
    casebook_cmd->add_option("--q", cfg.q, "Example 1 parameter q");
    cfg.seed = 2024;
    casebook_cmd->add_option("--seed", cfg.seed, "Seed for sampled plans");
    output_opt(casebook_cmd);

    auto* sample_cmd = app.add_subcommand("sample", "Sample a random MDP");
    sample_cmd->add_option("--states", cfg.states, "States including the target")->required()->check(CLI::Range(2, 1000));
    sample_cmd->add_option("--actions", cfg.actions, "Actions per state")->required()->check(CLI::Range(1, 1000));
    sample_cmd->add_option("--seed", cfg.seed, "Random seed")->required();
    sample_cmd->add_flag("--deterministic", cfg.deterministic, "Sample a deterministic MDP");
    objective_opt(sample_cmd);
    output_opt(sample_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(cfg, out);
        if (curve_cmd->parsed()) return cmd_curve(cfg, out);
        if (compare_cmd->parsed()) return cmd_compare(cfg, out);
        if (spectral_cmd->parsed()) return cmd_spectral(cfg, out);
        if (best_cmd->parsed()) return cmd_best(cfg, out);
        if (horizon_cmd->parsed()) return cmd_horizon(cfg, out);
        if (blackwell_cmd->parsed()) return cmd_blackwell(cfg, out, err);
        if (loops_cmd->parsed()) return cmd_loops(cfg, out);
        if (casebook_cmd->parsed()) return cmd_casebook(cfg, out);
        if (sample_cmd->parsed()) return cmd_sample(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace overtaking::cli
