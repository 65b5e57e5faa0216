#pragma once

#include "overtaking/casebook.hpp"
#include "overtaking/det_blackwell.hpp"
#include "overtaking/evaluate.hpp"
#include "overtaking/horizon.hpp"
#include "overtaking/mdp.hpp"
#include "overtaking/spectral.hpp"
#include "overtaking/strategy.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace overtaking {

/// Whole file as a string; ParseError naming the path when unreadable.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/**
 * Structural parse of an MDP document. Errors carry "<source>: <JSON pointer>".
 * The result is not validated and rows are not renormalized.
 */
Mdp parse_mdp_document(std::string_view text, const std::string& source = "<input>");

/// Parse, validate (first issue becomes a ParseError) and renormalize rows once.
Mdp parse_mdp(std::string_view text, const std::string& source = "<input>");
Mdp load_mdp(const std::string& path);

std::string mdp_to_json(const Mdp& mdp);

/// Pure states are written as an action name, mixed ones as an action -> probability object.
std::string strategy_to_json(const Mdp& mdp, const StationaryStrategy& sigma);
StationaryStrategy parse_strategy(const Mdp& mdp, std::string_view text, const std::string& source = "<input>");

std::string plan_to_json(const Mdp& mdp, const MarkovPlan& plan);
/// Accepts a plan document or a bare strategy (read as a stationary plan).
MarkovPlan parse_plan(const Mdp& mdp, std::string_view text, const std::string& source = "<input>");

/// "t,prob" with 17 significant digits.
std::string curve_to_csv(const ReachCurve& curve);
/// Probabilities for t = 1, 2, ... in order.
std::vector<double> parse_curve_csv(std::string_view text);

std::string validation_to_json(const ValidationReport& report);
ValidationReport parse_validation(std::string_view text);

std::string verdict_to_json(const Verdict& verdict);
Verdict parse_verdict(std::string_view text);

struct SpectralRow {
    std::size_t index = 0;
    std::string profile;
    double lambda2 = 0.0;
    double gap = 0.0;
};

struct SpectralTable {
    std::vector<SpectralRow> rows;
    std::size_t selected = 0;
    double min_gap = 0.0;
    bool generic = true;
};

/// "strategy_index,action_profile,lambda2,generic_gap", then a "selected" summary row.
std::string spectral_to_csv(const Mdp& mdp, const SpectralReport& report);
SpectralTable parse_spectral_csv(std::string_view text);

struct LoopTable {
    std::vector<std::pair<std::string, double>> loops;
    std::optional<double> delta;
};

/// "cycle,phi", then a "delta" summary row ("none" without negative loops).
std::string loops_to_csv(const AverageMdp& avg, const LoopReport& report);
LoopTable parse_loops_csv(std::string_view text);

std::string certificate_to_json(const Mdp& mdp, const HorizonCertificate& cert);
HorizonCertificate parse_certificate(const Mdp& mdp, std::string_view text);

std::string claims_to_json(const std::vector<ClaimResult>& claims);
std::vector<ClaimResult> parse_claims(std::string_view text);

} // namespace overtaking
