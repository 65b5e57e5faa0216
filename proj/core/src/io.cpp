#include "overtaking/io.hpp"

#include "overtaking/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace overtaking {

using Json = nlohmann::ordered_json;

namespace {

std::string pointer(std::initializer_list<std::string> tokens) {
    std::string out;
    for (const auto& t : tokens) {
        out += '/';
        for (char c : t) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
    }
    return out;
}

std::string located(const std::string& source, const std::string& ptr) {
    return ptr.empty() ? source : source + ":" + ptr;
}

Json parse_json(std::string_view text, const std::string& source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError(source + ":byte " + std::to_string(e.byte), "malformed JSON");
    }
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

double parse_number(const std::string& field, const std::string& where) {
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        throw ParseError(where, "expected a number, got '" + field + "'");
    }
    if (used != field.size()) throw ParseError(where, "expected a number, got '" + field + "'");
    return v;
}

// JSON has no infinities; non-finite values travel as strings.
Json number_json(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

double number_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_number(j.get<std::string>(), where);
    throw ParseError(where, "expected a number");
}

const Json& member(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where, std::string("missing key \"") + key + "\"");
    return *it;
}

std::string string_from_json(const Json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where, "expected a string");
    return j.get<std::string>();
}

std::size_t index_from_json(const Json& j, const std::string& where) {
    if (!j.is_number_unsigned()) throw ParseError(where, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

bool bool_from_json(const Json& j, const std::string& where) {
    if (!j.is_boolean()) throw ParseError(where, "expected true or false");
    return j.get<bool>();
}

// CSV

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) throw ParseError("line " + std::to_string(line_no), "unterminated quoted field");
    return fields;
}

struct CsvRow {
    std::size_t line;
    std::vector<std::string> fields;
    std::string where() const { return "line " + std::to_string(line); }
};

std::vector<CsvRow> read_csv(std::string_view text, const std::string& header, std::size_t columns) {
    std::vector<CsvRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != header) throw ParseError("line " + std::to_string(line_no), "expected header '" + header + "'");
            header_seen = true;
            continue;
        }
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != columns)
            throw ParseError("line " + std::to_string(line_no),
                             "expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
        rows.push_back({line_no, std::move(fields)});
    }
    if (!header_seen) throw ParseError("line 1", "missing header '" + header + "'");
    return rows;
}

Json strategy_json(const Mdp& mdp, const StationaryStrategy& sigma) {
    check_strategy(mdp, sigma);
    Json out = Json::object();
    for (std::size_t s : mdp.non_target_states()) {
        if (auto a = sigma.pure_action(s)) {
            out[mdp.state_name(s)] = mdp.actions(s)[*a];
            continue;
        }
        Json row = Json::object();
        for (std::size_t a = 0; a < mdp.action_count(s); ++a)
            if (sigma.prob(s, a) != 0.0) row[mdp.actions(s)[a]] = sigma.prob(s, a);
        out[mdp.state_name(s)] = row;
    }
    return out;
}

StationaryStrategy strategy_from_json(const Mdp& mdp, const Json& j, const std::string& source,
                                      const std::string& base) {
    if (!j.is_object()) throw ParseError(located(source, base), "strategy must be an object");
    std::vector<std::vector<double>> probs(mdp.state_count());
    std::vector<bool> seen(mdp.state_count(), false);
    for (const auto& [name, value] : j.items()) {
        const std::string where = located(source, base + pointer({name}));
        const auto s = mdp.find_state(name);
        if (!s) throw ParseError(where, "unknown state '" + name + "'");
        if (*s == mdp.target()) throw ParseError(where, "the target state takes no action");
        probs[*s].assign(mdp.action_count(*s), 0.0);
        seen[*s] = true;
        auto action_of = [&](const std::string& action, const std::string& at) {
            for (std::size_t a = 0; a < mdp.action_count(*s); ++a)
                if (mdp.actions(*s)[a] == action) return a;
            throw ParseError(at, "state '" + name + "' has no action '" + action + "'");
        };
        if (value.is_string()) {
            probs[*s][action_of(value.get<std::string>(), where)] = 1.0;
        } else if (value.is_object()) {
            for (const auto& [action, p] : value.items()) {
                const std::string at = located(source, base + pointer({name, action}));
                probs[*s][action_of(action, at)] = number_from_json(p, at);
            }
        } else {
            throw ParseError(where, "expected an action name or an action -> probability object");
        }
    }
    for (std::size_t s : mdp.non_target_states())
        if (!seen[s]) throw ParseError(located(source, base), "no entry for state '" + mdp.state_name(s) + "'");
    StationaryStrategy sigma(std::move(probs));
    try {
        check_strategy(mdp, sigma);
    } catch (const ModelError& e) {
        throw ParseError(located(source, base), e.what());
    }
    return sigma;
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ParseError(path, "cannot read file");
    return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path, "cannot open file for writing");
    out << text;
    if (!out) throw ParseError(path, "write failed");
}

Mdp parse_mdp_document(std::string_view text, const std::string& source) {
    const Json doc = parse_json(text, source);
    const std::string root = located(source, "");
    if (!doc.is_object()) throw ParseError(root, "MDP document must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "states" && key != "target" && key != "objective" && key != "kernel")
            throw ParseError(located(source, pointer({key})), "unknown key");

    const Json& states_json = member(doc, "states", root);
    if (!states_json.is_array()) throw ParseError(located(source, "/states"), "expected an array of state names");
    std::vector<std::string> states;
    for (std::size_t i = 0; i < states_json.size(); ++i)
        states.push_back(string_from_json(states_json[i], located(source, "/states/" + std::to_string(i))));
    if (states.empty()) throw ParseError(located(source, "/states"), "need at least one state");

    const std::string target_name = string_from_json(member(doc, "target", root), located(source, "/target"));
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return i;
        return std::nullopt;
    };
    const auto target = find(target_name);
    if (!target) throw ParseError(located(source, "/target"), "target '" + target_name + "' is not a declared state");

    Objective objective;
    try {
        objective = objective_from_string(string_from_json(member(doc, "objective", root), located(source, "/objective")));
    } catch (const ModelError& e) {
        throw ParseError(located(source, "/objective"), e.what());
    }

    const Json& kernel_json = member(doc, "kernel", root);
    if (!kernel_json.is_object()) throw ParseError(located(source, "/kernel"), "expected an object");
    const std::size_t n = states.size();
    std::vector<std::vector<std::string>> actions(n);
    std::vector<std::vector<Distribution>> kernel(n);
    for (const auto& [state, acts] : kernel_json.items()) {
        const std::string sptr = pointer({"kernel", state});
        const auto s = find(state);
        if (!s) throw ParseError(located(source, sptr), "unknown state '" + state + "'");
        if (!acts.is_object()) throw ParseError(located(source, sptr), "expected an action -> distribution object");
        for (const auto& [action, dist] : acts.items()) {
            const std::string aptr = pointer({"kernel", state, action});
            if (!dist.is_object()) throw ParseError(located(source, aptr), "expected a state -> probability object");
            Distribution row(n, 0.0);
            for (const auto& [succ, p] : dist.items()) {
                const std::string pptr = located(source, pointer({"kernel", state, action, succ}));
                const auto z = find(succ);
                if (!z) throw ParseError(pptr, "unknown state '" + succ + "'");
                if (!p.is_number()) throw ParseError(pptr, "expected a number");
                row[*z] = p.get<double>();
            }
            actions[*s].push_back(action);
            kernel[*s].push_back(std::move(row));
        }
    }
    return Mdp(std::move(states), *target, objective, std::move(actions), std::move(kernel));
}

Mdp parse_mdp(std::string_view text, const std::string& source) {
    const Mdp raw = parse_mdp_document(text, source);
    const ValidationReport report = validate(raw);
    if (!report.ok) throw ParseError(located(source, report.issues.front().location), report.issues.front().message);
    return renormalize_rows(raw);
}

Mdp load_mdp(const std::string& path) { return parse_mdp(read_text_file(path), path); }

std::string mdp_to_json(const Mdp& mdp) {
    Json doc = Json::object();
    doc["states"] = mdp.states();
    doc["target"] = mdp.state_name(mdp.target());
    doc["objective"] = std::string(to_string(mdp.objective()));
    Json kernel = Json::object();
    for (std::size_t s = 0; s < mdp.state_count(); ++s) {
        if (mdp.action_count(s) == 0) continue;
        Json acts = Json::object();
        for (std::size_t a = 0; a < mdp.action_count(s); ++a) {
            Json row = Json::object();
            for (std::size_t z = 0; z < mdp.state_count(); ++z)
                if (mdp.prob(s, a, z) != 0.0) row[mdp.state_name(z)] = mdp.prob(s, a, z);
            acts[mdp.actions(s)[a]] = row;
        }
        kernel[mdp.state_name(s)] = acts;
    }
    doc["kernel"] = kernel;
    return doc.dump(2) + "\n";
}

std::string strategy_to_json(const Mdp& mdp, const StationaryStrategy& sigma) {
    return strategy_json(mdp, sigma).dump(2) + "\n";
}

StationaryStrategy parse_strategy(const Mdp& mdp, std::string_view text, const std::string& source) {
    return strategy_from_json(mdp, parse_json(text, source), source, "");
}

std::string plan_to_json(const Mdp& mdp, const MarkovPlan& plan) {
    Json doc = Json::object();
    doc["rows"] = Json::array();
    for (const auto& row : plan.rows) doc["rows"].push_back(strategy_json(mdp, row));
    doc["tail"] = strategy_json(mdp, plan.tail);
    return doc.dump(2) + "\n";
}

MarkovPlan parse_plan(const Mdp& mdp, std::string_view text, const std::string& source) {
    const Json doc = parse_json(text, source);
    if (!(doc.is_object() && doc.contains("rows") && doc.contains("tail")))
        return MarkovPlan::stationary(strategy_from_json(mdp, doc, source, ""));
    if (doc.size() != 2) throw ParseError(located(source, ""), "a plan has exactly the keys \"rows\" and \"tail\"");
    const Json& rows = doc["rows"];
    if (!rows.is_array()) throw ParseError(located(source, "/rows"), "expected an array");
    MarkovPlan plan;
    for (std::size_t i = 0; i < rows.size(); ++i)
        plan.rows.push_back(strategy_from_json(mdp, rows[i], source, "/rows/" + std::to_string(i)));
    plan.tail = strategy_from_json(mdp, doc["tail"], source, "/tail");
    return plan;
}

std::string curve_to_csv(const ReachCurve& curve) {
    std::string out = "t,prob\n";
    for (std::size_t t = 1; t <= curve.horizon(); ++t)
        out += std::to_string(t) + "," + format_number(curve.value(t)) + "\n";
    return out;
}

std::vector<double> parse_curve_csv(std::string_view text) {
    std::vector<double> out;
    for (const auto& row : read_csv(text, "t,prob", 2)) {
        if (row.fields[0] != std::to_string(out.size() + 1))
            throw ParseError(row.where(), "periods must run 1, 2, ... without gaps");
        out.push_back(parse_number(row.fields[1], row.where()));
    }
    return out;
}

std::string validation_to_json(const ValidationReport& report) {
    Json doc = Json::object();
    doc["ok"] = report.ok;
    doc["determinism"] = report.determinism;
    doc["positivity"] = report.positivity;
    doc["issues"] = Json::array();
    for (const auto& issue : report.issues)
        doc["issues"].push_back({{"location", issue.location}, {"message", issue.message}});
    return doc.dump(2) + "\n";
}

ValidationReport parse_validation(std::string_view text) {
    const Json doc = parse_json(text, "<validation>");
    ValidationReport r;
    r.ok = bool_from_json(member(doc, "ok", ""), "/ok");
    r.determinism = bool_from_json(member(doc, "determinism", ""), "/determinism");
    r.positivity = bool_from_json(member(doc, "positivity", ""), "/positivity");
    const Json& issues = member(doc, "issues", "");
    if (!issues.is_array()) throw ParseError("/issues", "expected an array");
    for (std::size_t i = 0; i < issues.size(); ++i) {
        const std::string where = "/issues/" + std::to_string(i);
        r.issues.push_back({string_from_json(member(issues[i], "location", where), where + "/location"),
                            string_from_json(member(issues[i], "message", where), where + "/message")});
    }
    return r;
}

std::string verdict_to_json(const Verdict& v) {
    Json doc = Json::object();
    doc["kind"] = std::string(to_string(v.kind));
    doc["window"] = {v.window.first, v.window.last};
    doc["eq_tol"] = v.eq_tol;
    doc["strict_needed"] = v.strict_needed;
    doc["first_ahead"] = v.first_ahead;
    doc["second_ahead"] = v.second_ahead;
    return doc.dump(2) + "\n";
}

Verdict parse_verdict(std::string_view text) {
    const Json doc = parse_json(text, "<verdict>");
    const std::string kind = string_from_json(member(doc, "kind", ""), "/kind");
    Verdict v{VerdictKind::Incomparable, {0, 0}, 0.0, 0, {}, {}};
    bool known = false;
    for (auto k : {VerdictKind::Overtakes, VerdictKind::Overtaken, VerdictKind::WeaklyOvertakes,
                   VerdictKind::WeaklyOvertaken, VerdictKind::EqualOnWindow, VerdictKind::Incomparable})
        if (to_string(k) == kind) {
            v.kind = k;
            known = true;
        }
    if (!known) throw ParseError("/kind", "unknown verdict '" + kind + "'");
    const Json& window = member(doc, "window", "");
    if (!window.is_array() || window.size() != 2) throw ParseError("/window", "expected [first, last]");
    v.window = {index_from_json(window[0], "/window/0"), index_from_json(window[1], "/window/1")};
    v.eq_tol = number_from_json(member(doc, "eq_tol", ""), "/eq_tol");
    v.strict_needed = index_from_json(member(doc, "strict_needed", ""), "/strict_needed");
    for (const char* key : {"first_ahead", "second_ahead"}) {
        const Json& list = member(doc, key, "");
        const std::string where = std::string("/") + key;
        if (!list.is_array()) throw ParseError(where, "expected an array");
        auto& dest = std::string(key) == "first_ahead" ? v.first_ahead : v.second_ahead;
        for (std::size_t i = 0; i < list.size(); ++i)
            dest.push_back(index_from_json(list[i], where + "/" + std::to_string(i)));
    }
    return v;
}

std::string spectral_to_csv(const Mdp& mdp, const SpectralReport& report) {
    std::string out = "strategy_index,action_profile,lambda2,generic_gap\n";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        out += std::to_string(i) + "," + csv_field(action_profile(mdp, e.strategy)) + "," + format_number(e.lambda2) +
               "," + format_number(e.gap) + "\n";
    }
    out += "selected," + std::to_string(report.selected) + "," + (report.generic ? "generic" : "non-generic") + "," +
           format_number(report.min_gap) + "\n";
    return out;
}

SpectralTable parse_spectral_csv(std::string_view text) {
    SpectralTable table;
    bool summary = false;
    for (const auto& row : read_csv(text, "strategy_index,action_profile,lambda2,generic_gap", 4)) {
        if (summary) throw ParseError(row.where(), "rows after the summary row");
        const auto& f = row.fields;
        if (f[0] == "selected") {
            summary = true;
            table.selected = static_cast<std::size_t>(parse_number(f[1], row.where()));
            if (f[2] != "generic" && f[2] != "non-generic") throw ParseError(row.where(), "expected generic or non-generic");
            table.generic = f[2] == "generic";
            table.min_gap = parse_number(f[3], row.where());
            continue;
        }
        table.rows.push_back({static_cast<std::size_t>(parse_number(f[0], row.where())), f[1],
                              parse_number(f[2], row.where()), parse_number(f[3], row.where())});
    }
    if (!summary) throw ParseError("", "missing summary row");
    return table;
}

std::string loops_to_csv(const AverageMdp& avg, const LoopReport& report) {
    std::string out = "cycle,phi\n";
    for (const auto& loop : report.loops)
        out += csv_field(loop_label(avg, loop)) + "," + format_number(loop.phi) + "\n";
    out += "delta," + (report.delta ? format_number(*report.delta) : std::string("none")) + "\n";
    return out;
}

LoopTable parse_loops_csv(std::string_view text) {
    LoopTable table;
    bool summary = false;
    for (const auto& row : read_csv(text, "cycle,phi", 2)) {
        if (summary) throw ParseError(row.where(), "rows after the summary row");
        if (row.fields[0] == "delta") {
            summary = true;
            if (row.fields[1] != "none") table.delta = parse_number(row.fields[1], row.where());
            continue;
        }
        table.loops.emplace_back(row.fields[0], parse_number(row.fields[1], row.where()));
    }
    if (!summary) throw ParseError("", "missing delta row");
    return table;
}

std::string certificate_to_json(const Mdp& mdp, const HorizonCertificate& cert) {
    Json doc = Json::object();
    doc["sigma"] = strategy_json(mdp, cert.sigma);
    doc["sigma2"] = strategy_json(mdp, cert.sigma2);
    doc["lambda2_pair"] = {cert.lambda2_pair.first, cert.lambda2_pair.second};
    doc["c"] = cert.c;
    doc["c_tilde"] = cert.c_tilde;
    doc["m"] = cert.m;
    doc["T"] = cert.T;
    doc["diagonalizable"] = cert.diagonalizable;
    doc["entrywise"] = cert.entrywise;
    doc["verified_states"] = Json::array();
    for (std::size_t s : cert.verified_states) doc["verified_states"].push_back(mdp.state_name(s));
    doc["verified_window"] = {cert.verified_window.first, cert.verified_window.last};
    doc["verification"] = "passed";
    return doc.dump(2) + "\n";
}

HorizonCertificate parse_certificate(const Mdp& mdp, std::string_view text) {
    const std::string src = "<certificate>";
    const Json doc = parse_json(text, src);
    HorizonCertificate c;
    c.sigma = strategy_from_json(mdp, member(doc, "sigma", ""), src, "/sigma");
    c.sigma2 = strategy_from_json(mdp, member(doc, "sigma2", ""), src, "/sigma2");
    const Json& pair = member(doc, "lambda2_pair", "");
    if (!pair.is_array() || pair.size() != 2) throw ParseError("/lambda2_pair", "expected two numbers");
    c.lambda2_pair = {number_from_json(pair[0], "/lambda2_pair/0"), number_from_json(pair[1], "/lambda2_pair/1")};
    c.c = number_from_json(member(doc, "c", ""), "/c");
    c.c_tilde = number_from_json(member(doc, "c_tilde", ""), "/c_tilde");
    c.m = index_from_json(member(doc, "m", ""), "/m");
    c.T = index_from_json(member(doc, "T", ""), "/T");
    c.diagonalizable = bool_from_json(member(doc, "diagonalizable", ""), "/diagonalizable");
    c.entrywise = bool_from_json(member(doc, "entrywise", ""), "/entrywise");
    const Json& states = member(doc, "verified_states", "");
    if (!states.is_array()) throw ParseError("/verified_states", "expected an array");
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string where = "/verified_states/" + std::to_string(i);
        const auto s = mdp.find_state(string_from_json(states[i], where));
        if (!s) throw ParseError(where, "unknown state");
        c.verified_states.push_back(*s);
    }
    const Json& window = member(doc, "verified_window", "");
    if (!window.is_array() || window.size() != 2) throw ParseError("/verified_window", "expected [first, last]");
    c.verified_window = {index_from_json(window[0], "/verified_window/0"),
                         index_from_json(window[1], "/verified_window/1")};
    return c;
}

std::string claims_to_json(const std::vector<ClaimResult>& claims) {
    Json doc = Json::array();
    for (const auto& c : claims) {
        Json evidence = Json::object();
        for (const auto& e : c.evidence) evidence[e.name] = number_json(e.value);
        doc.push_back({{"id", c.id},
                       {"status", std::string(to_string(c.status))},
                       {"statement", c.statement},
                       {"evidence", evidence},
                       {"note", c.note}});
    }
    return doc.dump(2) + "\n";
}

std::vector<ClaimResult> parse_claims(std::string_view text) {
    const Json doc = parse_json(text, "<claims>");
    if (!doc.is_array()) throw ParseError("", "claim report must be an array");
    std::vector<ClaimResult> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string base = "/" + std::to_string(i);
        const Json& j = doc[i];
        ClaimResult c;
        c.id = string_from_json(member(j, "id", base), base + "/id");
        const std::string status = string_from_json(member(j, "status", base), base + "/status");
        if (status == "passed") c.status = ClaimStatus::Passed;
        else if (status == "failed") c.status = ClaimStatus::Failed;
        else if (status == "inconclusive") c.status = ClaimStatus::Inconclusive;
        else throw ParseError(base + "/status", "unknown status '" + status + "'");
        c.statement = string_from_json(member(j, "statement", base), base + "/statement");
        const Json& evidence = member(j, "evidence", base);
        if (!evidence.is_object()) throw ParseError(base + "/evidence", "expected an object");
        for (const auto& [name, value] : evidence.items())
            c.evidence.push_back({name, number_from_json(value, base + pointer({"evidence", name}))});
        c.note = string_from_json(member(j, "note", base), base + "/note");
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace overtaking
