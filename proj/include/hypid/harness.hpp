#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypid/arith.hpp"
#include "hypid/charpoly.hpp"
#include "hypid/hyp.hpp"
#include "hypid/transforms.hpp"

namespace hypid {

// Configuration of one randomized verification run. `identities` holds
// lower-case identity names (see all_identities()); empty means all of them.
struct RunConfig {
    std::uint64_t seed = 1;
    int draws = 50;
    int r_max = 3;
    int m_total_max = 5;
    double x_box = 0.45;
    double guard_band = 0.05;
    double rel_tol = 1e-6;
    long long term_cap = 1000000;
    std::vector<std::string> identities;
};

// Flat key = value text, one pair per line, '#' starts a comment. Unknown
// keys and malformed values raise ConstraintViolation (a config error).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Invariants: draws >= 1, 0 < x_box < 0.5, guard_band > 0, rel_tol > 0,
// 1 <= r_max <= m_total_max, term_cap >= 1, known identity names only.
void validate_config(const RunConfig& cfg);

// Draw-capable identity names in report order: the finite-argument family
// (mp1..limit_m1) followed by the unit-argument family (thm4..ex4).
const std::vector<std::string>& all_identities();

// One evaluated (or skipped) verification case. `params` is the full echo
// of every sampled parameter. pass == converged && rel_err <= tol; a case
// skipped after 100 guard-band resamples has pass == false but is counted
// separately from numeric failures.
struct CaseRecord {
    int index = 0;
    std::string identity;
    nlohmann::json params;
    Cx lhs{};
    Cx rhs{};
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tol = 0.0;
    long long terms_lhs = 0;
    long long terms_rhs = 0;
    bool converged = false;
    std::vector<std::string> flags;
    bool skipped = false;
    bool pass = false;
};

struct RunReport {
    std::vector<CaseRecord> cases;
    int count = 0;
    int passed = 0;
    int failed = 0;
    int skipped = 0;
    double max_rel_err = 0.0;     // over evaluated (non-skipped) cases
    double median_rel_err = 0.0;  // likewise
};

// Seeded randomized run over cfg.identities: per-identity RNG streams, one
// case per draw, guard-band resampling (at most 100 attempts, then the case
// is emitted with flags {"Skipped", <reason>}). Deterministic given cfg.
RunReport run_check(const RunConfig& cfg);

// Fixed corpus: every worked example identity at three pinned parameter
// sets each; tolerance 1e-8 for terminating/finite-argument forms, 1e-6 for
// non-terminating unit-argument forms.
RunReport run_golden();

// Process exit code for a report: 1 when any case failed numerically,
// otherwise 0 (skipped cases alone do not fail a run).
int report_exit_code(const RunReport& rep);

// JSON-lines rendering: one header object, one object per case, one summary
// object. Byte-identical for identical inputs. `header` is emitted first
// with the keys the caller provides (command, config, ...).
std::string render_report_jsonl(const RunReport& rep, const nlohmann::json& header);

// Compact CSV: header row, one row per case, trailing "# summary ..." line.
std::string render_report_csv(const RunReport& rep);

// Config echo used in report headers. `effective_cap` is the term cap after
// the environment override.
nlohmann::json config_json(const RunConfig& cfg, long long effective_cap);

// HYPID_TERM_CAP environment override: returns the parsed value when the
// variable is set (ConstraintViolation when it is not a positive integer),
// otherwise `configured`.
long long effective_term_cap(long long configured);

// Parsed "top;bottom;x" evaluation request: comma-separated real parameter
// lists (either may be empty) and a real argument.
struct EvalRequest {
    ParamVec top;
    ParamVec bottom;
    Cx x{};
};

// Strict parser for the eval expression; ParseError carries the 1-based
// offending position.
EvalRequest parse_eval_expr(const std::string& expr);

// Evaluates the request and formats value/terms_used/tail_bound/converged/
// max_partial one per line.
std::string format_eval(const EvalRequest& req, double rel_tol);

// One epsilon-perturbation study request. Lemma 1 perturbs c around
// b + m - q; lemma 2 around a + m - q (lemma 2 is the only user of `a`).
struct LimitsRequest {
    int lemma = 1;
    Cx a{};
    Cx b{};
    IpdSpec spec;
    int q = 0;
    std::vector<double> eps;  // empty -> {1e-3, 1e-4, 1e-5}
};

LimitStudy run_limits(const LimitsRequest& req);

// Long-format CSV (columns eps,field,index,re,im) and a single JSON object.
std::string render_limits_csv(const LimitsRequest& req, const LimitStudy& st);
std::string render_limits_json(const LimitsRequest& req, const LimitStudy& st);

}  // namespace hypid
