#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ehcoop/model.hpp"
#include "ehcoop/oracle.hpp"
#include "ehcoop/scenarios.hpp"

namespace ehcoop {

/// Raised on malformed trace documents; the message names the offending
/// field (and index where applicable).
class TraceParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ParsedTrace {
    EnergyTrace trace;
    CostModel cost;
};

/// Parses a JSON trace document:
///   { "n_slots": 3, "tx_energy": [...], "rx_energy": [...],
///     "helper_energy": [...], "alpha": 0.7,
///     "cost_model": {"kind": "rate_half_log2"} }
/// cost_model.kind is "rate_half_log2" or "scaled_inverse_rate" (the latter
/// requires a positive "beta"). Throws TraceParseError with a field-addressed
/// message on any violation.
ParsedTrace parse_trace(const std::string& json_text);

/// parse_trace on a file's contents; file errors become TraceParseError.
ParsedTrace load_trace_file(const std::string& path);

struct VerificationResult {
    std::string verdict;   // "PASS" or "FAIL"
    std::string mode;      // "oracle" or "feasibility-only"
    double min_slack = 0.0;
    std::optional<double> oracle_objective;
    std::optional<double> gap;
    std::vector<std::string> notes;
};

struct SolveReport {
    ScenarioKind scenario = ScenarioKind::s1_both_batteries;
    double objective_bits = 0.0;
    EnergyTrace trace;
    CostModelKind cost_kind = CostModelKind::rate_half_log2;
    double cost_beta = 1.0;
    Policy policy;
    std::vector<std::pair<std::string, double>> slack_summary;  // name -> min slack
    std::optional<VerificationResult> verification;  // present iff --verify ran
    double solve_wall_ms = 0.0;
    std::vector<std::string> diagnostics;
};

/// Machine-readable report. Numbers survive a dump/parse round trip
/// bit-for-bit on the same platform.
nlohmann::json report_to_json(const SolveReport& report);

/// Step-series plot data as CSV (`series,x,y`): per-slot levels of the
/// transmit power and receiver consumption as step functions, and the
/// cumulative harvest curves of all three nodes at slot boundaries.
void write_plot_csv(const SolveReport& report, std::ostream& out);

}  // namespace ehcoop
