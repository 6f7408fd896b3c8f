#include "ehcoop/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ehcoop/oracle.hpp"
#include "ehcoop/trace_io.hpp"

namespace ehcoop::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;
constexpr double kFeasibilityTol = 1e-7;
constexpr std::size_t kOracleMaxSlots = 5;

int solve_command(const std::string& scenario_token, const std::string& input_path,
                  bool verify, std::uint64_t seed, const std::string& output_path,
                  const std::string& plot_path) {
    const auto scenario = parse_scenario(scenario_token);
    if (!scenario) {
        std::cerr << "error: unknown scenario '" << scenario_token
                  << "' (expected s1, s2, s3 or s4)\n";
        return kExitInputError;
    }

    std::optional<ParsedTrace> parsed_doc;
    try {
        parsed_doc = load_trace_file(input_path);
    } catch (const TraceParseError& e) {
        std::cerr << "error: " << input_path << ": " << e.what() << "\n";
        return kExitInputError;
    }
    const ParsedTrace& parsed = *parsed_doc;

    SolveReport report;
    report.scenario = *scenario;
    report.trace = parsed.trace;
    report.cost_kind = parsed.cost.kind();
    report.cost_beta = parsed.cost.beta();

    const auto t0 = std::chrono::steady_clock::now();
    Solution solution = solve(*scenario, parsed.trace, parsed.cost);
    const auto t1 = std::chrono::steady_clock::now();
    report.solve_wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.objective_bits = solution.objective_bits;
    report.policy = solution.policy;
    report.diagnostics = solution.diagnostics;

    const oracle::ConstraintSystem system =
        oracle::make_constraint_system(*scenario, parsed.trace, parsed.cost);
    const oracle::SlackReport slack = oracle::check_feasible(report.policy, system);
    for (const auto& c : slack.constraints) {
        report.slack_summary.emplace_back(c.name, c.min_slack);
    }
    const bool feasible = slack.feasible(kFeasibilityTol);
    if (!feasible) {
        report.diagnostics.push_back("computed policy violates a constraint (slack " +
                                     std::to_string(slack.min_slack) + ")");
    }

    bool verify_failed = false;
    if (verify) {
        VerificationResult v;
        v.min_slack = slack.min_slack;
        if (parsed.trace.n_slots <= kOracleMaxSlots) {
            v.mode = "oracle";
            const oracle::OracleResult ground =
                oracle::brute_force(system, 1e-3, seed);
            v.oracle_objective = ground.objective;
            v.gap = std::abs(ground.objective - solution.objective_bits);
            const double tol =
                std::max(1e-3, 1e-3 * std::abs(solution.objective_bits));
            const bool pass = feasible && *v.gap <= tol;
            v.verdict = pass ? "PASS" : "FAIL";
            if (!ground.converged) v.notes.push_back(ground.note);
        } else {
            v.mode = "feasibility-only";
            v.notes.push_back(
                "instance too large for the oracle; verified feasibility only");
            std::cerr << "warning: N > " << kOracleMaxSlots
                      << ", --verify downgraded to feasibility-only\n";
            v.verdict = feasible ? "PASS" : "FAIL";
        }
        verify_failed = v.verdict == "FAIL";
        report.verification = std::move(v);
    }

    const nlohmann::json j = report_to_json(report);
    if (output_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(output_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write output file: " << output_path << "\n";
            return kExitInputError;
        }
        out << j.dump(2) << "\n";
    }

    if (!plot_path.empty()) {
        std::ofstream plot(plot_path, std::ios::binary);
        if (!plot) {
            std::cerr << "error: cannot write plot-data file: " << plot_path << "\n";
            return kExitInputError;
        }
        write_plot_csv(report, plot);
    }

    if (!feasible || verify_failed) return kExitInfeasible;
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Offline energy-management policies for an energy-harvesting "
                 "link with a decoding-cost receiver and an energy-cooperating "
                 "helper"};
    app.name("solve");

    std::string scenario;
    std::string input_path;
    std::string output_path;
    std::string plot_path;
    bool verify = false;
    std::uint64_t seed = 0x5eed5eedULL;

    app.add_option("--scenario", scenario, "Scenario to solve: s1|s2|s3|s4")->required();
    app.add_option("--input", input_path, "Trace file (JSON)")->required();
    app.add_flag("--verify", verify,
                 "Check the policy against the independent oracle (N <= 5) or "
                 "feasibility only");
    app.add_option("--seed", seed, "Seed for the verification oracle");
    app.add_option("--output", output_path, "Write the report here (default: stdout)");
    app.add_option("--plot-data", plot_path, "Write step-series CSV here");

    // CLI11 wants argv-style arguments in reverse order.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        return solve_command(scenario, input_path, verify, seed, output_path, plot_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace ehcoop::cli
