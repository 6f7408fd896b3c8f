#include "ehcoop/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ehcoop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw TraceParseError(message); }

double require_number(const json& doc, const char* field) {
    if (!doc.contains(field)) fail(std::string(field) + ": required");
    const json& v = doc.at(field);
    if (!v.is_number()) fail(std::string(field) + ": must be a number");
    return v.get<double>();
}

std::vector<double> require_energy_array(const json& doc, const char* field,
                                         std::size_t n_slots) {
    if (!doc.contains(field)) fail(std::string(field) + ": required");
    const json& v = doc.at(field);
    if (!v.is_array()) fail(std::string(field) + ": must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            std::ostringstream os;
            os << field << "[" << i << "]: must be a number";
            fail(os.str());
        }
        const double e = v[i].get<double>();
        if (!std::isfinite(e) || e < 0.0) {
            std::ostringstream os;
            os << field << "[" << i << "]: must be a non-negative finite number, got " << e;
            fail(os.str());
        }
        out.push_back(e);
    }
    if (out.size() != n_slots) {
        std::ostringstream os;
        os << field << ": length " << out.size() << " does not match n_slots " << n_slots;
        fail(os.str());
    }
    return out;
}

}  // namespace

ParsedTrace parse_trace(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("document: ") + e.what());
    }
    if (!doc.is_object()) fail("document: must be a JSON object");

    if (!doc.contains("n_slots")) fail("n_slots: required");
    if (!doc.at("n_slots").is_number_unsigned() || doc.at("n_slots").get<std::uint64_t>() == 0) {
        fail("n_slots: must be a positive integer");
    }
    EnergyTrace trace;
    trace.n_slots = doc.at("n_slots").get<std::size_t>();
    trace.tx_energy = require_energy_array(doc, "tx_energy", trace.n_slots);
    trace.rx_energy = require_energy_array(doc, "rx_energy", trace.n_slots);
    trace.helper_energy = require_energy_array(doc, "helper_energy", trace.n_slots);
    trace.alpha = require_number(doc, "alpha");
    if (trace.alpha < 0.0 || trace.alpha > 1.0 || !std::isfinite(trace.alpha)) {
        std::ostringstream os;
        os << "alpha: out of range [0,1], got " << trace.alpha;
        fail(os.str());
    }

    if (!doc.contains("cost_model")) fail("cost_model: required");
    const json& cm = doc.at("cost_model");
    if (!cm.is_object()) fail("cost_model: must be an object");
    if (!cm.contains("kind") || !cm.at("kind").is_string()) {
        fail("cost_model.kind: required string");
    }
    const std::string kind = cm.at("kind").get<std::string>();
    CostModelKind parsed_kind;
    double beta = 1.0;
    if (kind == "rate_half_log2") {
        parsed_kind = CostModelKind::rate_half_log2;
    } else if (kind == "scaled_inverse_rate") {
        parsed_kind = CostModelKind::scaled_inverse_rate;
        if (!cm.contains("beta")) fail("cost_model.beta: required for scaled_inverse_rate");
        if (!cm.at("beta").is_number()) fail("cost_model.beta: must be a number");
        beta = cm.at("beta").get<double>();
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            fail("cost_model.beta: must be a positive finite number");
        }
    } else {
        fail("cost_model.kind: must be \"rate_half_log2\" or \"scaled_inverse_rate\"");
    }

    const auto violations = validate_trace(trace);
    if (!violations.empty()) fail(violations.front());

    return ParsedTrace{std::move(trace), builtin_cost_model(parsed_kind, beta)};
}

ParsedTrace load_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_trace(buffer.str());
}

nlohmann::json report_to_json(const SolveReport& report) {
    json slots = json::array();
    for (std::size_t i = 0; i < report.trace.n_slots; ++i) {
        slots.push_back({
            {"slot", i + 1},
            {"tx_energy", report.trace.tx_energy[i]},
            {"rx_energy", report.trace.rx_energy[i]},
            {"helper_energy", report.trace.helper_energy[i]},
            {"tx_power", report.policy.tx_power[i]},
            {"rate_bits", report.policy.rate[i]},
            {"rx_consumption", report.policy.rx_consumption[i]},
            {"helper_transfer", report.policy.helper_transfer[i]},
        });
    }
    json slack = json::object();
    for (const auto& [name, value] : report.slack_summary) slack[name] = value;

    json cost = {{"kind", report.cost_kind == CostModelKind::rate_half_log2
                              ? "rate_half_log2"
                              : "scaled_inverse_rate"}};
    if (report.cost_kind == CostModelKind::scaled_inverse_rate) {
        cost["beta"] = report.cost_beta;
    }

    json out = {
        {"scenario", to_string(report.scenario)},
        {"n_slots", report.trace.n_slots},
        {"alpha", report.trace.alpha},
        {"cost_model", cost},
        {"objective_bits", report.objective_bits},
        {"slots", slots},
        {"slack_summary", slack},
        {"solve_wall_ms", report.solve_wall_ms},
        {"diagnostics", report.diagnostics},
    };
    if (report.verification) {
        const VerificationResult& v = *report.verification;
        json jv = {
            {"verdict", v.verdict},
            {"mode", v.mode},
            {"min_slack", v.min_slack},
            {"notes", v.notes},
        };
        if (v.oracle_objective) jv["oracle_objective"] = *v.oracle_objective;
        if (v.gap) jv["gap"] = *v.gap;
        out["verification"] = jv;
    }
    return out;
}

void write_plot_csv(const SolveReport& report, std::ostream& out) {
    out << "series,x,y\n";
    const std::size_t n = report.trace.n_slots;
    const auto step_series = [&](const char* name, const std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i) {
            out << name << "," << i << "," << v[i] << "\n";
            out << name << "," << (i + 1) << "," << v[i] << "\n";
        }
    };
    step_series("tx_power", report.policy.tx_power);
    step_series("rx_consumption", report.policy.rx_consumption);

    const auto cumulative_series = [&](const char* name, const std::vector<double>& v) {
        double running = 0.0;
        out << name << ",0,0\n";
        for (std::size_t i = 0; i < n; ++i) {
            running += v[i];
            out << name << "," << (i + 1) << "," << running << "\n";
        }
    };
    cumulative_series("cum_tx_energy", report.trace.tx_energy);
    cumulative_series("cum_rx_energy", report.trace.rx_energy);
    cumulative_series("cum_helper_energy", report.trace.helper_energy);
}

}  // namespace ehcoop
