#include "ehcoop/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ehcoop {

CostModel::CostModel(CostModelKind kind, double beta) : kind_(kind), beta_(beta) {
    if (kind_ == CostModelKind::rate_half_log2) {
        beta_ = 1.0;
    }
    if (!(beta_ > 0.0) || !std::isfinite(beta_)) {
        throw std::invalid_argument("cost model: beta must be a positive finite real");
    }
}

double CostModel::rate(double power) const {
    return 0.5 * std::log2(1.0 + power);
}

double CostModel::rate_inv(double rate_bits) const {
    return std::exp2(2.0 * rate_bits) - 1.0;
}

double CostModel::decode_cost(double rate_bits) const {
    return beta_ * (std::exp2(2.0 * rate_bits) - 1.0);
}

double CostModel::decode_inv(double energy) const {
    return 0.5 * std::log2(1.0 + energy / beta_);
}

CostModel builtin_cost_model(CostModelKind kind, double beta) {
    return CostModel(kind, beta);
}

namespace {

void check_energy_list(const std::vector<double>& values, std::size_t n_slots,
                       const char* name, std::vector<std::string>& errors) {
    if (values.size() != n_slots) {
        std::ostringstream os;
        os << name << ": length " << values.size() << " does not match n_slots " << n_slots;
        errors.push_back(os.str());
        return;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            std::ostringstream os;
            os << name << "[" << i << "]: must be a non-negative finite real, got " << values[i];
            errors.push_back(os.str());
        }
    }
}

}  // namespace

std::vector<std::string> validate_trace(const EnergyTrace& trace) {
    std::vector<std::string> errors;
    if (trace.n_slots == 0) {
        errors.push_back("n_slots: must be a positive integer");
    }
    check_energy_list(trace.tx_energy, trace.n_slots, "tx_energy", errors);
    check_energy_list(trace.rx_energy, trace.n_slots, "rx_energy", errors);
    check_energy_list(trace.helper_energy, trace.n_slots, "helper_energy", errors);
    if (!std::isfinite(trace.alpha) || trace.alpha < 0.0 || trace.alpha > 1.0) {
        std::ostringstream os;
        os << "alpha out of range [0,1]: " << trace.alpha;
        errors.push_back(os.str());
    }
    return errors;
}

void require_valid_trace(const EnergyTrace& trace) {
    const auto errors = validate_trace(trace);
    if (errors.empty()) return;
    std::ostringstream os;
    os << "invalid trace";
    for (const auto& e : errors) os << "; " << e;
    throw std::invalid_argument(os.str());
}

}  // namespace ehcoop
