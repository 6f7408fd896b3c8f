#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ehcoop {

/// Per-slot harvested energies of the transmitter, the receiver and the
/// helper, plus the helper->receiver transfer efficiency. Energies are
/// unit-less; slot indices are 0-based throughout the library.
struct EnergyTrace {
    std::size_t n_slots = 0;
    std::vector<double> tx_energy;      // E_i, harvested by the transmitter
    std::vector<double> rx_energy;      // harvested by the receiver
    std::vector<double> helper_energy;  // harvested by the helper
    double alpha = 1.0;                 // transfer efficiency, in [0, 1]
};

enum class CostModelKind {
    rate_half_log2,       // decode family fixed at beta = 1 (decode_inv == rate)
    scaled_inverse_rate,  // decode family with free scale beta > 0
};

/// Rate function and decoding-cost function pair.
///
///   rate(p)        = 1/2 * log2(1 + p)          [bits per channel use]
///   decode_cost(r) = beta * (2^(2r) - 1)        [energy to decode rate r]
///
/// so decode_inv(x) = rate(x / beta) and beta = 1 makes decode_inv identical
/// to rate. rate is increasing concave, decode_cost increasing convex, both
/// vanish at zero. Rates are reported in bits (base-2 log); schedules in the
/// power/energy domain do not depend on the log base.
class CostModel {
  public:
    CostModel(CostModelKind kind, double beta);

    double rate(double power) const;          // g
    double rate_inv(double rate_bits) const;  // g^-1
    double decode_cost(double rate_bits) const;   // phi
    double decode_inv(double energy) const;       // phi^-1

    CostModelKind kind() const { return kind_; }
    double beta() const { return beta_; }

  private:
    CostModelKind kind_;
    double beta_;
};

/// Factory for the built-in cost models. Throws std::invalid_argument when
/// beta <= 0 (or is not finite) for the scaled family.
CostModel builtin_cost_model(CostModelKind kind, double beta = 1.0);

/// One offline schedule: everything a node does in each slot.
struct Policy {
    std::vector<double> tx_power;         // p_i
    std::vector<double> rate;             // r_i, bits per use
    std::vector<double> rx_consumption;   // q_i, energy burnt decoding
    std::vector<double> helper_transfer;  // delta_i, helper -> receiver
};

/// Returns every violated trace invariant as a human-readable message;
/// empty means the trace is valid. Zero-energy slots are legal.
std::vector<std::string> validate_trace(const EnergyTrace& trace);

/// Throws std::invalid_argument listing all violations when the trace is
/// invalid. Solvers call this on entry.
void require_valid_trace(const EnergyTrace& trace);

}  // namespace ehcoop
