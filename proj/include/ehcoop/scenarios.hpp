#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ehcoop/model.hpp"
#include "ehcoop/waterfill.hpp"

namespace ehcoop {

enum class ScenarioKind {
    s1_both_batteries,        // transmitter and receiver both store energy
    s2_fullpower_tx_nobatt_rx,  // unlimited transmit energy, storage-free receiver
    s3_battery_tx_nobatt_rx,  // battery at the transmitter only
    s4_no_batteries,          // neither end stores energy
};

std::string to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario(std::string_view token);

/// Result of one solve. `objective_bits` is the sum of per-slot rates.
/// `segments` is the staircase of the scenario's primary quantity (rates for
/// the two-battery case, receiver consumption for the full-power case,
/// transmit power otherwise). `forwarded_helper_units` is filled by the
/// battery-transmitter solver only: the helper energy its pass k pushed from
/// slot k to slot k+1.
struct Solution {
    Policy policy;
    double objective_bits = 0.0;
    SegmentSchedule segments;
    std::vector<std::string> diagnostics;
    std::vector<double> forwarded_helper_units;
};

/// Both nodes have batteries: two-resource staircase. The helper transfers
/// everything as soon as it is harvested (delta_i = H_i); the receiver
/// battery absorbs it.
Solution solve_s1(const EnergyTrace& trace, const CostModel& cost);

/// Full-power transmitter, storage-free receiver. Transmitter inputs are
/// ignored entirely.
Solution solve_s2(std::span<const double> rx_energy,
                  std::span<const double> helper_energy,
                  double alpha,
                  const CostModel& cost);
Solution solve_s2(const EnergyTrace& trace, const CostModel& cost);

/// Battery transmitter, storage-free receiver.
Solution solve_s3(const EnergyTrace& trace, const CostModel& cost);

/// No batteries at either end.
Solution solve_s4(const EnergyTrace& trace, const CostModel& cost);

Solution solve(ScenarioKind kind, const EnergyTrace& trace, const CostModel& cost);

/// Helper transfer schedule for a given receiver consumption: delta_i =
/// (q_i - rx_i)+ / alpha, with demand shifted later (earliest feasible slot)
/// when the helper has not harvested enough yet. Infeasible total demand
/// reports the violating prefix.
struct TransferSchedule {
    std::vector<double> delta;
    bool feasible = true;
    std::size_t violating_prefix = 0;  // 1-based prefix j when infeasible, else 0
    bool shifted = false;              // some demand was served after its slot
    std::string message;
};

TransferSchedule transfer_schedule(std::span<const double> rx_consumption,
                                   std::span<const double> rx_energy,
                                   std::span<const double> helper_energy,
                                   double alpha);

}  // namespace ehcoop
