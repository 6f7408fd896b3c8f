#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ehcoop/model.hpp"
#include "ehcoop/scenarios.hpp"

namespace ehcoop::oracle {

enum class Aggregate { per_slot, prefix };
enum class Relation { le, ge };

/// Per-slot series a constraint side can refer to. Policy-dependent entries
/// are evaluated against the policy under check; trace entries are fixed.
enum class Series {
    tx_power,          // p_i
    decode_cost,       // decode energy of the policy rate, phi(r_i)
    rx_consumption,    // q_i
    helper_transfer,   // delta_i
    tx_harvest,        // E_i
    rx_harvest,        // receiver harvest
    rx_budget,         // receiver harvest + alpha * delta_i
    helper_harvest,    // H_i
};

struct Constraint {
    std::string name;
    Aggregate aggregate;
    Series lhs;
    Relation relation;
    Series rhs;
};

/// The constraint set of one scenario, bound to a trace and cost model.
struct ConstraintSystem {
    ScenarioKind scenario;
    EnergyTrace trace;
    CostModel cost;
    std::vector<Constraint> constraints;
};

ConstraintSystem make_constraint_system(ScenarioKind scenario,
                                        const EnergyTrace& trace,
                                        const CostModel& cost);

struct ConstraintSlack {
    std::string name;
    double min_slack = std::numeric_limits<double>::infinity();
    std::size_t argmin_slot = 0;     // 0-based slot/prefix attaining min_slack
    std::vector<double> slack;       // signed slack per slot
};

struct SlackReport {
    std::vector<ConstraintSlack> constraints;
    double min_slack = std::numeric_limits<double>::infinity();
    bool feasible(double tol = 1e-7) const { return min_slack >= -tol; }
};

/// Evaluates every constraint of the system on the policy and returns the
/// signed slacks (>= 0 means satisfied).
SlackReport check_feasible(const Policy& policy, const ConstraintSystem& system);

struct OracleResult {
    double objective = 0.0;
    Policy argmax;
    double grid_step = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    std::string note;
};

/// Ground-truth maximization of the scenario objective over the joint
/// decision variables (transmit powers and/or receiver consumptions, plus the
/// helper transfers), by projected-subgradient ascent from several
/// deterministic starts followed by a coordinate/pairwise grid polish at
/// resolution grid_step (refined further for coordinate accuracy). Intended
/// for desk-scale instances: throws std::invalid_argument when N > 5.
/// Deterministic for a fixed seed.
OracleResult brute_force(const ConstraintSystem& system, double grid_step,
                         std::uint64_t seed = 0x5eed5eedULL);

struct RandomTraceOptions {
    std::size_t n_min = 2;
    std::size_t n_max = 4;
    double energy_max = 10.0;
    std::vector<double> alphas = {0.0, 0.3, 0.7, 1.0};
};

/// Uniform random instance for property tests; deterministic given the
/// generator state.
EnergyTrace random_trace(std::mt19937_64& rng, const RandomTraceOptions& options = {});

}  // namespace ehcoop::oracle
