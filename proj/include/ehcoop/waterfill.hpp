#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ehcoop {

/// Staircase form of an allocation: maximal runs of equal per-slot values.
/// boundaries are 1-based run end indices (the last one equals N), with an
/// implicit 0 in front, so run n covers slots (boundaries[n-1], boundaries[n]]
/// in 1-based terms.
struct SegmentSchedule {
    std::vector<std::size_t> boundaries;
    std::vector<double> segment_levels;
    std::vector<double> per_slot;

    static SegmentSchedule from_per_slot(std::span<const double> values);
};

/// Allocation maximizing any fixed concave increasing per-slot objective
/// subject to cumulative causality: sum_{i<=j} x_i <= sum_{i<=j} budget_i.
/// Levels are non-decreasing, exhaust the total budget, and equalize as far
/// as causality permits. Throws std::invalid_argument on empty or negative
/// input.
SegmentSchedule staircase_levels(std::span<const double> budgets);

/// Same objective with an additional per-slot ceiling x_i <= cap_i. Saturated
/// slots sit at their cap; the rest of a segment shares a common level.
/// Budget may remain unused when caps bind. Caps may be +infinity.
SegmentSchedule capped_waterfill(std::span<const double> budgets,
                                 std::span<const double> caps);

/// One round of the slot-exclusion loop: which slots were still in the pool
/// and what level each of them got. Excluded slots carry their pinned floor
/// value in `level`.
struct ExclusionIteration {
    std::vector<bool> included;
    std::vector<double> level;
    std::vector<std::size_t> newly_excluded;
};

/// Bookkeeping of the exclusion loop. `excluded` is the final set of slots
/// pinned to their own harvest; `newly_excluded` is the last non-empty batch.
/// `effective_helper` is the helper energy after forwarding out of excluded
/// slots; its sum equals the original helper total (energy stranded on an
/// excluded suffix stays in place and is flagged as unusable).
struct ExclusionState {
    std::vector<std::size_t> excluded;
    std::vector<std::size_t> newly_excluded;
    std::vector<double> effective_helper;
    std::vector<ExclusionIteration> iterations;
};

struct MinFillResult {
    std::vector<double> levels;  // final per-slot receiver consumption
    ExclusionState state;
    std::vector<std::string> warnings;
};

/// Receiver-side fill with a per-slot floor: waterfill rx_energy + alpha *
/// helper_energy, repeatedly excluding every slot whose level falls below its
/// own harvest (those slots are pinned to it) and forwarding the helper
/// energy of excluded slots to the next included one, until stable. The
/// returned levels satisfy levels[i] >= rx_energy[i].
MinFillResult min_constrained_waterfill(std::span<const double> rx_energy,
                                        std::span<const double> helper_energy,
                                        double alpha);

/// Same exclusion loop with a per-slot ceiling on the inner fill (caps are in
/// receiver-energy units). A slot whose cap lies below its floor is pinned to
/// the floor and reported in `warnings`.
MinFillResult min_capped_waterfill(std::span<const double> rx_energy,
                                   std::span<const double> helper_energy,
                                   double alpha,
                                   std::span<const double> caps);

}  // namespace ehcoop
