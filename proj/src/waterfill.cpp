#include "ehcoop/waterfill.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ehcoop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_non_negative(std::span<const double> values, const char* name) {
    for (double v : values) {
        if (std::isnan(v) || v < 0.0) {
            std::ostringstream os;
            os << name << ": entries must be non-negative, got " << v;
            throw std::invalid_argument(os.str());
        }
    }
}

// Core staircase fill: given per-slot budget increments, returns levels that
// equalize as much as forward-only flow allows. Equivalent to the slopes of
// the greatest convex minorant of the cumulative budget curve, computed with
// a monotone segment stack. An earlier segment with a higher running average
// spills into the next one until levels are non-decreasing.
std::vector<double> staircase_core(std::span<const double> increments) {
    struct Segment {
        std::size_t count;
        double total;
    };
    std::vector<Segment> stack;
    stack.reserve(increments.size());
    for (double b : increments) {
        stack.push_back({1, b});
        while (stack.size() >= 2) {
            const Segment& prev = stack[stack.size() - 2];
            const Segment& top = stack.back();
            if (prev.total * static_cast<double>(top.count) <
                top.total * static_cast<double>(prev.count)) {
                break;  // prev level < top level: already non-decreasing
            }
            Segment merged{prev.count + top.count, prev.total + top.total};
            stack.pop_back();
            stack.back() = merged;
        }
    }
    std::vector<double> levels;
    levels.reserve(increments.size());
    for (const Segment& s : stack) {
        const double level = std::max(0.0, s.total / static_cast<double>(s.count));
        levels.insert(levels.end(), s.count, level);
    }
    return levels;
}

}  // namespace

SegmentSchedule SegmentSchedule::from_per_slot(std::span<const double> values) {
    SegmentSchedule out;
    out.per_slot.assign(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 == values.size() || values[i + 1] != values[i]) {
            out.boundaries.push_back(i + 1);
            out.segment_levels.push_back(values[i]);
        }
    }
    return out;
}

SegmentSchedule staircase_levels(std::span<const double> budgets) {
    if (budgets.empty()) {
        throw std::invalid_argument("staircase_levels: empty input");
    }
    check_non_negative(budgets, "staircase_levels");
    return SegmentSchedule::from_per_slot(staircase_core(budgets));
}

SegmentSchedule capped_waterfill(std::span<const double> budgets,
                                 std::span<const double> caps) {
    if (budgets.size() != caps.size()) {
        throw std::invalid_argument("capped_waterfill: budgets/caps length mismatch");
    }
    if (budgets.empty()) {
        throw std::invalid_argument("capped_waterfill: empty input");
    }
    check_non_negative(budgets, "capped_waterfill budgets");
    check_non_negative(caps, "capped_waterfill caps");

    const std::size_t n = budgets.size();
    std::vector<double> cumulative(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += budgets[i];
        cumulative[i] = running;
    }

    std::vector<double> allocation(n, 0.0);
    std::vector<bool> saturated(n, false);

    // Clip-and-refill: waterfill the slots that are not pinned at their cap,
    // pin every slot whose level exceeds its cap, repeat. Pinning a slot only
    // raises the water elsewhere, so pinned slots never need to come back.
    std::vector<std::size_t> active;
    std::vector<double> bound;       // cumulative budget usable by active prefix
    std::vector<double> increments;
    for (std::size_t round = 0; round < n + 1; ++round) {
        active.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (!saturated[i]) active.push_back(i);
        }
        if (active.empty()) break;

        // Cumulative bound for each active prefix: the tightest causality
        // constraint between this active slot and the next one, net of the
        // energy consumed at saturated slots.
        bound.assign(active.size(), kInf);
        double pinned_so_far = 0.0;
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (saturated[j]) pinned_so_far += caps[j];
            if (k < active.size() && j == active[k]) ++k;
            if (k > 0) {
                bound[k - 1] = std::min(bound[k - 1], cumulative[j] - pinned_so_far);
            }
        }
        // A tighter constraint later in time also binds earlier prefixes.
        for (std::size_t idx = bound.size(); idx-- > 1;) {
            bound[idx - 1] = std::min(bound[idx - 1], bound[idx]);
        }
        increments.assign(bound.size(), 0.0);
        double prev = 0.0;
        for (std::size_t idx = 0; idx < bound.size(); ++idx) {
            increments[idx] = std::max(0.0, bound[idx] - prev);
            prev = bound[idx];
        }

        const std::vector<double> levels = staircase_core(increments);
        bool clipped = false;
        for (std::size_t idx = 0; idx < active.size(); ++idx) {
            const std::size_t slot = active[idx];
            if (levels[idx] > caps[slot]) {
                saturated[slot] = true;
                allocation[slot] = caps[slot];
                clipped = true;
            } else {
                allocation[slot] = levels[idx];
            }
        }
        if (!clipped) break;
    }

    return SegmentSchedule::from_per_slot(allocation);
}

namespace {

// Shared engine of the floor-constrained fills. `caps` may be empty (no
// ceiling). Excluded slots consume exactly their own harvest and pass their
// helper energy to the next included slot.
MinFillResult exclusion_fill(std::span<const double> rx_energy,
                             std::span<const double> helper_energy,
                             double alpha,
                             std::span<const double> caps) {
    const std::size_t n = rx_energy.size();
    if (n == 0) throw std::invalid_argument("waterfill: empty input");
    if (helper_energy.size() != n) {
        throw std::invalid_argument("waterfill: rx/helper length mismatch");
    }
    if (!caps.empty() && caps.size() != n) {
        throw std::invalid_argument("waterfill: rx/caps length mismatch");
    }
    check_non_negative(rx_energy, "rx_energy");
    check_non_negative(helper_energy, "helper_energy");
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("waterfill: alpha out of range [0,1]");
    }

    MinFillResult result;
    result.levels.assign(rx_energy.begin(), rx_energy.end());

    std::vector<bool> excluded(n, false);
    std::vector<double> effective(n, 0.0);
    std::vector<std::size_t> sub_index;
    std::vector<double> sub_budget;
    std::vector<double> sub_caps;
    bool suffix_warned = false;

    if (!caps.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (caps[i] < rx_energy[i]) {
                std::ostringstream os;
                os << "slot " << (i + 1) << ": ceiling " << caps[i]
                   << " is below the receiver floor " << rx_energy[i]
                   << "; slot pinned to its own harvest";
                result.warnings.push_back(os.str());
            }
        }
    }

    for (std::size_t round = 0; round <= n; ++round) {
        // Forward the helper energy of excluded slots to the first included
        // slot after them (chains of excluded slots all feed the same one).
        // An excluded suffix has nowhere to send it; that energy stays put.
        effective.assign(helper_energy.begin(), helper_energy.end());
        std::vector<std::size_t> next_included(n + 1, n);
        for (std::size_t i = n; i-- > 0;) {
            next_included[i] = excluded[i] ? next_included[i + 1] : i;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!excluded[i] || effective[i] <= 0.0) continue;
            const std::size_t j = next_included[i + 1];
            if (j < n) {
                effective[j] += effective[i];
                effective[i] = 0.0;
            } else {
                suffix_warned = true;
            }
        }

        sub_index.clear();
        sub_budget.clear();
        sub_caps.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (excluded[i]) continue;
            sub_index.push_back(i);
            sub_budget.push_back(rx_energy[i] + alpha * effective[i]);
            if (!caps.empty()) sub_caps.push_back(caps[i]);
        }
        if (sub_index.empty()) break;

        std::vector<double> fill;
        if (caps.empty()) {
            fill = staircase_levels(sub_budget).per_slot;
        } else {
            fill = capped_waterfill(sub_budget, sub_caps).per_slot;
        }

        ExclusionIteration record;
        record.included.assign(n, false);
        record.level = result.levels;
        for (std::size_t k = 0; k < sub_index.size(); ++k) {
            record.included[sub_index[k]] = true;
            record.level[sub_index[k]] = fill[k];
        }
        for (std::size_t k = 0; k < sub_index.size(); ++k) {
            const std::size_t slot = sub_index[k];
            const double floor = rx_energy[slot];
            if (fill[k] < floor - 1e-12 * (1.0 + floor)) {
                record.newly_excluded.push_back(slot);
            }
        }
        result.state.iterations.push_back(record);

        for (std::size_t k = 0; k < sub_index.size(); ++k) {
            result.levels[sub_index[k]] = fill[k];
        }
        if (record.newly_excluded.empty()) break;
        for (std::size_t slot : record.newly_excluded) {
            excluded[slot] = true;
            result.levels[slot] = rx_energy[slot];
        }
        result.state.newly_excluded = record.newly_excluded;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (excluded[i]) {
            result.levels[i] = rx_energy[i];
            result.state.excluded.push_back(i);
        }
    }
    result.state.effective_helper = effective;
    if (suffix_warned) {
        double stranded = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (excluded[i]) stranded += effective[i];
        }
        if (stranded > 0.0) {
            std::ostringstream os;
            os << "helper energy on the excluded tail (" << stranded
               << " units) has no later slot to serve and stays unused";
            result.warnings.push_back(os.str());
        }
    }
    return result;
}

}  // namespace

MinFillResult min_constrained_waterfill(std::span<const double> rx_energy,
                                        std::span<const double> helper_energy,
                                        double alpha) {
    return exclusion_fill(rx_energy, helper_energy, alpha, {});
}

MinFillResult min_capped_waterfill(std::span<const double> rx_energy,
                                   std::span<const double> helper_energy,
                                   double alpha,
                                   std::span<const double> caps) {
    if (caps.empty()) {
        throw std::invalid_argument("min_capped_waterfill: caps must be provided");
    }
    return exclusion_fill(rx_energy, helper_energy, alpha, caps);
}

}  // namespace ehcoop
