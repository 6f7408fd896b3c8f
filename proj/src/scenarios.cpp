#include "ehcoop/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ehcoop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> prefix_sums(std::span<const double> values) {
    std::vector<double> out(values.size());
    double running = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        running += values[i];
        out[i] = running;
    }
    return out;
}

double sum_of(std::span<const double> values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

Policy policy_from_rates(const std::vector<double>& rates, const CostModel& cost) {
    Policy p;
    p.rate = rates;
    p.tx_power.reserve(rates.size());
    p.rx_consumption.reserve(rates.size());
    for (double r : rates) {
        p.tx_power.push_back(cost.rate_inv(r));
        p.rx_consumption.push_back(cost.decode_cost(r));
    }
    p.helper_transfer.assign(rates.size(), 0.0);
    return p;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::s1_both_batteries: return "s1";
        case ScenarioKind::s2_fullpower_tx_nobatt_rx: return "s2";
        case ScenarioKind::s3_battery_tx_nobatt_rx: return "s3";
        case ScenarioKind::s4_no_batteries: return "s4";
    }
    return "?";
}

std::optional<ScenarioKind> parse_scenario(std::string_view token) {
    if (token == "s1") return ScenarioKind::s1_both_batteries;
    if (token == "s2") return ScenarioKind::s2_fullpower_tx_nobatt_rx;
    if (token == "s3") return ScenarioKind::s3_battery_tx_nobatt_rx;
    if (token == "s4") return ScenarioKind::s4_no_batteries;
    return std::nullopt;
}

// Two-resource staircase: each segment's rate is the smaller of the rate the
// remaining transmit energy supports on the window and the rate the remaining
// receiver-plus-transferred energy can decode; the window end is the argmin
// over candidate ends, smallest index on ties. Rates come out non-decreasing.
Solution solve_s1(const EnergyTrace& trace, const CostModel& cost) {
    require_valid_trace(trace);
    const std::size_t n = trace.n_slots;

    std::vector<double> rx_pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        rx_pool[i] = trace.rx_energy[i] + trace.alpha * trace.helper_energy[i];
    }
    const std::vector<double> cum_tx = prefix_sums(trace.tx_energy);
    const std::vector<double> cum_rx = prefix_sums(rx_pool);

    std::vector<double> rates(n, 0.0);
    double spent_tx = 0.0;
    double spent_rx = 0.0;
    std::size_t start = 0;
    while (start < n) {
        std::size_t best_end = start + 1;
        double best_rate = kInf;
        for (std::size_t end = start + 1; end <= n; ++end) {
            const double width = static_cast<double>(end - start);
            const double tx_avg = std::max(0.0, (cum_tx[end - 1] - spent_tx) / width);
            const double rx_avg = std::max(0.0, (cum_rx[end - 1] - spent_rx) / width);
            const double candidate = std::min(cost.rate(tx_avg), cost.decode_inv(rx_avg));
            if (candidate < best_rate) {
                best_rate = candidate;
                best_end = end;
            }
        }
        const double width = static_cast<double>(best_end - start);
        for (std::size_t i = start; i < best_end; ++i) rates[i] = best_rate;
        spent_tx += width * cost.rate_inv(best_rate);
        spent_rx += width * cost.decode_cost(best_rate);
        start = best_end;
    }

    Solution out;
    out.policy = policy_from_rates(rates, cost);
    out.policy.helper_transfer = trace.helper_energy;  // transfer on arrival
    out.objective_bits = sum_of(rates);
    out.segments = SegmentSchedule::from_per_slot(rates);
    return out;
}

Solution solve_s2(std::span<const double> rx_energy,
                  std::span<const double> helper_energy,
                  double alpha,
                  const CostModel& cost) {
    const MinFillResult fill = min_constrained_waterfill(rx_energy, helper_energy, alpha);
    const std::size_t n = rx_energy.size();

    if (alpha == 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (fill.levels[i] > rx_energy[i] + 1e-9 * (1.0 + rx_energy[i])) {
                throw std::logic_error(
                    "solve_s2: receiver consumption above its harvest with alpha = 0");
            }
        }
    }

    Solution out;
    out.diagnostics = fill.warnings;
    out.policy.rx_consumption = fill.levels;
    out.policy.rate.resize(n);
    out.policy.tx_power.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.policy.rate[i] = cost.decode_inv(fill.levels[i]);
        out.policy.tx_power[i] = cost.rate_inv(out.policy.rate[i]);
    }
    if (alpha > 0.0) {
        TransferSchedule ts =
            transfer_schedule(fill.levels, rx_energy, helper_energy, alpha);
        if (!ts.feasible) {
            throw std::logic_error("solve_s2: internal transfer schedule infeasible: " +
                                   ts.message);
        }
        out.policy.helper_transfer = std::move(ts.delta);
    } else {
        out.policy.helper_transfer.assign(n, 0.0);
    }
    out.objective_bits = sum_of(out.policy.rate);
    out.segments = SegmentSchedule::from_per_slot(fill.levels);
    return out;
}

Solution solve_s2(const EnergyTrace& trace, const CostModel& cost) {
    require_valid_trace(trace);
    return solve_s2(trace.rx_energy, trace.helper_energy, trace.alpha, cost);
}

namespace {

// Total rate of the transmit fill under the decode ceilings a helper plan
// supports.
double helper_plan_value(std::span<const double> tx, std::span<const double> rx,
                         double alpha, const CostModel& cost,
                         const std::vector<double>& plan,
                         std::vector<double>& caps_buf) {
    const std::size_t n = tx.size();
    caps_buf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        caps_buf[i] = cost.rate_inv(cost.decode_inv(rx[i] + alpha * plan[i]));
    }
    const SegmentSchedule fill = capped_waterfill(tx, caps_buf);
    double total = 0.0;
    for (double p : fill.per_slot) total += cost.rate(p);
    return total;
}

// Maximum of a concave function on [0, hi] by golden-section search.
template <typename F>
double golden_max(F&& f, double hi, double f_zero, double& best_value) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = 0.0, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    best_value = f_zero;
    double best_t = 0.0;
    const double f_hi = f(hi);
    if (f_hi > best_value) {
        best_value = f_hi;
        best_t = hi;
    }
    for (int it = 0; it < 80 && (b - a) > 1e-12 * (1.0 + hi); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
        const double fm = std::max(f1, f2);
        if (fm > best_value) {
            best_value = fm;
            best_t = f1 >= f2 ? x1 : x2;
        }
    }
    return best_t;
}

// The pass loop parks helper energy where its own rule sees no surplus, but
// a plan that under-feeds one ceiling to over-feed another can still win:
// the fill value is concave in the plan and the plan's feasible set
// {0 <= h, prefix h <= prefix H} has single-slot and pair-exchange edges, so
// exact line searches along those directions reach the optimum. Effort is
// bounded for large horizons, where the pass plan is already near-optimal.
void refine_helper_plan(std::span<const double> tx, std::span<const double> rx,
                        std::span<const double> helper_harvest, double alpha,
                        const CostModel& cost, std::vector<double>& plan) {
    const std::size_t n = tx.size();
    if (alpha == 0.0 || n < 2) return;
    if (n > 1024) return;  // at this scale the pass plan stands as computed

    std::vector<double> cum_harvest(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += helper_harvest[i];
        cum_harvest[i] = running;
    }
    const double scale = 1.0 + cum_harvest.back();

    std::vector<double> caps_buf;
    double value = helper_plan_value(tx, rx, alpha, cost, plan, caps_buf);

    const bool small = n <= 256;
    const std::size_t pair_window = small ? n : 4;
    const int max_sweeps = small ? 64 : 3;
    const double probe = 1e-7 * scale;

    std::vector<double> suffix_slack(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;

        // tightest remaining harvest slack at or after each slot
        double cum_plan = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cum_plan += plan[i];
            suffix_slack[i] = cum_harvest[i] - cum_plan;
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            suffix_slack[i] = std::min(suffix_slack[i], suffix_slack[i + 1]);
        }

        auto try_direction = [&](std::size_t take, std::size_t give, double t_max) {
            if (t_max <= 1e-12 * scale) return;
            auto eval = [&](double t) {
                if (give < n) plan[give] -= t;
                plan[take] += t;
                const double v = helper_plan_value(tx, rx, alpha, cost, plan, caps_buf);
                plan[take] -= t;
                if (give < n) plan[give] += t;
                return v;
            };
            if (eval(std::min(probe, t_max)) <= value + 1e-13 * (1.0 + value)) return;
            double best_v = value;
            const double t = golden_max(eval, t_max, value, best_v);
            if (t > 0.0 && best_v > value + 1e-13 * (1.0 + value)) {
                if (give < n) plan[give] = std::max(0.0, plan[give] - t);
                plan[take] += t;
                value = best_v;
                improved = true;
                double c = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    c += plan[k];
                    suffix_slack[k] = cum_harvest[k] - c;
                }
                for (std::size_t k = n - 1; k-- > 0;) {
                    suffix_slack[k] = std::min(suffix_slack[k], suffix_slack[k + 1]);
                }
            }
        };

        // draw unused harvest into a slot
        for (std::size_t i = 0; i < n; ++i) {
            try_direction(i, n, std::max(0.0, suffix_slack[i]));
        }
        // move plan energy between two slots
        for (std::size_t i = 0; i < n; ++i) {
            if (plan[i] <= 1e-12 * scale) continue;
            const std::size_t lo = pair_window >= i ? 0 : i - pair_window;
            const std::size_t hi = std::min(n - 1, i + pair_window);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                double t_max = plan[i];
                if (j < i) {
                    // earlier delivery raises the prefixes in [j, i)
                    double c = 0.0;
                    for (std::size_t k = 0; k < i; ++k) {
                        c += plan[k];
                        if (k >= j) t_max = std::min(t_max, cum_harvest[k] - c);
                    }
                }
                try_direction(j, i, std::max(0.0, t_max));
            }
        }
        if (!improved) break;
    }
}

}  // namespace

// Battery transmitter, storage-free receiver. Pass k solves the tail problem
// as if the transmitter were unlimited, compares it with what the transmit
// energy actually supports, and lets the helper hold back the surplus of slot
// k for slot k+1. The helper state is re-expressed after each pass as the
// transfer schedule realized by the tail solution, so later passes see only
// the energy still in play. The resulting helper plan is then refined by
// exact exchange line searches (see refine_helper_plan), and the final
// schedule waterfills the transmit energy against the per-slot decode
// ceilings the refined plan supports.
Solution solve_s3(const EnergyTrace& trace, const CostModel& cost) {
    require_valid_trace(trace);
    const std::size_t n = trace.n_slots;
    const double alpha = trace.alpha;
    const std::span<const double> tx(trace.tx_energy);
    const std::span<const double> rx(trace.rx_energy);

    Solution out;
    out.forwarded_helper_units.assign(n, 0.0);

    std::vector<double> helper(trace.helper_energy);
    if (alpha > 0.0) {
        // Decode ceilings in power units, full horizon: slots before the
        // current pass are frozen at the helper plan already decided for
        // them, slots from the pass on carry the current tail solution. The
        // inner fill must see the whole horizon so that transmit energy
        // banked before slot k still counts at slot k.
        std::vector<double> caps_power(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto rx_tail = rx.subspan(k);
            const std::span<const double> helper_tail{helper.data() + k, n - k};

            const MinFillResult tail = min_constrained_waterfill(rx_tail, helper_tail, alpha);

            for (std::size_t i = 0; i < n - k; ++i) {
                caps_power[k + i] = cost.rate_inv(cost.decode_inv(tail.levels[i]));
            }
            const SegmentSchedule inner = capped_waterfill(tx, caps_power);

            // Helper energy now earmarked per slot by the tail solution.
            for (std::size_t i = 0; i < n - k; ++i) {
                helper[k + i] = std::max(0.0, (tail.levels[i] - rx_tail[i]) / alpha);
            }

            const double decode_need = cost.decode_cost(cost.rate(inner.per_slot[k]));
            const double tail_budget = tail.levels[0];
            double saved;
            if (rx[k] < decode_need) {
                saved = std::max(0.0, tail_budget - decode_need) / alpha;
            } else {
                saved = std::max(0.0, tail_budget - rx[k]) / alpha;
            }
            if (k + 1 < n && saved > 0.0) {
                helper[k] = std::max(0.0, helper[k] - saved);
                helper[k + 1] += saved;
                out.forwarded_helper_units[k] = saved;
            }
            caps_power[k] = cost.rate_inv(cost.decode_inv(rx[k] + alpha * helper[k]));
        }
        refine_helper_plan(tx, rx, trace.helper_energy, alpha, cost, helper);
    }

    std::vector<double> caps_final(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double decodable = rx[i] + alpha * helper[i];
        caps_final[i] = cost.rate_inv(cost.decode_inv(decodable));
    }
    const SegmentSchedule final_fill = capped_waterfill(tx, caps_final);

    out.policy.tx_power = final_fill.per_slot;
    out.policy.rate.resize(n);
    out.policy.rx_consumption.resize(n);
    out.policy.helper_transfer.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.policy.rate[i] = cost.rate(final_fill.per_slot[i]);
        const double need = cost.decode_cost(out.policy.rate[i]);
        out.policy.rx_consumption[i] = std::max(need, rx[i]);
        if (alpha > 0.0) {
            out.policy.helper_transfer[i] =
                std::max(0.0, out.policy.rx_consumption[i] - rx[i]) / alpha;
        }
    }
    out.objective_bits = sum_of(out.policy.rate);
    out.segments = final_fill;
    return out;
}

Solution solve_s4(const EnergyTrace& trace, const CostModel& cost) {
    require_valid_trace(trace);
    const std::size_t n = trace.n_slots;
    const double alpha = trace.alpha;

    std::vector<double> caps_rx(n);
    for (std::size_t i = 0; i < n; ++i) {
        caps_rx[i] = cost.decode_cost(cost.rate(trace.tx_energy[i]));
    }
    const MinFillResult fill =
        min_capped_waterfill(trace.rx_energy, trace.helper_energy, alpha, caps_rx);

    Solution out;
    out.diagnostics = fill.warnings;
    out.policy.rate.resize(n);
    out.policy.tx_power.resize(n);
    out.policy.rx_consumption = fill.levels;
    out.policy.helper_transfer.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.policy.rate[i] =
            std::min(cost.rate(trace.tx_energy[i]), cost.decode_inv(fill.levels[i]));
        out.policy.tx_power[i] = cost.rate_inv(out.policy.rate[i]);
        if (alpha > 0.0) {
            out.policy.helper_transfer[i] =
                std::max(0.0, fill.levels[i] - trace.rx_energy[i]) / alpha;
        }
    }
    out.objective_bits = sum_of(out.policy.rate);
    out.segments = SegmentSchedule::from_per_slot(out.policy.tx_power);
    return out;
}

Solution solve(ScenarioKind kind, const EnergyTrace& trace, const CostModel& cost) {
    switch (kind) {
        case ScenarioKind::s1_both_batteries: return solve_s1(trace, cost);
        case ScenarioKind::s2_fullpower_tx_nobatt_rx: return solve_s2(trace, cost);
        case ScenarioKind::s3_battery_tx_nobatt_rx: return solve_s3(trace, cost);
        case ScenarioKind::s4_no_batteries: return solve_s4(trace, cost);
    }
    throw std::invalid_argument("solve: unknown scenario");
}

TransferSchedule transfer_schedule(std::span<const double> rx_consumption,
                                   std::span<const double> rx_energy,
                                   std::span<const double> helper_energy,
                                   double alpha) {
    const std::size_t n = rx_consumption.size();
    if (rx_energy.size() != n || helper_energy.size() != n) {
        throw std::invalid_argument("transfer_schedule: length mismatch");
    }

    TransferSchedule out;
    out.delta.assign(n, 0.0);

    if (alpha == 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (rx_consumption[i] > rx_energy[i] + 1e-9 * (1.0 + rx_energy[i])) {
                out.feasible = false;
                out.violating_prefix = i + 1;
                std::ostringstream os;
                os << "slot " << (i + 1) << " needs transferred energy but alpha = 0";
                out.message = os.str();
                return out;
            }
        }
        return out;
    }

    std::vector<double> demand(n);
    for (std::size_t i = 0; i < n; ++i) {
        demand[i] = std::max(0.0, rx_consumption[i] - rx_energy[i]) / alpha;
    }

    double cum_demand = 0.0;
    double cum_supply = 0.0;
    bool prefix_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        cum_demand += demand[i];
        cum_supply += helper_energy[i];
        if (cum_demand > cum_supply + 1e-9 * (1.0 + cum_supply)) prefix_ok = false;
    }
    if (prefix_ok) {
        out.delta = std::move(demand);
        return out;
    }
    if (cum_demand > cum_supply + 1e-9 * (1.0 + cum_supply)) {
        // Even serving everything as late as possible cannot cover the
        // demand; name the first prefix that already overruns the supply.
        double d = 0.0, s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            d += demand[j];
            s += helper_energy[j];
            if (d > s + 1e-9 * (1.0 + s)) {
                out.feasible = false;
                out.violating_prefix = j + 1;
                std::ostringstream os;
                os << "helper causality violated at prefix j=" << (j + 1)
                   << ": cumulative demand " << d << " exceeds cumulative harvest " << s;
                out.message = os.str();
                return out;
            }
        }
    }

    // Total demand fits; serve it as early as the helper's stock allows,
    // carrying unmet demand forward.
    double outstanding = 0.0;
    double stock = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stock += helper_energy[i];
        outstanding += demand[i];
        const double served = std::min(outstanding, stock);
        out.delta[i] = served;
        stock -= served;
        outstanding -= served;
    }
    out.shifted = true;
    out.message = "transfer demand shifted later to respect helper causality";
    return out;
}

}  // namespace ehcoop
