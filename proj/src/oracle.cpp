#include "ehcoop/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ehcoop::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> prefix_sums(const std::vector<double>& values) {
    std::vector<double> out(values.size());
    double running = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        running += values[i];
        out[i] = running;
    }
    return out;
}

}  // namespace

ConstraintSystem make_constraint_system(ScenarioKind scenario,
                                        const EnergyTrace& trace,
                                        const CostModel& cost) {
    require_valid_trace(trace);
    ConstraintSystem sys{scenario, trace, cost, {}};
    auto add = [&sys](const char* name, Aggregate agg, Series lhs, Relation rel, Series rhs) {
        sys.constraints.push_back({name, agg, lhs, rel, rhs});
    };
    switch (scenario) {
        case ScenarioKind::s1_both_batteries:
            add("tx_causality", Aggregate::prefix, Series::tx_power, Relation::le,
                Series::tx_harvest);
            add("rx_causality", Aggregate::prefix, Series::decode_cost, Relation::le,
                Series::rx_budget);
            add("helper_causality", Aggregate::prefix, Series::helper_transfer, Relation::le,
                Series::helper_harvest);
            break;
        case ScenarioKind::s2_fullpower_tx_nobatt_rx:
            add("rx_floor", Aggregate::per_slot, Series::rx_consumption, Relation::ge,
                Series::rx_harvest);
            add("rx_causality", Aggregate::prefix, Series::rx_consumption, Relation::le,
                Series::rx_budget);
            add("helper_causality", Aggregate::prefix, Series::helper_transfer, Relation::le,
                Series::helper_harvest);
            break;
        case ScenarioKind::s3_battery_tx_nobatt_rx:
            add("tx_causality", Aggregate::prefix, Series::tx_power, Relation::le,
                Series::tx_harvest);
            add("rx_causality", Aggregate::prefix, Series::rx_consumption, Relation::le,
                Series::rx_budget);
            add("helper_causality", Aggregate::prefix, Series::helper_transfer, Relation::le,
                Series::helper_harvest);
            add("rx_floor", Aggregate::per_slot, Series::rx_consumption, Relation::ge,
                Series::rx_harvest);
            add("decode_within_consumption", Aggregate::per_slot, Series::decode_cost,
                Relation::le, Series::rx_consumption);
            break;
        case ScenarioKind::s4_no_batteries:
            add("tx_slot_cap", Aggregate::per_slot, Series::tx_power, Relation::le,
                Series::tx_harvest);
            add("rx_causality", Aggregate::prefix, Series::rx_consumption, Relation::le,
                Series::rx_budget);
            add("helper_causality", Aggregate::prefix, Series::helper_transfer, Relation::le,
                Series::helper_harvest);
            add("rx_floor", Aggregate::per_slot, Series::rx_consumption, Relation::ge,
                Series::rx_harvest);
            add("decode_within_consumption", Aggregate::per_slot, Series::decode_cost,
                Relation::le, Series::rx_consumption);
            break;
    }
    return sys;
}

namespace {

std::vector<double> series_values(Series series, const Policy& policy,
                                  const ConstraintSystem& sys) {
    const std::size_t n = sys.trace.n_slots;
    std::vector<double> out(n);
    switch (series) {
        case Series::tx_power: return policy.tx_power;
        case Series::rx_consumption: return policy.rx_consumption;
        case Series::helper_transfer: return policy.helper_transfer;
        case Series::tx_harvest: return sys.trace.tx_energy;
        case Series::rx_harvest: return sys.trace.rx_energy;
        case Series::helper_harvest: return sys.trace.helper_energy;
        case Series::decode_cost:
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = sys.cost.decode_cost(policy.rate[i]);
            }
            return out;
        case Series::rx_budget:
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = sys.trace.rx_energy[i] +
                         sys.trace.alpha * policy.helper_transfer[i];
            }
            return out;
    }
    throw std::logic_error("series_values: unknown series");
}

}  // namespace

SlackReport check_feasible(const Policy& policy, const ConstraintSystem& system) {
    const std::size_t n = system.trace.n_slots;
    if (policy.tx_power.size() != n || policy.rate.size() != n ||
        policy.rx_consumption.size() != n || policy.helper_transfer.size() != n) {
        throw std::invalid_argument("check_feasible: policy length mismatch");
    }
    SlackReport report;
    for (const Constraint& c : system.constraints) {
        const std::vector<double> lhs = series_values(c.lhs, policy, system);
        const std::vector<double> rhs = series_values(c.rhs, policy, system);
        ConstraintSlack cs;
        cs.name = c.name;
        cs.slack.resize(n);
        double cum_lhs = 0.0, cum_rhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double l = lhs[j], r = rhs[j];
            if (c.aggregate == Aggregate::prefix) {
                cum_lhs += l;
                cum_rhs += r;
                l = cum_lhs;
                r = cum_rhs;
            }
            const double slack = (c.relation == Relation::le) ? r - l : l - r;
            cs.slack[j] = slack;
            if (slack < cs.min_slack) {
                cs.min_slack = slack;
                cs.argmin_slot = j;
            }
        }
        report.min_slack = std::min(report.min_slack, cs.min_slack);
        report.constraints.push_back(std::move(cs));
    }
    return report;
}

// ---------------------------------------------------------------------------
// brute_force: generic concave ascent over the joint decision variables.
// The decode family makes every constraint linear in the variables
// (decode_cost(rate(p)) == beta * p), so the feasible set is an explicit list
// of halfspaces plus the non-negative orthant, and projection can be done
// with Dykstra's alternating method. The smooth concave objective is then
// maximized by projected (sub)gradient ascent, and the result is polished by
// a deterministic hill climb over single-coordinate, pairwise-transfer and
// coupled directions with a geometrically shrinking step.
// ---------------------------------------------------------------------------

namespace {

struct VarLayout {
    std::size_t n = 0;
    bool has_p = false;
    bool has_q = false;
    std::size_t dim() const {
        return ((has_p ? 1u : 0u) + (has_q ? 1u : 0u) + 1u) * n;
    }
    std::size_t p(std::size_t i) const { return i; }
    std::size_t q(std::size_t i) const { return (has_p ? n : 0) + i; }
    std::size_t d(std::size_t i) const {
        return ((has_p ? 1u : 0u) + (has_q ? 1u : 0u)) * n + i;
    }
};

struct Halfspace {
    std::vector<double> a;
    double b = 0.0;
    double norm2 = 0.0;
};

struct AscentProblem {
    const ConstraintSystem* sys = nullptr;
    VarLayout layout;
    std::vector<Halfspace> halfspaces;
    double alpha = 0.0;
    double beta = 1.0;
    double scale = 1.0;  // rough magnitude of the energies involved

    double value(const std::vector<double>& x) const {
        double total = 0.0;
        if (layout.has_p) {
            for (std::size_t i = 0; i < layout.n; ++i) {
                total += sys->cost.rate(std::max(0.0, x[layout.p(i)]));
            }
        } else {
            for (std::size_t i = 0; i < layout.n; ++i) {
                total += sys->cost.decode_inv(std::max(0.0, x[layout.q(i)]));
            }
        }
        return total;
    }

    void gradient(const std::vector<double>& x, std::vector<double>& g) const {
        std::fill(g.begin(), g.end(), 0.0);
        constexpr double kHalfLn2Inv = 0.72134752044448170368;  // 1 / (2 ln 2)
        if (layout.has_p) {
            for (std::size_t i = 0; i < layout.n; ++i) {
                g[layout.p(i)] = kHalfLn2Inv / (1.0 + std::max(0.0, x[layout.p(i)]));
            }
        } else {
            for (std::size_t i = 0; i < layout.n; ++i) {
                g[layout.q(i)] = kHalfLn2Inv / (beta + std::max(0.0, x[layout.q(i)]));
            }
        }
    }

    double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (double v : x) worst = std::max(worst, -v);
        for (const Halfspace& h : halfspaces) {
            double lhs = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) lhs += h.a[k] * x[k];
            worst = std::max(worst, lhs - h.b);
        }
        return worst;
    }
};

void add_halfspace(AscentProblem& prob, std::vector<double> a, double b) {
    double norm2 = 0.0;
    for (double v : a) norm2 += v * v;
    if (norm2 == 0.0) return;
    prob.halfspaces.push_back({std::move(a), b, norm2});
}

AscentProblem build_problem(const ConstraintSystem& sys) {
    AscentProblem prob;
    prob.sys = &sys;
    prob.alpha = sys.trace.alpha;
    prob.beta = sys.cost.beta();
    const std::size_t n = sys.trace.n_slots;
    prob.layout.n = n;
    switch (sys.scenario) {
        case ScenarioKind::s1_both_batteries:
            prob.layout.has_p = true;
            break;
        case ScenarioKind::s2_fullpower_tx_nobatt_rx:
            prob.layout.has_q = true;
            break;
        case ScenarioKind::s3_battery_tx_nobatt_rx:
        case ScenarioKind::s4_no_batteries:
            prob.layout.has_p = true;
            prob.layout.has_q = true;
            break;
    }
    const VarLayout& L = prob.layout;
    const std::size_t dim = L.dim();
    const std::vector<double> cum_tx = prefix_sums(sys.trace.tx_energy);
    const std::vector<double> cum_rx = prefix_sums(sys.trace.rx_energy);
    const std::vector<double> cum_h = prefix_sums(sys.trace.helper_energy);
    prob.scale = std::max({1.0, cum_tx.back(), cum_rx.back(), cum_h.back()});

    const bool per_slot_tx = sys.scenario == ScenarioKind::s4_no_batteries;
    const bool has_floor = !(sys.scenario == ScenarioKind::s1_both_batteries);

    if (L.has_p) {
        if (per_slot_tx) {
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> a(dim, 0.0);
                a[L.p(i)] = 1.0;
                add_halfspace(prob, std::move(a), sys.trace.tx_energy[i]);
            }
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<double> a(dim, 0.0);
                for (std::size_t i = 0; i <= j; ++i) a[L.p(i)] = 1.0;
                add_halfspace(prob, std::move(a), cum_tx[j]);
            }
        }
    }
    if (L.has_p && L.has_q) {
        // decode need never exceeds what the receiver burns
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> a(dim, 0.0);
            a[L.p(i)] = prob.beta;
            a[L.q(i)] = -1.0;
            add_halfspace(prob, std::move(a), 0.0);
        }
    }
    if (L.has_q && has_floor) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> a(dim, 0.0);
            a[L.q(i)] = -1.0;
            add_halfspace(prob, std::move(a), -sys.trace.rx_energy[i]);
        }
    }
    // receiver causality: consumption within harvested + transferred energy
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> a(dim, 0.0);
        for (std::size_t i = 0; i <= j; ++i) {
            if (L.has_q) {
                a[L.q(i)] = 1.0;
            } else {
                a[L.p(i)] = prob.beta;  // S1: burn equals decode need
            }
            a[L.d(i)] = -prob.alpha;
        }
        add_halfspace(prob, std::move(a), cum_rx[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> a(dim, 0.0);
        for (std::size_t i = 0; i <= j; ++i) a[L.d(i)] = 1.0;
        add_halfspace(prob, std::move(a), cum_h[j]);
    }
    return prob;
}

void project_dykstra(std::vector<double>& x, const AscentProblem& prob,
                     std::size_t sweeps) {
    const std::size_t m = prob.halfspaces.size();
    const std::size_t dim = x.size();
    std::vector<std::vector<double>> corrections(m + 1, std::vector<double>(dim, 0.0));
    std::vector<double> y(dim);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        // the non-negative orthant
        {
            std::vector<double>& c = corrections[0];
            for (std::size_t k = 0; k < dim; ++k) {
                const double yk = x[k] + c[k];
                const double zk = std::max(0.0, yk);
                c[k] = yk - zk;
                x[k] = zk;
            }
        }
        for (std::size_t s = 0; s < m; ++s) {
            std::vector<double>& c = corrections[s + 1];
            const Halfspace& h = prob.halfspaces[s];
            double lhs = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                y[k] = x[k] + c[k];
                lhs += h.a[k] * y[k];
            }
            const double viol = lhs - h.b;
            if (viol > 0.0) {
                const double t = viol / h.norm2;
                for (std::size_t k = 0; k < dim; ++k) {
                    x[k] = y[k] - t * h.a[k];
                    c[k] = y[k] - x[k];
                }
            } else {
                for (std::size_t k = 0; k < dim; ++k) {
                    x[k] = y[k];
                    c[k] = 0.0;
                }
            }
        }
        if ((sweep & 7u) == 7u && prob.max_violation(x) <= 1e-13 * prob.scale) break;
    }
}

// Anchor point with zero violation: floors for q, zero elsewhere.
std::vector<double> anchor_point(const AscentProblem& prob) {
    std::vector<double> x(prob.layout.dim(), 0.0);
    if (prob.layout.has_q) {
        for (std::size_t i = 0; i < prob.layout.n; ++i) {
            x[prob.layout.q(i)] = prob.sys->trace.rx_energy[i];
        }
    }
    return x;
}

// Pull x toward the anchor until the (linear) constraints hold.
void repair_feasibility(std::vector<double>& x, const AscentProblem& prob) {
    const double tol = 1e-11 * prob.scale;
    if (prob.max_violation(x) <= tol) return;
    const std::vector<double> anchor = anchor_point(prob);
    double lo = 0.0, hi = 1.0;
    std::vector<double> y(x.size());
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t k = 0; k < x.size(); ++k) {
            y[k] = anchor[k] + mid * (x[k] - anchor[k]);
        }
        if (prob.max_violation(y) <= tol) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = anchor[k] + lo * (x[k] - anchor[k]);
    }
}

std::vector<std::vector<double>> build_directions(const AscentProblem& prob) {
    const VarLayout& L = prob.layout;
    const std::size_t n = L.n;
    const std::size_t dim = L.dim();
    std::vector<std::vector<double>> dirs;
    auto unit = [dim](std::size_t k) {
        std::vector<double> d(dim, 0.0);
        d[k] = 1.0;
        return d;
    };
    for (std::size_t k = 0; k < dim; ++k) dirs.push_back(unit(k));

    auto add_transfer_block = [&](auto index_of) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                std::vector<double> d(dim, 0.0);
                d[index_of(i)] = -1.0;
                d[index_of(j)] = 1.0;
                dirs.push_back(std::move(d));
            }
        }
    };
    if (L.has_p) add_transfer_block([&L](std::size_t i) { return L.p(i); });
    if (L.has_q) add_transfer_block([&L](std::size_t i) { return L.q(i); });
    add_transfer_block([&L](std::size_t i) { return L.d(i); });

    const double beta = prob.beta;
    const double alpha = prob.alpha;

    // objective-bearing transfer directions, one per ordered slot pair
    std::vector<std::vector<double>> gains;
    if (L.has_p && L.has_q) {
        // Power transfers i -> j in four flavours: the donor's consumption
        // may ride on its floor (stays put) or on its decode need (drops
        // with it), and likewise the recipient may fit under its floor or
        // need more burn.
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                for (int variant = 0; variant < 4; ++variant) {
                    std::vector<double> d(dim, 0.0);
                    d[L.p(i)] = -1.0;
                    d[L.p(j)] = 1.0;
                    if (variant & 1) d[L.q(i)] = -beta;
                    if (variant & 2) d[L.q(j)] = beta;
                    gains.push_back(std::move(d));
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> d(dim, 0.0);
            d[L.p(j)] = 1.0;
            d[L.q(j)] = beta;
            gains.push_back(d);
            if (alpha > 0.0) {
                for (std::size_t i = 0; i <= j; ++i) {
                    std::vector<double> e = d;
                    e[L.d(i)] += beta / alpha;
                    gains.push_back(std::move(e));
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (i == j) continue;
                std::vector<double> e = d;
                e[L.q(i)] -= beta;
                gains.push_back(std::move(e));
            }
        }
    } else if (L.has_p) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                std::vector<double> d(dim, 0.0);
                d[L.p(i)] = -1.0;
                d[L.p(j)] = 1.0;
                gains.push_back(std::move(d));
            }
        }
        if (alpha > 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i <= j; ++i) {
                    std::vector<double> d(dim, 0.0);
                    d[L.p(j)] = 1.0;
                    d[L.d(i)] = beta / alpha;
                    gains.push_back(std::move(d));
                }
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                std::vector<double> d(dim, 0.0);
                d[L.q(i)] = -1.0;
                d[L.q(j)] = 1.0;
                gains.push_back(std::move(d));
            }
        }
        if (alpha > 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i <= j; ++i) {
                    std::vector<double> d(dim, 0.0);
                    d[L.q(j)] = 1.0;
                    d[L.d(i)] = 1.0 / alpha;
                    gains.push_back(std::move(d));
                }
            }
        }
    }

    // the same moves combined with a rerouted transfer schedule: a gain that
    // is blocked by a tight receiver prefix may go through once some helper
    // energy is delivered at a different slot
    std::vector<std::vector<double>> rerouted;
    if (alpha > 0.0) {
        for (const std::vector<double>& g : gains) {
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = 0; b < n; ++b) {
                    if (a == b) continue;
                    std::vector<double> d = g;
                    d[L.d(a)] -= 1.0;
                    d[L.d(b)] += 1.0;
                    rerouted.push_back(std::move(d));
                }
            }
        }
    }
    for (auto& d : gains) dirs.push_back(std::move(d));
    for (auto& d : rerouted) dirs.push_back(std::move(d));
    return dirs;
}

// Projected-gradient escape: project the objective gradient onto the tangent
// cone of the constraints active at x (non-negative least squares over the
// active normals, solved by cyclic coordinate descent) and take an exact
// line search along the result. A vanishing projection certifies first-order
// stationarity, which is global optimality here; a nonzero one escapes faces
// that single moves of the polish dictionary cannot leave.
bool projected_gradient_escape(std::vector<double>& x, const AscentProblem& prob) {
    const std::size_t dim = x.size();
    const double act_tol = 1e-7 * prob.scale;

    bool moved_any = false;
    for (int round = 0; round < 24; ++round) {
        std::vector<double> grad(dim);
        prob.gradient(x, grad);

        // active constraint normals, pointing out of the feasible set
        std::vector<std::vector<double>> normals;
        for (const Halfspace& h : prob.halfspaces) {
            double lhs = 0.0;
            for (std::size_t k = 0; k < dim; ++k) lhs += h.a[k] * x[k];
            if (h.b - lhs <= act_tol) normals.push_back(h.a);
        }
        for (std::size_t k = 0; k < dim; ++k) {
            if (x[k] <= act_tol) {
                std::vector<double> a(dim, 0.0);
                a[k] = -1.0;
                normals.push_back(std::move(a));
            }
        }

        std::vector<double> d = grad;
        if (!normals.empty()) {
            std::vector<double> lambda(normals.size(), 0.0);
            std::vector<double> norm2(normals.size(), 0.0);
            for (std::size_t r = 0; r < normals.size(); ++r) {
                for (double v : normals[r]) norm2[r] += v * v;
            }
            for (int sweep = 0; sweep < 240; ++sweep) {
                for (std::size_t r = 0; r < normals.size(); ++r) {
                    if (norm2[r] == 0.0) continue;
                    double dot = 0.0;
                    for (std::size_t k = 0; k < dim; ++k) dot += normals[r][k] * d[k];
                    const double delta = std::max(-lambda[r], dot / norm2[r]);
                    if (delta == 0.0) continue;
                    lambda[r] += delta;
                    for (std::size_t k = 0; k < dim; ++k) {
                        d[k] -= delta * normals[r][k];
                    }
                }
            }
        }

        double dnorm = 0.0, gnorm = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            dnorm += d[k] * d[k];
            gnorm += grad[k] * grad[k];
        }
        if (dnorm <= 1e-18 * (1.0 + gnorm)) return moved_any;

        // feasible step range along d
        double t_max = kInf;
        for (const Halfspace& h : prob.halfspaces) {
            double lhs = 0.0, along = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                lhs += h.a[k] * x[k];
                along += h.a[k] * d[k];
            }
            if (along > 1e-15) t_max = std::min(t_max, std::max(0.0, h.b - lhs) / along);
        }
        for (std::size_t k = 0; k < dim; ++k) {
            if (d[k] < -1e-15) t_max = std::min(t_max, std::max(0.0, x[k]) / -d[k]);
        }
        if (!(t_max > 0.0) || !std::isfinite(t_max)) return moved_any;

        // golden-section line search on the concave section f(x + t d)
        constexpr double kInvPhi = 0.6180339887498949;
        double a = 0.0, b = t_max;
        std::vector<double> y(dim);
        auto value_at = [&](double t) {
            for (std::size_t k = 0; k < dim; ++k) y[k] = x[k] + t * d[k];
            return prob.value(y);
        };
        const double f0 = prob.value(x);
        double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
        double f1 = value_at(x1), f2 = value_at(x2);
        double best_t = t_max, best_f = value_at(t_max);
        for (int it = 0; it < 72 && (b - a) > 1e-12 * (1.0 + t_max); ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kInvPhi * (b - a);
                f2 = value_at(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kInvPhi * (b - a);
                f1 = value_at(x1);
            }
            const double fm = std::max(f1, f2);
            if (fm > best_f) {
                best_f = fm;
                best_t = f1 >= f2 ? x1 : x2;
            }
        }
        if (best_f <= f0 + 1e-13 * (1.0 + std::abs(f0))) return moved_any;
        for (std::size_t k = 0; k < dim; ++k) x[k] += best_t * d[k];
        moved_any = true;
    }
    return moved_any;
}

std::size_t polish(std::vector<double>& x, const AscentProblem& prob,
                   const std::vector<std::vector<double>>& dirs, double grid_step) {
    const double feas_tol = 1e-10 * prob.scale;
    const std::size_t dim = x.size();
    std::vector<double> y(dim);
    double fx = prob.value(x);
    std::size_t sweeps = 0;

    double step = std::max(grid_step, 0.25 * prob.scale);
    const double min_step = grid_step / 4096.0;
    while (step >= min_step) {
        bool improved = true;
        std::size_t guard = 0;
        while (improved && guard++ < 64) {
            improved = false;
            ++sweeps;
            for (const std::vector<double>& d : dirs) {
                for (const double sign : {1.0, -1.0}) {
                    while (true) {
                        for (std::size_t k = 0; k < dim; ++k) {
                            y[k] = x[k] + sign * step * d[k];
                        }
                        if (prob.max_violation(y) > feas_tol) break;
                        const double fy = prob.value(y);
                        if (!(fy > fx + 1e-14)) break;
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
        }
        step *= 0.5;
    }
    return sweeps;
}

// Drop receiver burn above what the decode need and the floor require; the
// objective is unchanged and every constraint only gains slack.
void shed_waste(std::vector<double>& x, const AscentProblem& prob) {
    const VarLayout& L = prob.layout;
    if (!(L.has_p && L.has_q)) return;
    for (std::size_t i = 0; i < L.n; ++i) {
        const double need = prob.beta * std::max(0.0, x[L.p(i)]);
        const double floor = prob.sys->trace.rx_energy[i];
        x[L.q(i)] = std::min(x[L.q(i)], std::max(need, floor));
    }
}

std::vector<std::vector<double>> ascent_starts(const AscentProblem& prob,
                                               std::mt19937_64& rng) {
    const VarLayout& L = prob.layout;
    const std::size_t n = L.n;
    const EnergyTrace& t = prob.sys->trace;
    std::vector<std::vector<double>> starts;

    starts.push_back(anchor_point(prob));

    // floors with every transfer made: maximal slack everywhere
    {
        std::vector<double> x(L.dim(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (L.has_q) x[L.q(i)] = t.rx_energy[i];
            if (L.has_p && L.has_q) {
                x[L.p(i)] = std::min(t.tx_energy[i], t.rx_energy[i] / prob.beta);
            }
            x[L.d(i)] = t.helper_energy[i];
        }
        starts.push_back(std::move(x));
    }

    std::vector<double> spread(L.dim(), 0.0);
    const double tx_total = prefix_sums(t.tx_energy).back();
    const double rx_total = prefix_sums(t.rx_energy).back();
    const double h_total = prefix_sums(t.helper_energy).back();
    for (std::size_t i = 0; i < n; ++i) {
        if (L.has_p) spread[L.p(i)] = tx_total / static_cast<double>(n);
        if (L.has_q) {
            spread[L.q(i)] = std::max(t.rx_energy[i],
                                      (rx_total + prob.alpha * h_total) /
                                          static_cast<double>(n));
        }
        spread[L.d(i)] = t.helper_energy[i];
    }
    starts.push_back(std::move(spread));

    std::vector<double> eager(L.dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (L.has_p) eager[L.p(i)] = t.tx_energy[i];
        if (L.has_q) {
            eager[L.q(i)] = t.rx_energy[i] + prob.alpha * t.helper_energy[i];
        }
        eager[L.d(i)] = t.helper_energy[i];
    }
    starts.push_back(std::move(eager));

    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r < 2; ++r) {
        std::vector<double> x(L.dim(), 0.0);
        for (std::size_t k = 0; k < L.dim(); ++k) x[k] = u(rng) * prob.scale;
        starts.push_back(std::move(x));
    }
    return starts;
}

Policy policy_from_variables(const AscentProblem& prob, const std::vector<double>& x) {
    const VarLayout& L = prob.layout;
    const CostModel& cost = prob.sys->cost;
    const std::size_t n = L.n;
    Policy policy;
    policy.tx_power.resize(n);
    policy.rate.resize(n);
    policy.rx_consumption.resize(n);
    policy.helper_transfer.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        policy.helper_transfer[i] = std::max(0.0, x[L.d(i)]);
        if (L.has_p) {
            policy.tx_power[i] = std::max(0.0, x[L.p(i)]);
            policy.rate[i] = cost.rate(policy.tx_power[i]);
            policy.rx_consumption[i] = L.has_q
                                           ? std::max(0.0, x[L.q(i)])
                                           : cost.decode_cost(policy.rate[i]);
        } else {
            policy.rx_consumption[i] = std::max(0.0, x[L.q(i)]);
            policy.rate[i] = cost.decode_inv(policy.rx_consumption[i]);
            policy.tx_power[i] = cost.rate_inv(policy.rate[i]);
        }
    }
    return policy;
}

}  // namespace

OracleResult brute_force(const ConstraintSystem& system, double grid_step,
                         std::uint64_t seed) {
    const std::size_t n = system.trace.n_slots;
    if (n > 5) {
        throw std::invalid_argument("brute_force: instances with N > 5 are not supported");
    }
    if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
        throw std::invalid_argument("brute_force: grid_step must be positive");
    }

    const AscentProblem prob = build_problem(system);
    const std::vector<std::vector<double>> dirs = build_directions(prob);
    std::mt19937_64 rng(seed);

    std::vector<double> best_x;
    double best_value = -kInf;
    std::size_t iterations = 0;

    for (std::vector<double>& x : ascent_starts(prob, rng)) {
        project_dykstra(x, prob, 160);
        repair_feasibility(x, prob);

        std::vector<double> grad(x.size());
        std::vector<double> best_start_x = x;
        double best_start_value = prob.value(x);
        const double step0 = 0.15 * prob.scale;
        const std::size_t max_iters = 400;
        for (std::size_t t = 1; t <= max_iters; ++t) {
            prob.gradient(x, grad);
            const double step = step0 / std::sqrt(static_cast<double>(t));
            for (std::size_t k = 0; k < x.size(); ++k) x[k] += step * grad[k];
            project_dykstra(x, prob, 24);
            ++iterations;
            std::vector<double> candidate = x;
            repair_feasibility(candidate, prob);
            const double v = prob.value(candidate);
            if (v > best_start_value) {
                best_start_value = v;
                best_start_x = std::move(candidate);
            }
        }
        x = best_start_x;
        repair_feasibility(x, prob);
        for (int round = 0; round < 5; ++round) {
            shed_waste(x, prob);
            const double before = prob.value(x);
            iterations += polish(x, prob, dirs, grid_step);
            const bool escaped = projected_gradient_escape(x, prob);
            if (!escaped && prob.value(x) <= before + 1e-12) break;
        }

        const double v = prob.value(x);
        if (v > best_value) {
            best_value = v;
            best_x = x;
        }
    }

    OracleResult result;
    result.objective = best_value;
    result.argmax = policy_from_variables(prob, best_x);
    result.grid_step = grid_step;
    result.iterations = iterations;
    const SlackReport slack = check_feasible(result.argmax, system);
    if (!slack.feasible(grid_step)) {
        result.converged = false;
        std::ostringstream os;
        os << "best point violates a constraint by " << -slack.min_slack;
        result.note = os.str();
    }
    return result;
}

EnergyTrace random_trace(std::mt19937_64& rng, const RandomTraceOptions& options) {
    std::uniform_int_distribution<std::size_t> pick_n(options.n_min, options.n_max);
    std::uniform_real_distribution<double> pick_e(0.0, options.energy_max);
    std::uniform_int_distribution<std::size_t> pick_a(0, options.alphas.size() - 1);
    EnergyTrace trace;
    trace.n_slots = pick_n(rng);
    trace.tx_energy.resize(trace.n_slots);
    trace.rx_energy.resize(trace.n_slots);
    trace.helper_energy.resize(trace.n_slots);
    for (auto* list : {&trace.tx_energy, &trace.rx_energy, &trace.helper_energy}) {
        for (double& v : *list) v = pick_e(rng);
    }
    trace.alpha = options.alphas[pick_a(rng)];
    return trace;
}

}  // namespace ehcoop::oracle
