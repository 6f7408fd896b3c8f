#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "ehcoop/waterfill.hpp"
#include "test_util.hpp"

using namespace ehcoop;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double concave_gain(const std::vector<double>& x) {
    double total = 0.0;
    for (double v : x) total += 0.5 * std::log2(1.0 + v);
    return total;
}

// Exhaustive search over discretized feasible three-slot allocations, kept
// independent of the production fill. The last slot always takes the largest
// feasible value since the objective is increasing.
double grid_best_gain_3(const std::vector<double>& budgets,
                        const std::vector<double>& caps, double step) {
    REQUIRE(budgets.size() == 3);
    const double b1 = budgets[0];
    const double b2 = budgets[0] + budgets[1];
    const double b3 = b2 + budgets[2];
    double best = -kInf;
    for (double x1 = 0.0; x1 <= std::min(caps[0], b1) + 1e-12; x1 += step) {
        for (double x2 = 0.0; x2 <= std::min(caps[1], b2 - x1) + 1e-12; x2 += step) {
            const double x3 = std::min(caps[2], b3 - x1 - x2);
            best = std::max(best, concave_gain({x1, x2, x3}));
        }
    }
    return best;
}

std::vector<double> random_energies(std::mt19937_64& rng, std::size_t n, double hi) {
    std::uniform_real_distribution<double> u(0.0, hi);
    std::vector<double> out(n);
    for (double& v : out) v = u(rng);
    return out;
}

void check_prefix_causality(const std::vector<double>& levels,
                            const std::vector<double>& budgets) {
    double cum_level = 0.0, cum_budget = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        cum_level += levels[i];
        cum_budget += budgets[i];
        CHECK(cum_level <= cum_budget + 1e-9);
    }
}

}  // namespace

TEST_CASE("staircase equalizes when causality allows") {
    const SegmentSchedule s = staircase_levels(std::vector<double>{4.0, 2.0});
    CHECK(s.per_slot == std::vector<double>{3.0, 3.0});
    CHECK(s.boundaries == std::vector<std::size_t>{2});
}

TEST_CASE("staircase cannot move energy backward") {
    const SegmentSchedule s = staircase_levels(std::vector<double>{2.0, 4.0});
    CHECK(s.per_slot == std::vector<double>{2.0, 4.0});
    CHECK(s.boundaries == std::vector<std::size_t>{1, 2});
    CHECK(s.segment_levels == std::vector<double>{2.0, 4.0});
}

TEST_CASE("staircase equalizes the three-slot pool") {
    const std::vector<double> budgets{9.9, 8.7, 4.4};
    const SegmentSchedule s = staircase_levels(budgets);
    const double expected = (9.9 + 8.7 + 4.4) / 3.0;
    for (double level : s.per_slot) CHECK(level == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(s.per_slot[0] - 7.6667) < 1e-4);

    // discretized exhaustive search confirms equalization is optimal
    const double best = grid_best_gain_3(budgets, {kInf, kInf, kInf}, 1e-2);
    CHECK(concave_gain(s.per_slot) >= best - 1e-9);
}

TEST_CASE("staircase rejects empty and negative input") {
    CHECK_THROWS_AS(staircase_levels(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(staircase_levels(std::vector<double>{1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("capped fill: causality limits the first slot, caps the rest") {
    const std::vector<double> budgets{6.5, 13.5, 9.0};
    const std::vector<double> caps{7.5, 8.0, 7.5};
    const SegmentSchedule s = capped_waterfill(budgets, caps);
    CHECK(ehcoop::testing::max_abs_diff(s.per_slot, {6.5, 8.0, 7.5}) < 1e-9);

    const double best = grid_best_gain_3(budgets, caps, 1e-2);
    CHECK(concave_gain(s.per_slot) >= best - 1e-9);
    check_prefix_causality(s.per_slot, budgets);
}

TEST_CASE("capped fill reproduces the reference transmit schedule") {
    const SegmentSchedule s =
        capped_waterfill(std::vector<double>{6.5, 13.5, 9.0},
                         std::vector<double>{6.5, 8.25, 8.25});
    CHECK(ehcoop::testing::max_abs_diff(s.per_slot, {6.5, 8.25, 8.25}) < 1e-9);
}

TEST_CASE("capped fill with infinite caps is the plain staircase") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 1 + (rng() % 6);
        const std::vector<double> budgets = random_energies(rng, n, 10.0);
        const std::vector<double> caps(n, kInf);
        const SegmentSchedule plain = staircase_levels(budgets);
        const SegmentSchedule capped = capped_waterfill(budgets, caps);
        CHECK(ehcoop::testing::max_abs_diff(plain.per_slot, capped.per_slot) < 1e-9);
    }
}

TEST_CASE("capped fill rejects mismatched lengths") {
    CHECK_THROWS_AS(capped_waterfill(std::vector<double>{1.0, 2.0},
                                     std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("capped fill leaves budget unused when ceilings bind") {
    const SegmentSchedule s = capped_waterfill(std::vector<double>{1.0, 100.0},
                                               std::vector<double>{2.0, 3.0});
    CHECK(ehcoop::testing::max_abs_diff(s.per_slot, {1.0, 3.0}) < 1e-12);
}

TEST_CASE("floor fill pins the middle slot of the reference instance") {
    const MinFillResult r = min_constrained_waterfill(
        std::vector<double>{5.0, 8.0, 3.0}, std::vector<double>{7.0, 1.0, 2.0}, 0.7);
    CHECK(ehcoop::testing::max_abs_diff(r.levels, {7.5, 8.0, 7.5}) < 1e-9);
    REQUIRE(r.state.excluded.size() == 1);
    CHECK(r.state.excluded[0] == 1);
    double total = 0.0;
    for (double h : r.state.effective_helper) total += h;
    CHECK(total == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("floor fill with alpha 0 returns the harvest itself") {
    std::mt19937_64 rng(29);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 1 + (rng() % 5);
        const std::vector<double> rx = random_energies(rng, n, 10.0);
        const std::vector<double> h = random_energies(rng, n, 10.0);
        const MinFillResult r = min_constrained_waterfill(rx, h, 0.0);
        CHECK(ehcoop::testing::max_abs_diff(r.levels, rx) < 1e-9);
    }
}

TEST_CASE("single slot absorbs all helper energy") {
    const MinFillResult r = min_constrained_waterfill(std::vector<double>{2.0},
                                                      std::vector<double>{4.0}, 0.5);
    REQUIRE(r.levels.size() == 1);
    CHECK(r.levels[0] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("capped floor fill reproduces the reference consumption") {
    const MinFillResult r = min_capped_waterfill(
        std::vector<double>{5.0, 8.0, 3.0}, std::vector<double>{7.0, 1.0, 2.0}, 0.7,
        std::vector<double>{6.5, 13.5, 9.0});
    CHECK(ehcoop::testing::max_abs_diff(r.levels, {6.5, 8.25, 8.25}) < 1e-9);
}

TEST_CASE("capped floor fill with infinite caps matches the uncapped fill") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 1 + (rng() % 5);
        const std::vector<double> rx = random_energies(rng, n, 10.0);
        const std::vector<double> h = random_energies(rng, n, 10.0);
        const double alpha = (it % 4) * 0.3;
        const std::vector<double> caps(n, kInf);
        const MinFillResult uncapped = min_constrained_waterfill(rx, h, alpha);
        const MinFillResult capped = min_capped_waterfill(rx, h, alpha, caps);
        CHECK(ehcoop::testing::max_abs_diff(uncapped.levels, capped.levels) < 1e-9);
    }
}

TEST_CASE("caps equal to floors pin every slot") {
    const std::vector<double> rx{5.0, 8.0, 3.0};
    const MinFillResult r = min_capped_waterfill(rx, std::vector<double>{7.0, 1.0, 2.0},
                                                 0.7, rx);
    CHECK(ehcoop::testing::max_abs_diff(r.levels, rx) < 1e-9);
}

TEST_CASE("a cap below the floor is flagged") {
    const MinFillResult r = min_capped_waterfill(std::vector<double>{5.0, 1.0},
                                                 std::vector<double>{1.0, 1.0}, 0.5,
                                                 std::vector<double>{2.0, 9.0});
    CHECK(r.levels[0] == doctest::Approx(5.0));
    REQUIRE(!r.warnings.empty());
    CHECK(r.warnings[0].find("below the receiver floor") != std::string::npos);
}

TEST_CASE("helper energy stranded on an excluded tail is reported") {
    // the last slot is pinned below its floor by the ceiling, so its helper
    // energy has nowhere to go
    const MinFillResult r = min_capped_waterfill(std::vector<double>{1.0, 5.0},
                                                 std::vector<double>{0.0, 3.0}, 1.0,
                                                 std::vector<double>{10.0, 2.0});
    CHECK(ehcoop::testing::max_abs_diff(r.levels, {1.0, 5.0}) < 1e-12);
    bool found = false;
    for (const auto& w : r.warnings) {
        if (w.find("stays unused") != std::string::npos) found = true;
    }
    CHECK(found);
    double total = 0.0;
    for (double h : r.state.effective_helper) total += h;
    CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("staircase properties on random instances") {
    std::mt19937_64 rng(37);
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 1 + (rng() % 8);
        const std::vector<double> budgets = random_energies(rng, n, 10.0);
        const SegmentSchedule s = staircase_levels(budgets);

        double total_level = 0.0, total_budget = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total_level += s.per_slot[i];
            total_budget += budgets[i];
        }
        CHECK(std::abs(total_level - total_budget) <= 1e-9);

        check_prefix_causality(s.per_slot, budgets);

        double cum_level = 0.0, cum_budget = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            cum_level += s.per_slot[i];
            cum_budget += budgets[i];
            CHECK(s.per_slot[i] <= s.per_slot[i + 1] + 1e-12);
            if (s.per_slot[i + 1] > s.per_slot[i] + 1e-12) {
                // strictly rising level means the causality constraint is
                // tight at the boundary
                CHECK(std::abs(cum_level - cum_budget) <= 1e-9);
            }
        }
        CHECK(s.boundaries.back() == n);
    }
}

TEST_CASE("capped fill properties on random instances") {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 1 + (rng() % 8);
        const std::vector<double> budgets = random_energies(rng, n, 10.0);
        std::vector<double> caps = random_energies(rng, n, 8.0);
        if (it % 5 == 0) caps.assign(n, kInf);
        const SegmentSchedule s = capped_waterfill(budgets, caps);

        double total_level = 0.0, total_budget = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total_level += s.per_slot[i];
            total_budget += budgets[i];
            CHECK(s.per_slot[i] <= caps[i] + 1e-12);
        }
        CHECK(total_level <= total_budget + 1e-9);
        check_prefix_causality(s.per_slot, budgets);
    }
}

TEST_CASE("exclusion loop properties on random instances") {
    std::mt19937_64 rng(43);
    const double alphas[] = {0.0, 0.3, 0.7, 1.0};
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 1 + (rng() % 6);
        const std::vector<double> rx = random_energies(rng, n, 10.0);
        const std::vector<double> h = random_energies(rng, n, 10.0);
        const double alpha = alphas[it % 4];
        const MinFillResult r = min_constrained_waterfill(rx, h, alpha);

        // floors hold and excluded slots sit exactly on them
        for (std::size_t i = 0; i < n; ++i) CHECK(r.levels[i] >= rx[i] - 1e-9);
        for (std::size_t slot : r.state.excluded) {
            CHECK(std::abs(r.levels[slot] - rx[slot]) <= 1e-9);
        }

        // the loop terminates within N rounds and levels never rise for
        // slots that stay in the pool
        CHECK(r.state.iterations.size() <= n + 1);
        for (std::size_t k = 1; k < r.state.iterations.size(); ++k) {
            const ExclusionIteration& prev = r.state.iterations[k - 1];
            const ExclusionIteration& cur = r.state.iterations[k];
            for (std::size_t i = 0; i < n; ++i) {
                if (prev.included[i] && cur.included[i]) {
                    CHECK(cur.level[i] <= prev.level[i] + 1e-9);
                }
            }
        }

        // helper conservation after forwarding
        double eff_total = 0.0, h_total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            eff_total += r.state.effective_helper[i];
            h_total += h[i];
        }
        CHECK(std::abs(eff_total - h_total) <= 1e-9);

        // pool causality: consumption beyond own harvest is covered by
        // forwarded helper energy, prefix by prefix over included slots
        double slack = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool excluded =
                std::find(r.state.excluded.begin(), r.state.excluded.end(), i) !=
                r.state.excluded.end();
            if (excluded) continue;
            slack += rx[i] + alpha * r.state.effective_helper[i] - r.levels[i];
            CHECK(slack >= -1e-9);
        }
    }
}
