#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ehcoop/model.hpp"
#include "test_util.hpp"

using namespace ehcoop;
using ehcoop::testing::make_trace;

TEST_CASE("rate of 3 is exactly one bit") {
    const CostModel cm = builtin_cost_model(CostModelKind::rate_half_log2);
    CHECK(cm.rate(3.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cm.rate(0.0) == 0.0);
    CHECK(cm.decode_cost(0.0) == 0.0);
}

TEST_CASE("decode_inv coincides with rate at beta = 1") {
    const CostModel cm = builtin_cost_model(CostModelKind::scaled_inverse_rate, 1.0);
    CHECK(cm.decode_inv(7.5) == doctest::Approx(cm.rate(7.5)).epsilon(1e-14));
    const CostModel plain = builtin_cost_model(CostModelKind::rate_half_log2);
    CHECK(plain.decode_inv(7.5) == doctest::Approx(plain.rate(7.5)).epsilon(1e-14));
}

TEST_CASE("decode cost scales with beta") {
    const CostModel cm = builtin_cost_model(CostModelKind::scaled_inverse_rate, 2.0);
    CHECK(cm.decode_cost(cm.rate(4.0)) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("non-positive beta is rejected") {
    CHECK_THROWS_AS(builtin_cost_model(CostModelKind::scaled_inverse_rate, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(builtin_cost_model(CostModelKind::scaled_inverse_rate, -2.0),
                    std::invalid_argument);
}

TEST_CASE("function pairs invert each other") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (const double beta : {1.0, 0.5, 3.0}) {
        const CostModel cm = builtin_cost_model(CostModelKind::scaled_inverse_rate, beta);
        for (int i = 0; i < 1000; ++i) {
            const double x = u(rng);
            CHECK(std::abs(cm.rate_inv(cm.rate(x)) - x) <= 1e-9 * (1.0 + x));
            CHECK(std::abs(cm.rate(cm.rate_inv(x)) - x) <= 1e-10 * (1.0 + x));
            CHECK(std::abs(cm.decode_cost(cm.decode_inv(x)) - x) <= 1e-9 * (1.0 + x));
            CHECK(std::abs(cm.decode_inv(cm.decode_cost(x)) - x) <= 1e-9 * (1.0 + x));
        }
    }
}

TEST_CASE("rate is concave and decode cost is convex") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    const CostModel cm = builtin_cost_model(CostModelKind::scaled_inverse_rate, 1.7);
    for (int i = 0; i < 1000; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        const double mid = 0.5 * (a + b);
        CHECK(cm.rate(mid) >= 0.5 * (cm.rate(a) + cm.rate(b)) - 1e-12);
        const double ra = cm.rate(a), rb = cm.rate(b);
        CHECK(cm.decode_cost(0.5 * (ra + rb)) <=
              0.5 * (cm.decode_cost(ra) + cm.decode_cost(rb)) + 1e-12);
    }
}

TEST_CASE("validate_trace accepts the reference instance") {
    CHECK(validate_trace(ehcoop::testing::reference_trace()).empty());
}

TEST_CASE("validate_trace flags alpha out of range") {
    EnergyTrace t = make_trace({1.0}, {1.0}, {1.0}, 1.2);
    const auto errors = validate_trace(t);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("alpha out of range") != std::string::npos);
}

TEST_CASE("validate_trace flags a length mismatch") {
    EnergyTrace t = make_trace({1.0, 2.0}, {1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, 0.5);
    const auto errors = validate_trace(t);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("tx_energy") != std::string::npos);
    CHECK(errors[0].find("does not match") != std::string::npos);
}

TEST_CASE("validate_trace reports every violation at once") {
    EnergyTrace t = make_trace({-1.0}, {1.0, 2.0}, {1.0}, -0.3);
    t.n_slots = 1;
    const auto errors = validate_trace(t);
    CHECK(errors.size() == 3);
}

TEST_CASE("zero-energy slots are legal") {
    CHECK(validate_trace(make_trace({0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, 0.0)).empty());
}
