#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ehcoop/model.hpp"

namespace ehcoop::testing {

inline EnergyTrace make_trace(std::vector<double> tx, std::vector<double> rx,
                              std::vector<double> helper, double alpha) {
    EnergyTrace t;
    t.n_slots = rx.size();
    t.tx_energy = std::move(tx);
    t.rx_energy = std::move(rx);
    t.helper_energy = std::move(helper);
    t.alpha = alpha;
    return t;
}

/// Three-slot reference instance used across the suite.
inline EnergyTrace reference_trace() {
    return make_trace({6.5, 13.5, 9.0}, {5.0, 8.0, 3.0}, {7.0, 1.0, 2.0}, 0.7);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return a.size() == b.size() ? worst : std::numeric_limits<double>::infinity();
}

}  // namespace ehcoop::testing
