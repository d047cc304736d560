#pragma once

// Test-only brute-force references, kept apart from the library code paths.

#include <algorithm>
#include <vector>

#include "relia/model.hpp"

namespace relia::testing {

/// min over deterministic Markov policies (one decision rule per time step) of
/// P_i(tau_B <= horizon), by pushing the state distribution forward under
/// every rule sequence. Cost is (prod_i |A(i)|)^horizon.
template <class Scalar>
std::vector<double> markov_policy_min_hitting(const Model<Scalar>& model, std::size_t horizon) {
    const std::size_t n = model.num_states();
    std::vector<std::vector<ActionId>> rules{{}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::vector<ActionId>> next;
        for (const auto& partial : rules) {
            for (const auto a : model.actions(StateId{i})) {
                auto r = partial;
                r.push_back(a);
                next.push_back(std::move(r));
            }
        }
        rules = std::move(next);
    }

    std::vector<double> best(n, 1.0);
    std::vector<std::size_t> pick(horizon, 0);
    while (true) {
        for (std::size_t start = 0; start < n; ++start) {
            std::vector<double> dist(n, 0.0);
            dist[start] = 1.0;
            double hit = model.is_failed(StateId{start}) ? 1.0 : 0.0;
            if (hit == 0.0) {
                for (std::size_t t = 0; t < horizon; ++t) {
                    std::vector<double> next(n, 0.0);
                    for (std::size_t i = 0; i < n; ++i) {
                        if (dist[i] == 0.0) continue;
                        const auto row = model.row(StateId{i}, rules[pick[t]][i]);
                        for (std::size_t j = 0; j < n; ++j) next[j] += dist[i] * Num<Scalar>::to_double(row[j]);
                    }
                    for (std::size_t j = 0; j < n; ++j) {
                        if (model.is_failed(StateId{j})) {
                            hit += next[j];
                            next[j] = 0.0;
                        }
                    }
                    dist = std::move(next);
                }
            }
            best[start] = std::min(best[start], hit);
        }
        std::size_t pos = horizon;
        while (pos > 0) {
            --pos;
            if (++pick[pos] < rules.size()) break;
            pick[pos] = 0;
            if (pos == 0) return best;
        }
        if (horizon == 0) return best;
    }
}

}  // namespace relia::testing
