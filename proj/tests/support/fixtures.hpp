#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "relia/model.hpp"
#include "relia/model_io.hpp"

namespace relia::testing {

inline std::string models_dir() { return RELIA_MODELS_DIR; }

/// Three states, B = {s0}; c_i stays put, d_i jumps to s0.
inline RawModel example31_raw(Arithmetic mode = Arithmetic::Exact) {
    RawModel raw;
    raw.arithmetic = mode;
    raw.states = {"s0", "s1", "s2"};
    raw.failed = {"s0"};
    for (int i = 0; i < 3; ++i) {
        const auto s = "s" + std::to_string(i);
        const auto c = "c" + std::to_string(i);
        const auto d = "d" + std::to_string(i);
        raw.actions.push_back({s, {c, d}});
        raw.transitions.push_back({s, c, {{s, "1"}}});
        raw.transitions.push_back({s, d, {{"s0", "1"}}});
    }
    return raw;
}

/// The three-state example plus a transient state s3 with a single action e3 that fails
/// with probability 1/2 and otherwise moves to s1.
inline RawModel example31_transient_raw(Arithmetic mode = Arithmetic::Exact) {
    RawModel raw = example31_raw(mode);
    raw.states.push_back("s3");
    raw.actions.push_back({"s3", {"e3"}});
    raw.transitions.push_back({"s3", "e3", {{"s0", "1/2"}, {"s1", "1/2"}}});
    return raw;
}

struct MaintenanceParams {
    Rational beta0, beta1, theta0, theta1;
    Rational alpha0{1, 4};
    Rational alpha1{1, 4};
};

inline MaintenanceParams regime_a() {
    return {Rational(1, 2), Rational(3, 10), Rational(2, 5), Rational(1, 5)};
}

inline MaintenanceParams regime_b() {
    return {Rational(1, 5), Rational(1, 5), Rational(1, 2), Rational(3, 10)};
}

inline std::string machine_state(int first, int second) {
    return "(" + std::to_string(first) + "," + std::to_string(second) + ")";
}

/// Two machines with situations 2 (available), 1 (deteriorated), 0 (broken).
/// Only (1,2) and (2,1) offer the repair choices c and d; stopped states are
/// absorbing; B = {(0,0)}.
inline RawModel maintenance_raw(const MaintenanceParams& p, Arithmetic mode = Arithmetic::Exact) {
    RawModel raw;
    raw.arithmetic = mode;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) raw.states.push_back(machine_state(a, b));
    raw.failed = {"(0,0)"};

    const Rational stay = 1 - p.alpha0 - p.alpha1;
    // next situation of an available machine, indexed by situation
    const Rational ageing[3] = {p.alpha1, p.alpha0, stay};
    auto repaired = [](const Rational& to_available, const Rational& to_deteriorated) {
        return std::vector<Rational>{1 - to_available - to_deteriorated, to_deteriorated, to_available};
    };
    auto add_row = [&](const std::string& state, const std::string& action,
                       const std::vector<Rational>& first, const std::vector<Rational>& second) {
        RawTransition t{state, action, {}};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                Rational v = first[a] * second[b];
                if (v != 0) t.entries.push_back({machine_state(a, b), v.get_str()});
            }
        }
        raw.transitions.push_back(std::move(t));
    };
    const std::vector<Rational> avail(ageing, ageing + 3);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const auto s = machine_state(a, b);
            if ((a == 1 && b == 2) || (a == 2 && b == 1)) {
                raw.actions.push_back({s, {"c", "d"}});
                const auto rc = repaired(p.beta0, p.beta1);
                const auto rd = repaired(p.theta0, p.theta1);
                if (a == 1) {
                    add_row(s, "c", rc, avail);
                    add_row(s, "d", rd, avail);
                } else {
                    add_row(s, "c", avail, rc);
                    add_row(s, "d", avail, rd);
                }
            } else if (a == 2 && b == 2) {
                raw.actions.push_back({s, {"nothing"}});
                add_row(s, "nothing", avail, avail);
            } else {
                raw.actions.push_back({s, {"nothing"}});
                raw.transitions.push_back({s, "nothing", {{s, "1"}}});
            }
        }
    }
    return raw;
}

/// Policy from (state name -> action name); unnamed states take their first action.
template <class Scalar>
StationaryPolicy policy_of(const Model<Scalar>& model, const std::map<std::string, std::string>& picks) {
    std::vector<ActionId> choices;
    for (std::size_t i = 0; i < model.num_states(); ++i) {
        const StateId s{i};
        const auto it = picks.find(model.state_name(s));
        choices.push_back(it == picks.end() ? model.actions(s).front() : *model.find_action(it->second));
    }
    return StationaryPolicy::create(model, std::move(choices));
}

/// f1 = (c, c), f2 = (c, d), f3 = (d, d), f4 = (d, c) on ((1,2), (2,1)).
template <class Scalar>
StationaryPolicy maintenance_policy(const Model<Scalar>& model, int which) {
    static const char* table[4][2] = {{"c", "c"}, {"c", "d"}, {"d", "d"}, {"d", "c"}};
    return policy_of(model, {{"(1,2)", table[which - 1][0]}, {"(2,1)", table[which - 1][1]}});
}

inline StateSet names_to_set(std::size_t universe, const std::vector<std::string>& all,
                             const std::vector<std::string>& names) {
    StateSet out(universe);
    for (const auto& n : names) {
        const auto it = std::find(all.begin(), all.end(), n);
        out.insert(StateId{static_cast<std::size_t>(it - all.begin())});
    }
    return out;
}

/// Random models: 3-6 states, |B| in {1,2}, 1-3 actions per state. Rows are
/// symmetric Dirichlet(0.1) draws, entries below 0.05 zeroed, then quantised
/// to integer weights over 1000 so the same row is exact as a rational.
inline RawModel random_raw_model(std::mt19937_64& rng, Arithmetic mode = Arithmetic::Float) {
    std::uniform_int_distribution<int> n_states(3, 6);
    std::uniform_int_distribution<int> n_failed(1, 2);
    std::uniform_int_distribution<int> n_actions(1, 3);
    std::gamma_distribution<double> gamma(0.1, 1.0);

    RawModel raw;
    raw.arithmetic = mode;
    const int n = n_states(rng);
    for (int i = 0; i < n; ++i) raw.states.push_back("x" + std::to_string(i));
    const int b = std::min(n_failed(rng), n - 1);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < b; ++i) raw.failed.push_back(raw.states[order[i]]);

    for (int i = 0; i < n; ++i) {
        const int k = n_actions(rng);
        std::vector<std::string> names;
        for (int a = 0; a < k; ++a) names.push_back("a" + std::to_string(a));
        raw.actions.push_back({raw.states[i], names});
        for (const auto& name : names) {
            std::vector<long> weight(n, 0);
            long total = 0;
            while (total == 0) {
                std::vector<double> w(n);
                double sum = 0.0;
                for (auto& x : w) sum += (x = gamma(rng));
                for (int j = 0; j < n; ++j) {
                    const double p = sum > 0 ? w[j] / sum : 0.0;
                    weight[j] = p < 0.05 ? 0 : std::lround(p * 1000.0);
                }
                total = 0;
                for (auto x : weight) total += x;
            }
            RawTransition t{raw.states[i], name, {}};
            for (int j = 0; j < n; ++j)
                if (weight[j] > 0)
                    t.entries.push_back({raw.states[j], std::to_string(weight[j]) + "/" + std::to_string(total)});
            raw.transitions.push_back(std::move(t));
        }
    }
    return raw;
}

/// A uniformly random stationary policy.
template <class Scalar>
StationaryPolicy random_policy(const Model<Scalar>& model, std::mt19937_64& rng) {
    std::vector<ActionId> choices;
    for (std::size_t i = 0; i < model.num_states(); ++i) {
        const auto list = model.actions(StateId{i});
        std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
        choices.push_back(list[pick(rng)]);
    }
    return StationaryPolicy::create(model, std::move(choices));
}

inline double to_d(double x) { return x; }
inline double to_d(const Rational& x) { return x.get_d(); }

template <class A, class B>
double sup_distance(const std::vector<A>& a, const std::vector<B>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(to_d(a[i]) - to_d(b[i])));
    return worst;
}

}  // namespace relia::testing
