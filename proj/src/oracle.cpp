#include "relia/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <thread>

#include "relia/absorbing.hpp"

namespace relia {

namespace {

std::vector<double> vi_start(const FloatModel& model) {
    std::vector<double> x(model.num_states(), 0.0);
    for (const auto s : model.failed().members()) x[s.index] = 1.0;
    return x;
}

std::vector<double> vi_step(const FloatModel& model, const std::vector<double>& x) {
    std::vector<double> next = x;
    for (const auto s : model.survivors().members()) {
        double best = 2.0;
        for (const auto a : model.actions(s)) {
            const auto row = model.row(s, a);
            double w = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) w += row[j] * x[j];
            best = std::min(best, w);
        }
        next[s.index] = best;
    }
    return next;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

ViResult value_iterate_oe(const FloatModel& model, const ViOptions& options) {
    auto x = vi_start(model);
    double previous_gap = 0.0;
    for (std::size_t n = 1; n <= options.max_iters; ++n) {
        auto next = vi_step(model, x);
        double gap = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) gap = std::max(gap, std::abs(next[i] - x[i]));
        x = std::move(next);
        if (iteration_settled(gap, previous_gap, options.tol)) return {FailureVector<double>{std::move(x)}, n, gap};
        previous_gap = gap;
        if (n == options.max_iters)
            throw Error(ErrorCode::NotConverged, "value iteration did not converge",
                        {{"iterations", n}, {"gap", gap}});
    }
    return {FailureVector<double>{std::move(x)}, 0, 0.0};
}

FailureVector<double> value_iterate_steps(const FloatModel& model, std::size_t n) {
    auto x = vi_start(model);
    for (std::size_t k = 0; k < n; ++k) x = vi_step(model, x);
    return FailureVector<double>{std::move(x)};
}

template <class Scalar>
EnumerationResult<Scalar> enumerate_and_minimize(const Model<Scalar>& model, const PesOptions& pes,
                                                 std::uint64_t cap, double match_tol) {
    const auto total = policy_space_size(model);
    if (total > cap)
        throw Error(ErrorCode::TooManyPolicies, "stationary policy space exceeds the enumeration cap",
                    {{"cap", cap}, {"count", total}});

    std::vector<std::vector<ActionId>> all(model.num_states());
    for (std::size_t i = 0; i < model.num_states(); ++i) {
        const auto list = model.actions(StateId{i});
        all[i].assign(list.begin(), list.end());
    }

    std::vector<StationaryPolicy> policies;
    std::vector<FailureVector<Scalar>> values;
    enumerate_product(model, all, [&](const StationaryPolicy& g) {
        values.push_back(evaluate_policy_pes(model, g, pes).q);
        policies.push_back(g);
        return true;
    });

    std::vector<Scalar> minimum = values.front().q;
    for (const auto& v : values)
        for (std::size_t i = 0; i < minimum.size(); ++i)
            if (v.q[i] < minimum[i]) minimum[i] = v.q[i];

    auto attains = [&](const Scalar& value, const Scalar& best) {
        if constexpr (is_exact_v<Scalar>) return value == best;
        else return value - best <= match_tol;
    };

    for (std::size_t k = 0; k < policies.size(); ++k) {
        bool uniform = true;
        for (std::size_t i = 0; i < minimum.size() && uniform; ++i) uniform = attains(values[k].q[i], minimum[i]);
        if (uniform) return {policies[k], values[k], static_cast<std::uint64_t>(policies.size())};
    }

    // Report the first policy minimal at the first survivor state, and where it loses.
    const auto survivors = model.survivors().members();
    std::size_t candidate = 0;
    for (std::size_t k = 0; k < policies.size(); ++k) {
        if (attains(values[k].q[survivors.front().index], minimum[survivors.front().index])) {
            candidate = k;
            break;
        }
    }
    nlohmann::ordered_json details;
    for (const auto s : survivors) {
        if (attains(values[candidate].q[s.index], minimum[s.index])) continue;
        for (std::size_t k = 0; k < policies.size(); ++k) {
            if (attains(values[k].q[s.index], minimum[s.index])) {
                details = {{"state", model.state_name(s)},
                           {"candidate_policy_index", candidate},
                           {"better_policy_index", k}};
                break;
            }
        }
        break;
    }
    throw Error(ErrorCode::NoUniformMinimizer, "no stationary policy is minimal in every state", details);
}

double SimulationEstimate::standard_error() const {
    return trials == 0 ? 0.0 : std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
}

template <class Scalar>
SimulationEstimate simulate_survival(const Model<Scalar>& model, const StationaryPolicy& policy, StateId state,
                                     std::size_t horizon, std::uint64_t trials, std::uint64_t seed,
                                     unsigned threads) {
    if (policy.model_fingerprint() != model.fingerprint())
        throw Error(ErrorCode::ModelMismatch, "policy was built for a different model");
    if (trials == 0) throw Error(ErrorCode::InvalidPolicy, "simulation needs at least one trial");
    const std::size_t n = model.num_states();

    // Cumulative rows under the policy, plus the states that can still reach B.
    std::vector<std::vector<double>> cdf(n);
    std::vector<std::vector<std::size_t>> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = model.row(StateId{i}, policy[StateId{i}]);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] == 0) continue;
            acc += Num<Scalar>::to_double(row[j]);
            cdf[i].push_back(acc);
            targets[i].push_back(j);
        }
    }
    std::vector<bool> can_fail(n, false);
    for (const auto s : model.failed().members()) can_fail[s.index] = true;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (can_fail[i]) continue;
            for (auto j : targets[i]) {
                if (can_fail[j]) {
                    can_fail[i] = changed = true;
                    break;
                }
            }
        }
    }

    auto run_trial = [&](std::uint64_t trial) {
        std::mt19937_64 engine(splitmix64(splitmix64(seed) + trial));
        std::size_t current = state.index;
        for (std::size_t step = 0;; ++step) {
            if (model.is_failed(StateId{current})) return true;
            if (step == horizon || !can_fail[current]) return false;
            const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53 * cdf[current].back();
            const auto& c = cdf[current];
            const auto pos = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), u) - c.begin());
            current = targets[current][std::min(pos, c.size() - 1)];
        }
    };

    threads = std::max(1u, threads);
    std::vector<std::uint64_t> hits(threads, 0);
    auto work = [&](unsigned worker) {
        for (std::uint64_t t = worker; t < trials; t += threads)
            if (run_trial(t)) ++hits[worker];
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    SimulationEstimate out;
    out.state = state;
    out.horizon = horizon;
    out.trials = trials;
    for (auto h : hits) out.hit_count += h;
    out.estimate = static_cast<double>(out.hit_count) / static_cast<double>(trials);
    out.half_width_95 = 1.96 * out.standard_error();
    return out;
}

template EnumerationResult<double> enumerate_and_minimize(const Model<double>&, const PesOptions&, std::uint64_t,
                                                          double);
template EnumerationResult<Rational> enumerate_and_minimize(const Model<Rational>&, const PesOptions&,
                                                            std::uint64_t, double);
template SimulationEstimate simulate_survival(const Model<double>&, const StationaryPolicy&, StateId, std::size_t,
                                              std::uint64_t, std::uint64_t, unsigned);
template SimulationEstimate simulate_survival(const Model<Rational>&, const StationaryPolicy&, StateId, std::size_t,
                                              std::uint64_t, std::uint64_t, unsigned);

}  // namespace relia
