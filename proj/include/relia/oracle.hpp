#pragma once

#include <cstdint>
#include <string>

#include "relia/evaluate.hpp"
#include "relia/model.hpp"

namespace relia {

struct ViOptions {
    double tol = 1e-12;
    std::size_t max_iters = 200'000;
};

struct ViResult {
    FailureVector<double> q;
    std::size_t iterations = 0;
    double gap = 0.0;
};

/// Value iteration on the optimality equation from x = 0 on B^c. The iterates
/// increase monotonically to the minimal nonnegative solution, which is q*.
/// Stops once a step moves no value by more than `tol`; NotConverged otherwise.
ViResult value_iterate_oe(const FloatModel& model, const ViOptions& options = {});

/// The n-th value-iteration iterate: min over policies of P_i(tau_B <= n).
FailureVector<double> value_iterate_steps(const FloatModel& model, std::size_t n);

template <class Scalar>
struct EnumerationResult {
    StationaryPolicy policy;
    FailureVector<Scalar> q;
    std::uint64_t policies_evaluated = 0;
};

/// Evaluates every stationary policy with the minimal-solution iteration and
/// returns the lexicographically first one that is minimal in every state at
/// once. Float values are compared with `match_tol`, exact values exactly.
/// Throws TooManyPolicies above `cap` and NoUniformMinimizer when no single
/// policy is componentwise minimal.
template <class Scalar>
EnumerationResult<Scalar> enumerate_and_minimize(const Model<Scalar>& model, const PesOptions& pes = {},
                                                 std::uint64_t cap = 1'000'000, double match_tol = 1e-9);

struct SimulationEstimate {
    StateId state;
    std::size_t horizon = 0;
    std::uint64_t trials = 0;
    std::uint64_t hit_count = 0;
    double estimate = 0.0;
    double half_width_95 = 0.0;

    double standard_error() const;
};

/// Name of the generator and seeding scheme, recorded in reports.
inline constexpr const char* kSimulationRng = "mt19937_64, per-trial seed splitmix64(splitmix64(seed) + trial)";

/// Fraction of `trials` trajectories from `state` that enter B within
/// `horizon` steps. Each trial owns a generator seeded from (seed, trial index),
/// so results do not depend on `threads`. Estimates P(tau_B <= horizon), which
/// never exceeds the failure probability q.
template <class Scalar>
SimulationEstimate simulate_survival(const Model<Scalar>& model, const StationaryPolicy& policy, StateId state,
                                     std::size_t horizon, std::uint64_t trials, std::uint64_t seed,
                                     unsigned threads = 1);

}  // namespace relia
