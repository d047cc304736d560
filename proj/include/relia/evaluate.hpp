#pragma once

#include <vector>

#include "relia/absorbing.hpp"
#include "relia/model.hpp"

namespace relia {

/// Failure probabilities q_i = P_i(tau_B < inf) over all of S.
template <class Scalar>
struct FailureVector {
    std::vector<Scalar> q;

    const Scalar& operator[](StateId s) const { return q.at(s.index); }
    Scalar reliability(StateId s) const { return Num<Scalar>::one() - q.at(s.index); }
    std::size_t size() const { return q.size(); }
};

/// The linear system x = V_B + P_{G*} x for one policy, indexed over G*.
template <class Scalar>
struct ReducedSystem {
    std::vector<StateId> states;  // position -> state
    std::vector<Scalar> p_gstar;  // row-major |G*| x |G*|
    std::vector<Scalar> v_b;

    std::size_t size() const { return states.size(); }
    const Scalar& p(std::size_t row, std::size_t col) const { return p_gstar[row * states.size() + col]; }
};

/// Values solved on G*, positionally aligned with `states`.
template <class Scalar>
struct GStarValues {
    std::vector<StateId> states;
    std::vector<Scalar> values;
    double residual = 0.0;  // ||(I-P)x - V||_inf before clamping
};

struct SolveTolerances {
    double solve_tol = 1e-10;
    double pivot_tol = 1e-12;
    double clamp_tol = 1e-9;
};

struct PesOptions {
    double tol = 1e-12;
    std::size_t max_iters = 100'000;
};

/// Float stopping rule for the monotone iterations: the last step is within tol
/// and so is the geometric tail estimated from the ratio of the last two steps.
inline bool iteration_settled(double gap, double previous_gap, double tol) {
    if (gap > tol) return false;
    if (gap == 0.0) return true;
    const double rho = gap / previous_gap;
    return rho < 1.0 && gap * rho / (1.0 - rho) <= tol;
}

template <class Scalar>
struct PesResult {
    FailureVector<Scalar> q;
    std::size_t iterations = 0;
    double gap = 0.0;  // sup-norm of the last step
};

/// Extracts P^g_{G*} and V^g_B. Refuses policies outside the restricted class,
/// whose system on G* need not have a unique solution.
template <class Scalar>
ReducedSystem<Scalar> build_reduced_system(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                                           const StationaryPolicy& policy);

/// Solves (I - P) x = V. Float mode uses partial pivoting and clamps values
/// within clamp_tol of [0, 1]; exact mode uses fraction-free elimination.
template <class Scalar>
GStarValues<Scalar> solve_reduced(const ReducedSystem<Scalar>& system, const SolveTolerances& tol = {});

/// q = 1 on B, 0 on F*, solved values on G*.
template <class Scalar>
FailureVector<Scalar> assemble_failure_vector(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                                              const GStarValues<Scalar>& solved);

/// Build, solve and assemble for an in-class policy; handles G* = ∅.
template <class Scalar>
FailureVector<Scalar> evaluate_in_class(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                                        const StationaryPolicy& policy, const SolveTolerances& tol = {},
                                        double* residual = nullptr);

/// Minimal nonnegative solution of x_i = p(B|i,g(i)) + sum_{j in B^c} p(j|i,g(i)) x_j
/// for any stationary policy, by monotone iteration from zero.
///
/// Float mode stops once a step moves no value by more than `tol`. Exact mode
/// stops on an exact stall; otherwise, once the support of the iterate has
/// settled (after |B^c| steps), it computes the limit on that support exactly
/// and certifies it as a fixed point dominating the current iterate.
template <class Scalar>
PesResult<Scalar> evaluate_policy_pes(const Model<Scalar>& model, const StationaryPolicy& policy,
                                      const PesOptions& options = {});

/// The n-th iterate from zero, which equals P_i^g(tau_B <= n).
template <class Scalar>
FailureVector<Scalar> pes_iterate(const Model<Scalar>& model, const StationaryPolicy& policy, std::size_t n);

/// ||(I - P) x - V||_inf in double precision.
template <class Scalar>
double reduced_residual(const ReducedSystem<Scalar>& system, const std::vector<Scalar>& x);

}  // namespace relia
