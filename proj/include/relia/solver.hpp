#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "relia/absorbing.hpp"
#include "relia/evaluate.hpp"
#include "relia/model.hpp"

namespace relia {

enum class Termination { Converged, DegenerateFStarEmpty, DegenerateGStarEmpty };

std::string_view to_string(Termination t);

struct SolveOptions {
    /// Margin for the strict improvement test in float mode; exact mode uses 0.
    double improve_eps = 1e-12;
    /// Floor on the improvement budget; the class size is used when larger.
    std::size_t max_policy_iters = 10'000;
    std::optional<StationaryPolicy> initial_policy;
    SolveTolerances tolerances;
    double oe_tol = 1e-8;
};

template <class Scalar>
struct SolveIteration {
    StationaryPolicy policy;
    FailureVector<Scalar> q;
    StateSet improved_states;  // states whose action the following step changed
    double residual = 0.0;     // reduced-system residual of this evaluation
};

template <class Scalar>
struct SolveReport {
    AbsorbingAnalysis analysis;
    std::vector<SolveIteration<Scalar>> iterations;
    StationaryPolicy final_policy;
    FailureVector<Scalar> q_star;
    Termination termination = Termination::Converged;
    Scalar oe_residual{};
    double wall_time_ms = 0.0;

    /// Number of policy changes made before the stopping test held.
    std::size_t improvement_rounds() const { return iterations.empty() ? 0 : iterations.size() - 1; }
};

struct Improvement {
    StationaryPolicy policy;
    StateSet improved_states;
};

/// One policy-improvement step on G*: switch to the minimiser of
/// p(B|i,a) + sum_{j in G*} p(j|i,a) q_j over the actions of A*(i) that beat
/// q_i by more than `eps`, smallest ActionId on ties; keep g(i) otherwise.
template <class Scalar>
Improvement improve_policy(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                           const StationaryPolicy& policy, const FailureVector<Scalar>& q, double eps);

/// Policy iteration over the restricted class, with the two degenerate shortcuts
/// (F* = ∅ gives q* = 1 on B^c, G* = ∅ gives q* = 0 on B^c).
template <class Scalar>
SolveReport<Scalar> solve(const Model<Scalar>& model, const SolveOptions& options = {});

/// max_{i in G*} |q_i - min_{a in A(i)} [p(B|i,a) + sum_{j in G*} p(j|i,a) q_j]|.
template <class Scalar>
Scalar check_improved_oe(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                         const FailureVector<Scalar>& q);

/// Same residual for the plain optimality equation over all of B^c. A zero
/// residual here does not certify optimality.
template <class Scalar>
Scalar check_plain_oe(const Model<Scalar>& model, const FailureVector<Scalar>& q);

}  // namespace relia
