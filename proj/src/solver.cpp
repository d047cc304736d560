#include "relia/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace relia {

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::DegenerateFStarEmpty: return "degenerate_f_star_empty";
        case Termination::DegenerateGStarEmpty: return "degenerate_g_star_empty";
    }
    return "unknown";
}

namespace {

// p(B|i,a) + sum_{j in on} p(j|i,a) q_j
template <class Scalar>
Scalar one_step(const Model<Scalar>& model, StateId s, ActionId a, const StateSet& on,
                const FailureVector<Scalar>& q) {
    const auto row = model.row(s, a);
    Scalar acc = Num<Scalar>::zero();
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] == 0) continue;
        const StateId t{j};
        if (model.is_failed(t)) acc += row[j];
        else if (on.contains(t)) acc += row[j] * q[t];
    }
    return acc;
}

template <class Scalar>
Scalar abs_value(const Scalar& x) {
    if constexpr (is_exact_v<Scalar>) return abs(x);
    else return std::abs(x);
}

template <class Scalar>
Scalar oe_residual_over(const Model<Scalar>& model, const StateSet& on, const FailureVector<Scalar>& q) {
    Scalar worst = Num<Scalar>::zero();
    for (const auto s : on.members()) {
        std::optional<Scalar> best;
        for (const auto a : model.actions(s)) {
            Scalar w = one_step(model, s, a, on, q);
            if (!best || w < *best) best = std::move(w);
        }
        Scalar gap = abs_value(Scalar(q[s] - *best));
        if (gap > worst) worst = std::move(gap);
    }
    return worst;
}

template <class Scalar>
FailureVector<Scalar> constant_on_survivors(const Model<Scalar>& model, const Scalar& value) {
    FailureVector<Scalar> q;
    q.q.assign(model.num_states(), value);
    for (const auto s : model.failed().members()) q.q[s.index] = Num<Scalar>::one();
    return q;
}

}  // namespace

template <class Scalar>
Scalar check_improved_oe(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                         const FailureVector<Scalar>& q) {
    return oe_residual_over(model, analysis.g_star, q);
}

template <class Scalar>
Scalar check_plain_oe(const Model<Scalar>& model, const FailureVector<Scalar>& q) {
    return oe_residual_over(model, model.survivors(), q);
}

template <class Scalar>
Improvement improve_policy(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                           const StationaryPolicy& policy, const FailureVector<Scalar>& q, double eps) {
    std::vector<ActionId> next = policy.choices();
    StateSet improved(model.num_states());
    const Scalar margin = is_exact_v<Scalar> ? Num<Scalar>::zero() : Scalar(eps);
    for (const auto s : analysis.g_star.members()) {
        std::optional<ActionId> best_action;
        std::optional<Scalar> best_value;
        for (const auto a : analysis.restricted_actions[s.index]) {
            Scalar w = one_step(model, s, a, analysis.g_star, q);
            if (!(Scalar(q[s] - w) > margin)) continue;
            // actions are visited in increasing id, so strict < keeps the smallest on ties
            if (!best_value || w < *best_value) {
                best_value = std::move(w);
                best_action = a;
            }
        }
        if (best_action && *best_action != policy[s]) {
            next[s.index] = *best_action;
            improved.insert(s);
        }
    }
    return {StationaryPolicy::create(model, std::move(next)), std::move(improved)};
}

template <class Scalar>
SolveReport<Scalar> solve(const Model<Scalar>& model, const SolveOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    auto analysis = compute_largest_absorbing(model);

    auto finish = [&](SolveReport<Scalar> report) {
        report.oe_residual = check_improved_oe(model, report.analysis, report.q_star);
        if constexpr (is_exact_v<Scalar>) {
            if (report.oe_residual != 0)
                throw Error(ErrorCode::NotConverged, "returned vector does not solve the improved optimality equation",
                            {{"oe_residual", Num<Scalar>::format(report.oe_residual)}});
        } else {
            if (!(report.oe_residual <= options.oe_tol))
                throw Error(ErrorCode::NotConverged, "returned vector does not solve the improved optimality equation",
                            {{"oe_residual", report.oe_residual}, {"oe_tol", options.oe_tol}});
        }
        report.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        return report;
    };

    if (options.initial_policy && options.initial_policy->model_fingerprint() != model.fingerprint())
        throw Error(ErrorCode::ModelMismatch, "initial policy was built for a different model");

    if (analysis.f_star.empty()) {
        auto policy = first_policy(model);
        return finish(SolveReport<Scalar>{std::move(analysis), {}, std::move(policy),
                                          constant_on_survivors(model, Num<Scalar>::one()),
                                          Termination::DegenerateFStarEmpty, {}, 0.0});
    }
    if (analysis.g_star.empty()) {
        auto policy = first_restricted_policy(analysis, model);
        return finish(SolveReport<Scalar>{std::move(analysis), {}, std::move(policy),
                                          constant_on_survivors(model, Num<Scalar>::zero()),
                                          Termination::DegenerateGStarEmpty, {}, 0.0});
    }

    StationaryPolicy current = first_restricted_policy(analysis, model);
    if (options.initial_policy) {
        if (!membership_test(analysis, *options.initial_policy))
            throw Error(ErrorCode::PolicyOutsideClass, "initial policy is outside the restricted class");
        current = *options.initial_policy;
    }

    const auto class_size = restricted_policy_count(analysis).value_or(std::numeric_limits<std::uint64_t>::max());
    const auto budget = std::max<std::uint64_t>(class_size, options.max_policy_iters);

    std::vector<SolveIteration<Scalar>> iterations;
    for (std::uint64_t round = 0;; ++round) {
        double residual = 0.0;
        auto q = evaluate_in_class(model, analysis, current, options.tolerances, &residual);
        auto step = improve_policy(model, analysis, current, q, options.improve_eps);
        const bool stop = step.policy == current;
        iterations.push_back({current, q, step.improved_states, residual});
        if (stop) {
            auto q_star = std::move(q);
            return finish(SolveReport<Scalar>{std::move(analysis), std::move(iterations), std::move(current),
                                              std::move(q_star), Termination::Converged, {}, 0.0});
        }
        if (round + 1 > budget)
            throw Error(ErrorCode::IterationBudgetExceeded, "policy iteration exceeded its improvement budget",
                        {{"budget", budget}});
        current = std::move(step.policy);
    }
}

template double check_improved_oe(const Model<double>&, const AbsorbingAnalysis&, const FailureVector<double>&);
template Rational check_improved_oe(const Model<Rational>&, const AbsorbingAnalysis&, const FailureVector<Rational>&);
template double check_plain_oe(const Model<double>&, const FailureVector<double>&);
template Rational check_plain_oe(const Model<Rational>&, const FailureVector<Rational>&);
template Improvement improve_policy(const Model<double>&, const AbsorbingAnalysis&, const StationaryPolicy&,
                                    const FailureVector<double>&, double);
template Improvement improve_policy(const Model<Rational>&, const AbsorbingAnalysis&, const StationaryPolicy&,
                                    const FailureVector<Rational>&, double);
template SolveReport<double> solve(const Model<double>&, const SolveOptions&);
template SolveReport<Rational> solve(const Model<Rational>&, const SolveOptions&);

}  // namespace relia
