#include "relia/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace relia {

namespace {

template <class Scalar>
void check_policy(const Model<Scalar>& model, const StationaryPolicy& policy) {
    if (policy.model_fingerprint() != model.fingerprint())
        throw Error(ErrorCode::ModelMismatch, "policy was built for a different model");
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, double pivot_tol) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a[r * n + k]) > std::abs(a[pivot * n + k])) pivot = r;
        if (std::abs(a[pivot * n + k]) < pivot_tol)
            throw Error(ErrorCode::SingularSystem, "pivot below tolerance during elimination",
                        {{"column", k}, {"pivot", std::abs(a[pivot * n + k])}});
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[pivot * n + c]);
            std::swap(b[k], b[pivot]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double factor = a[r * n + k] / a[k * n + k];
            if (factor == 0.0) continue;
            a[r * n + k] = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) a[r * n + c] -= factor * a[k * n + c];
            b[r] -= factor * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
        x[i] = acc / a[i * n + i];
    }
    return x;
}

// Bareiss elimination on the integer-scaled augmented matrix [A | b].
std::vector<Rational> solve_fraction_free(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    const std::size_t n = b.size();
    const std::size_t w = n + 1;
    std::vector<mpz_class> m(n * w);
    for (std::size_t r = 0; r < n; ++r) {
        mpz_class scale = b[r].get_den();
        for (std::size_t c = 0; c < n; ++c) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), a[r * n + c].get_den_mpz_t());
        for (std::size_t c = 0; c < n; ++c) m[r * w + c] = a[r * n + c].get_num() * (scale / a[r * n + c].get_den());
        m[r * w + n] = b[r].get_num() * (scale / b[r].get_den());
    }
    mpz_class previous = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        while (pivot < n && m[pivot * w + k] == 0) ++pivot;
        if (pivot == n)
            throw Error(ErrorCode::SingularSystem, "zero pivot in exact elimination", {{"column", k}});
        if (pivot != k)
            for (std::size_t c = 0; c < w; ++c) std::swap(m[k * w + c], m[pivot * w + c]);
        for (std::size_t r = k + 1; r < n; ++r) {
            for (std::size_t c = k + 1; c < w; ++c) {
                m[r * w + c] = m[r * w + c] * m[k * w + k] - m[r * w + k] * m[k * w + c];
                mpz_divexact(m[r * w + c].get_mpz_t(), m[r * w + c].get_mpz_t(), previous.get_mpz_t());
            }
            m[r * w + k] = 0;
        }
        previous = m[k * w + k];
    }
    std::vector<Rational> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rational acc(m[i * w + n]);
        for (std::size_t c = i + 1; c < n; ++c) acc -= Rational(m[i * w + c]) * x[c];
        x[i] = acc / Rational(m[i * w + i]);
        x[i].canonicalize();
    }
    return x;
}

template <class Scalar>
std::vector<Scalar> identity_minus(const ReducedSystem<Scalar>& system) {
    const std::size_t n = system.size();
    std::vector<Scalar> a(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            a[r * n + c] = (r == c ? Num<Scalar>::one() : Num<Scalar>::zero()) - system.p(r, c);
    return a;
}

// System x = p(B|i,g(i)) + sum_{j in on} p(j|i,g(i)) x_j over the states of `on`.
template <class Scalar>
ReducedSystem<Scalar> restrict_to(const Model<Scalar>& model, const StationaryPolicy& policy, const StateSet& on) {
    ReducedSystem<Scalar> sys;
    sys.states = on.members();
    const std::size_t n = sys.states.size();
    sys.p_gstar.assign(n * n, Num<Scalar>::zero());
    sys.v_b.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const StateId s = sys.states[r];
        const auto row = model.row(s, policy[s]);
        for (std::size_t c = 0; c < n; ++c) sys.p_gstar[r * n + c] = row[sys.states[c].index];
        sys.v_b.push_back(model.mass(s, policy[s], model.failed()));
    }
    return sys;
}

}  // namespace

template <class Scalar>
double reduced_residual(const ReducedSystem<Scalar>& system, const std::vector<Scalar>& x) {
    const std::size_t n = system.size();
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        Scalar lhs = x[r];
        for (std::size_t c = 0; c < n; ++c) lhs -= system.p(r, c) * x[c];
        lhs -= system.v_b[r];
        worst = std::max(worst, std::abs(Num<Scalar>::to_double(lhs)));
    }
    return worst;
}

template <class Scalar>
ReducedSystem<Scalar> build_reduced_system(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                                           const StationaryPolicy& policy) {
    check_policy(model, policy);
    if (!membership_test(analysis, policy))
        throw Error(ErrorCode::PolicyOutsideClass,
                    "policy leaves the restricted class; its reduced system is not uniquely solvable");
    if (analysis.g_star.empty())
        throw Error(ErrorCode::EmptyGStar, "G* is empty; failure probabilities are 0 on all survivor states");
    return restrict_to(model, policy, analysis.g_star);
}

template <class Scalar>
GStarValues<Scalar> solve_reduced(const ReducedSystem<Scalar>& system, const SolveTolerances& tol) {
    GStarValues<Scalar> out;
    out.states = system.states;
    if constexpr (is_exact_v<Scalar>) {
        out.values = solve_fraction_free(identity_minus(system), system.v_b);
        out.residual = reduced_residual(system, out.values);
        for (std::size_t r = 0; r < out.values.size(); ++r) {
            if (out.values[r] < 0 || out.values[r] > 1)
                throw Error(ErrorCode::OutOfRangeSolution, "solved failure probability outside [0, 1]",
                            {{"position", r}, {"value", Num<Scalar>::format(out.values[r])}});
        }
    } else {
        out.values = solve_dense(identity_minus(system), system.v_b, tol.pivot_tol);
        out.residual = reduced_residual(system, out.values);
        if (out.residual > tol.solve_tol)
            throw Error(ErrorCode::ResidualTooLarge, "linear solve residual above tolerance",
                        {{"residual", out.residual}, {"solve_tol", tol.solve_tol}});
        for (std::size_t r = 0; r < out.values.size(); ++r) {
            double& v = out.values[r];
            if (v < -tol.clamp_tol || v > 1.0 + tol.clamp_tol)
                throw Error(ErrorCode::OutOfRangeSolution, "solved failure probability outside [0, 1]",
                            {{"position", r}, {"value", v}});
            v = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

template <class Scalar>
FailureVector<Scalar> assemble_failure_vector(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                                              const GStarValues<Scalar>& solved) {
    if (analysis.model_fingerprint != model.fingerprint())
        throw Error(ErrorCode::ModelMismatch, "absorbing analysis was built for a different model");
    StateSet covered(model.num_states());
    for (const auto s : solved.states) covered.insert(s);
    if (covered != analysis.g_star || solved.states.size() != solved.values.size() ||
        covered.size() != solved.states.size())
        throw Error(ErrorCode::CoverageMismatch, "solved values do not cover exactly G*");

    FailureVector<Scalar> out;
    out.q.assign(model.num_states(), Num<Scalar>::zero());
    for (const auto s : model.failed().members()) out.q[s.index] = Num<Scalar>::one();
    for (std::size_t r = 0; r < solved.states.size(); ++r) out.q[solved.states[r].index] = solved.values[r];
    return out;
}

template <class Scalar>
FailureVector<Scalar> evaluate_in_class(const Model<Scalar>& model, const AbsorbingAnalysis& analysis,
                                        const StationaryPolicy& policy, const SolveTolerances& tol,
                                        double* residual) {
    GStarValues<Scalar> solved;
    if (analysis.g_star.empty()) {
        check_policy(model, policy);
        if (!membership_test(analysis, policy))
            throw Error(ErrorCode::PolicyOutsideClass, "policy leaves the restricted class");
    } else {
        solved = solve_reduced(build_reduced_system(model, analysis, policy), tol);
    }
    if (residual) *residual = solved.residual;
    return assemble_failure_vector(model, analysis, solved);
}

namespace {

template <class Scalar>
std::vector<Scalar> pes_step(const Model<Scalar>& model, const StationaryPolicy& policy,
                             const std::vector<Scalar>& x) {
    std::vector<Scalar> next = x;
    for (const auto s : model.survivors().members()) {
        const auto row = model.row(s, policy[s]);
        Scalar acc = Num<Scalar>::zero();
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] == 0) continue;
            acc += model.is_failed(StateId{j}) ? row[j] : Scalar(row[j] * x[j]);
        }
        next[s.index] = acc;
    }
    return next;
}

template <class Scalar>
std::vector<Scalar> pes_start(const Model<Scalar>& model) {
    std::vector<Scalar> x(model.num_states(), Num<Scalar>::zero());
    for (const auto s : model.failed().members()) x[s.index] = Num<Scalar>::one();
    return x;
}

template <class Scalar>
double sup_gap(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        gap = std::max(gap, std::abs(Num<Scalar>::to_double(Scalar(a[i] - b[i]))));
    return gap;
}

[[noreturn]] void not_converged(std::size_t iterations, double gap) {
    throw Error(ErrorCode::NotConverged, "minimal-solution iteration did not converge",
                {{"iterations", iterations}, {"gap", gap}});
}

}  // namespace

template <class Scalar>
FailureVector<Scalar> pes_iterate(const Model<Scalar>& model, const StationaryPolicy& policy, std::size_t n) {
    check_policy(model, policy);
    auto x = pes_start(model);
    for (std::size_t k = 0; k < n; ++k) x = pes_step(model, policy, x);
    return FailureVector<Scalar>{std::move(x)};
}

template <class Scalar>
PesResult<Scalar> evaluate_policy_pes(const Model<Scalar>& model, const StationaryPolicy& policy,
                                      const PesOptions& options) {
    check_policy(model, policy);
    auto x = pes_start(model);
    const std::size_t settle = model.survivors().size();
    double previous_gap = 0.0;
    for (std::size_t n = 1; n <= options.max_iters; ++n) {
        auto next = pes_step(model, policy, x);
        const double gap = sup_gap(next, x);
        if constexpr (is_exact_v<Scalar>) {
            if (next == x) return {FailureVector<Scalar>{std::move(next)}, n, 0.0};
            x = std::move(next);
            if (n < settle) continue;

            // Support is final: states outside it never see B under the policy.
            StateSet support(model.num_states());
            for (const auto s : model.survivors().members())
                if (x[s.index] > 0) support.insert(s);
            const auto sys = restrict_to(model, policy, support);
            const auto limit = solve_fraction_free(identity_minus(sys), sys.v_b);
            auto candidate = pes_start(model);
            for (std::size_t r = 0; r < sys.states.size(); ++r) candidate[sys.states[r].index] = limit[r];
            bool dominates = true;
            for (std::size_t i = 0; i < x.size(); ++i) dominates = dominates && candidate[i] >= x[i];
            if (!dominates || pes_step(model, policy, candidate) != candidate) not_converged(n, gap);
            return {FailureVector<Scalar>{std::move(candidate)}, n, 0.0};
        } else {
            x = std::move(next);
            if (iteration_settled(gap, previous_gap, options.tol)) return {FailureVector<Scalar>{std::move(x)}, n, gap};
            previous_gap = gap;
            if (n == options.max_iters) not_converged(n, gap);
        }
    }
    not_converged(options.max_iters, 0.0);
}

#define RELIA_INSTANTIATE(S)                                                                                   \
    template double reduced_residual(const ReducedSystem<S>&, const std::vector<S>&);                          \
    template ReducedSystem<S> build_reduced_system(const Model<S>&, const AbsorbingAnalysis&,                  \
                                                   const StationaryPolicy&);                                   \
    template GStarValues<S> solve_reduced(const ReducedSystem<S>&, const SolveTolerances&);                    \
    template FailureVector<S> assemble_failure_vector(const Model<S>&, const AbsorbingAnalysis&,               \
                                                      const GStarValues<S>&);                                  \
    template FailureVector<S> evaluate_in_class(const Model<S>&, const AbsorbingAnalysis&,                     \
                                                const StationaryPolicy&, const SolveTolerances&, double*);     \
    template PesResult<S> evaluate_policy_pes(const Model<S>&, const StationaryPolicy&, const PesOptions&);    \
    template FailureVector<S> pes_iterate(const Model<S>&, const StationaryPolicy&, std::size_t);

RELIA_INSTANTIATE(double)
RELIA_INSTANTIATE(Rational)

#undef RELIA_INSTANTIATE

}  // namespace relia
