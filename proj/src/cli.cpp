#include "relia/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "relia/model_io.hpp"
#include "relia/report.hpp"

namespace relia::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kOracleTol = 1e-8;

// Raised for missing files and bad flag combinations.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PesOptions pes_options(const Command& c) {
    PesOptions o;
    if (c.tol) o.tol = *c.tol;
    if (c.max_iters) o.max_iters = *c.max_iters;
    return o;
}

ViOptions vi_options(const Command& c) {
    ViOptions o;
    if (c.tol) o.tol = *c.tol;
    if (c.max_iters) o.max_iters = *c.max_iters;
    return o;
}

template <class Scalar>
StationaryPolicy read_policy(const Model<Scalar>& model, const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw UsageError("policy file '" + path.string() + "' not found");
    return load_policy(model, path);
}

template <class Scalar>
SolveOptions solve_options(const Model<Scalar>& model, const Command& c) {
    SolveOptions o;
    o.improve_eps = c.improve_eps;
    if (c.initial_policy_path) o.initial_policy = read_policy(model, *c.initial_policy_path);
    return o;
}

template <class Scalar>
double max_gap(const FailureVector<Scalar>& a, const FailureVector<double>& b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        gap = std::max(gap, std::abs(Num<Scalar>::to_double(a.q[i]) - b.q[i]));
    return gap;
}

template <class Scalar>
FailureVector<double> as_double(const FailureVector<Scalar>& q) {
    FailureVector<double> out;
    for (const auto& v : q.q) out.q.push_back(Num<Scalar>::to_double(v));
    return out;
}

template <class Scalar>
int run_verb(const Model<Scalar>& model, const Command& c, std::ostream& out, std::ostream& err) {
    Json report;
    switch (c.verb) {
        case Verb::Validate: {
            report = report::model_summary(model);
            report["valid"] = true;
            err << "valid model: " << model.num_states() << " states, " << model.failed().size()
                << " failed, " << model.num_pairs() << " state-action pairs ("
                << to_string(model.arithmetic()) << ")\n";
            break;
        }
        case Verb::Absorbing: {
            const auto a = compute_largest_absorbing(model);
            report = report::analysis(model, a);
            const auto count = restricted_policy_count(a);
            report["restricted_policy_count"] = count ? Json(*count) : Json(nullptr);
            err << "N* = " << a.n_star << ", |F*| = " << a.f_star.size() << ", |G*| = " << a.g_star.size() << "\n";
            break;
        }
        case Verb::Solve: {
            const auto r = solve(model, solve_options(model, c));
            report = report::solve(model, r);
            err << "termination: " << to_string(r.termination) << " after " << r.iterations.size()
                << " evaluation(s); oe residual " << Num<Scalar>::format(r.oe_residual) << "\n";
            break;
        }
        case Verb::Evaluate: {
            if (!c.policy_path) throw UsageError("evaluate needs --policy FILE");
            const auto g = read_policy(model, *c.policy_path);
            const auto a = compute_largest_absorbing(model);
            report["policy"] = report::policy(model, g);
            if (membership_test(a, g)) {
                double residual = 0.0;
                const auto q = evaluate_in_class(model, a, g, {}, &residual);
                report["in_class"] = true;
                report["method"] = "reduced_system";
                report["q"] = report::failure_vector(model, q);
                report["r"] = report::reliability_vector(model, q);
                report["residual"] = Num<double>::format(residual);
            } else {
                const auto result = evaluate_policy_pes(model, g, pes_options(c));
                report["in_class"] = false;
                report["method"] = "minimal_solution_iteration";
                report["warning"] = "policy is outside the restricted class; evaluated by iteration from zero";
                report["q"] = report::failure_vector(model, result.q);
                report["r"] = report::reliability_vector(model, result.q);
                report["iterations"] = result.iterations;
                report["gap"] = Num<double>::format(result.gap);
                err << "warning: policy is outside the restricted class\n";
            }
            break;
        }
        case Verb::Oracle: {
            const auto r = solve(model, solve_options(model, c));
            const auto float_model = to_float_model(model);
            const auto vi = value_iterate_oe(float_model, vi_options(c));

            Json oracle;
            oracle["q_star_vi"] = report::failure_vector(float_model, vi.q);
            oracle["iterations_used"] = vi.iterations;
            oracle["residual_gap"] = Num<double>::format(vi.gap);
            const double vi_gap = max_gap(r.q_star, vi.q);
            std::optional<double> enum_gap;
            const auto space = policy_space_size(model);
            if (space <= c.enum_cap) {
                const auto best = enumerate_and_minimize(model, pes_options(c), c.enum_cap);
                oracle["best_policy_enum"] = report::policy(model, best.policy);
                oracle["q_star_enum"] = report::failure_vector(model, best.q);
                oracle["policies_evaluated"] = best.policies_evaluated;
                enum_gap = max_gap(r.q_star, as_double(best.q));
            } else {
                oracle["best_policy_enum"] = nullptr;
                oracle["q_star_enum"] = nullptr;
                oracle["enumeration_skipped"] = "policy space of " + std::to_string(space) + " exceeds --enum-cap";
            }
            const bool agree = vi_gap <= kOracleTol && (!enum_gap || *enum_gap <= kOracleTol);
            report["solve"] = report::solve(model, r);
            report["oracle"] = oracle;
            report["agreement"] = Json{{"oracle_tol", kOracleTol},
                                       {"vi_vs_solve", Num<double>::format(vi_gap)},
                                       {"enum_vs_solve", enum_gap ? Json(Num<double>::format(*enum_gap)) : Json(nullptr)},
                                       {"agree", agree}};
            err << (agree ? "oracles agree with the solver" : "ORACLE DISAGREEMENT") << " (vi gap " << vi_gap << ")\n";
            break;
        }
        case Verb::Simulate: {
            if (!c.state) throw UsageError("simulate needs --state NAME");
            const auto s = model.find_state(*c.state);
            if (!s)
                throw Error(ErrorCode::UnknownStateOrAction, "unknown state '" + *c.state + "'",
                            {{"kind", "state"}, {"name", *c.state}});
            const auto g = c.policy_path ? read_policy(model, *c.policy_path) : solve(model).final_policy;
            const auto e = simulate_survival(model, g, *s, c.horizon, c.trials, c.seed, c.threads);
            report = report::simulation(model, e, c.seed);
            report["policy"] = report::policy(model, g);
            err << "P(hit B within " << c.horizon << " steps) ~ " << e.estimate << " +/- " << e.half_width_95 << "\n";
            break;
        }
    }
    out << report.dump(2) << "\n";
    return kOk;
}

}  // namespace

int run(const Command& command, std::ostream& out, std::ostream& err) {
    try {
        if (!std::filesystem::exists(command.model_path))
            throw UsageError("model file '" + command.model_path.string() + "' not found");
        const auto raw = load_raw_model(command.model_path);
        const auto model = validate_any(raw, command.exact ? std::optional(Arithmetic::Exact) : std::nullopt);
        return std::visit([&](const auto& m) { return run_verb(m, command, out, err); }, model);
    } catch (const Error& e) {
        out << Json{{"error", e.to_json()}}.dump(2) << "\n";
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return kDomainError;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "i/o error: " << e.what() << "\n";
        return kUsageError;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minimal failure probability and optimal policies for controlled Markov systems"};
    app.require_subcommand(1);
    Command c;
    std::string model_path;

    struct Spec {
        const char* name;
        Verb verb;
        const char* help;
    };
    const Spec specs[] = {
        {"validate", Verb::Validate, "Check a model file and print a summary"},
        {"absorbing", Verb::Absorbing, "Compute the layers, F*, G* and the restricted action sets"},
        {"solve", Verb::Solve, "Run policy iteration and report q*, R* and an optimal policy"},
        {"evaluate", Verb::Evaluate, "Failure probabilities of one stationary policy"},
        {"oracle", Verb::Oracle, "Cross-check the solver with value iteration and enumeration"},
        {"simulate", Verb::Simulate, "Monte-Carlo estimate of P(tau_B <= horizon)"},
    };
    for (const auto& spec : specs) {
        auto* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option("model", model_path, "Model file (JSON)")->required();
        sub->add_flag("--exact", c.exact, "Force exact rational arithmetic");
        sub->add_option("--tol", c.tol, "Stopping tolerance of the iterative evaluators");
        sub->add_option("--max-iters", c.max_iters, "Iteration limit of the iterative evaluators");
        sub->add_option("--improve-eps", c.improve_eps, "Strict-improvement margin (float mode)");
        sub->add_option("--initial-policy", c.initial_policy_path, "Starting policy for policy iteration");
        sub->add_option("--enum-cap", c.enum_cap, "Largest policy space the enumeration oracle will visit");
        sub->add_option("--seed", c.seed, "Simulation seed");
        sub->add_option("--policy", c.policy_path, "Policy file (JSON: state -> action)");
        sub->add_option("--state", c.state, "Start state for simulation");
        sub->add_option("--horizon", c.horizon, "Simulation horizon");
        sub->add_option("--trials", c.trials, "Number of simulated trajectories");
        sub->add_option("--threads", c.threads, "Simulation worker threads");
        sub->callback([&c, verb = spec.verb] { c.verb = verb; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }
    c.model_path = model_path;
    return run(c, out, err);
}

}  // namespace relia::cli
