#include "relia/report.hpp"

#include "relia/model_io.hpp"

namespace relia::report {

template <class Scalar>
Json model_summary(const Model<Scalar>& model) {
    return Json{{"states", model.num_states()},
                {"failed", model.failed().size()},
                {"pairs", model.num_pairs()},
                {"arithmetic", std::string(to_string(model.arithmetic()))}};
}

template <class Scalar>
Json state_set(const Model<Scalar>& model, const StateSet& set) {
    Json out = Json::array();
    for (const auto s : set.members()) out.push_back(model.state_name(s));
    return out;
}

template <class Scalar>
Json analysis(const Model<Scalar>& model, const AbsorbingAnalysis& a) {
    Json layers = Json::array();
    for (const auto& layer : a.layers) layers.push_back(state_set(model, layer));
    Json restricted = Json::object();
    for (std::size_t i = 0; i < a.restricted_actions.size(); ++i) {
        Json names = Json::array();
        for (const auto act : a.restricted_actions[i]) names.push_back(model.action_name(act));
        restricted[model.state_name(StateId{i})] = names;
    }
    return Json{{"layers", layers},
                {"n_star", a.n_star},
                {"f_star", state_set(model, a.f_star)},
                {"g_star", state_set(model, a.g_star)},
                {"restricted_actions", restricted}};
}

template <class Scalar>
Json failure_vector(const Model<Scalar>& model, const FailureVector<Scalar>& q) {
    Json out = Json::object();
    for (std::size_t i = 0; i < q.size(); ++i) out[model.state_name(StateId{i})] = Num<Scalar>::format(q.q[i]);
    return out;
}

template <class Scalar>
Json reliability_vector(const Model<Scalar>& model, const FailureVector<Scalar>& q) {
    Json out = Json::object();
    for (std::size_t i = 0; i < q.size(); ++i)
        out[model.state_name(StateId{i})] = Num<Scalar>::format(q.reliability(StateId{i}));
    return out;
}

template <class Scalar>
Json policy(const Model<Scalar>& model, const StationaryPolicy& g) {
    return policy_to_json(model, g);
}

template <class Scalar>
Json solve(const Model<Scalar>& model, const SolveReport<Scalar>& r) {
    Json iterations = Json::array();
    for (const auto& it : r.iterations) {
        iterations.push_back(Json{{"policy", policy(model, it.policy)},
                                  {"q", failure_vector(model, it.q)},
                                  {"improved_states", state_set(model, it.improved_states)}});
    }
    return Json{{"model", model_summary(model)},
                {"analysis", analysis(model, r.analysis)},
                {"iterations", iterations},
                {"final_policy", policy(model, r.final_policy)},
                {"q_star", failure_vector(model, r.q_star)},
                {"r_star", reliability_vector(model, r.q_star)},
                {"termination", std::string(to_string(r.termination))},
                {"oe_residual", Num<Scalar>::format(r.oe_residual)},
                {"wall_time_ms", r.wall_time_ms}};
}

template <class Scalar>
Json simulation(const Model<Scalar>& model, const SimulationEstimate& e, std::uint64_t seed) {
    return Json{{"state", model.state_name(e.state)},
                {"horizon", e.horizon},
                {"trials", e.trials},
                {"hit_count", e.hit_count},
                {"estimate", Num<double>::format(e.estimate)},
                {"half_width_95", Num<double>::format(e.half_width_95)},
                {"seed", seed},
                {"rng", kSimulationRng}};
}

#define RELIA_INSTANTIATE(S)                                                    \
    template Json model_summary(const Model<S>&);                               \
    template Json state_set(const Model<S>&, const StateSet&);                  \
    template Json analysis(const Model<S>&, const AbsorbingAnalysis&);          \
    template Json failure_vector(const Model<S>&, const FailureVector<S>&);     \
    template Json reliability_vector(const Model<S>&, const FailureVector<S>&); \
    template Json policy(const Model<S>&, const StationaryPolicy&);             \
    template Json solve(const Model<S>&, const SolveReport<S>&);                \
    template Json simulation(const Model<S>&, const SimulationEstimate&, std::uint64_t);

RELIA_INSTANTIATE(double)
RELIA_INSTANTIATE(Rational)

#undef RELIA_INSTANTIATE

}  // namespace relia::report
