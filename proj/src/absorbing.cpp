#include "relia/absorbing.hpp"

#include <algorithm>

namespace relia {

bool AbsorbingAnalysis::allows(StateId s, ActionId a) const {
    const auto& list = restricted_actions.at(s.index);
    return std::binary_search(list.begin(), list.end(), a);
}

template <class Scalar>
AbsorbingAnalysis compute_largest_absorbing(const Model<Scalar>& model) {
    const std::size_t n = model.num_states();
    AbsorbingAnalysis out;
    out.model_fingerprint = model.fingerprint();

    StateSet covered = model.failed();  // U_0 ∪ ... ∪ U_{n-1}
    StateSet remaining = model.survivors();
    while (true) {
        StateSet layer(n);
        for (const auto s : remaining.members()) {
            const auto actions = model.actions(s);
            const bool forced = std::all_of(actions.begin(), actions.end(),
                                            [&](ActionId a) { return model.reaches(s, a, covered); });
            if (forced) layer.insert(s);
        }
        remaining -= layer;
        covered |= layer;
        const bool stop = layer.empty() || remaining.empty();
        out.layers.push_back(std::move(layer));
        if (stop) break;
    }
    out.n_star = out.layers.size();
    out.f_star = remaining;
    out.g_star = model.survivors() - remaining;

    // On F* the last layer is empty, so `covered` is exactly S \ F*.
    out.restricted_actions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StateId s{i};
        for (const auto a : model.actions(s)) {
            if (!out.f_star.contains(s) || !model.reaches(s, a, covered))
                out.restricted_actions[i].push_back(a);
        }
    }
    return out;
}

bool membership_test(const AbsorbingAnalysis& analysis, const StationaryPolicy& policy) {
    if (analysis.model_fingerprint != policy.model_fingerprint())
        throw Error(ErrorCode::ModelMismatch, "policy and absorbing analysis come from different models");
    for (std::size_t i = 0; i < policy.size(); ++i)
        if (!analysis.allows(StateId{i}, policy[StateId{i}])) return false;
    return true;
}

template <class Scalar>
PolicyAbsorption absorbing_set_of_policy(const Model<Scalar>& model, const StationaryPolicy& policy) {
    if (policy.model_fingerprint() != model.fingerprint())
        throw Error(ErrorCode::ModelMismatch, "policy was built for a different model");
    const std::size_t n = model.num_states();
    PolicyAbsorption out;
    StateSet covered = model.failed();
    StateSet remaining = model.survivors();
    while (true) {
        StateSet layer(n);
        for (const auto s : remaining.members())
            if (model.reaches(s, policy[s], covered)) layer.insert(s);
        remaining -= layer;
        covered |= layer;
        const bool stop = layer.empty() || remaining.empty();
        out.g_layers.push_back(std::move(layer));
        if (stop) break;
    }
    out.n_g = out.g_layers.size();
    out.f_of_g = remaining;
    return out;
}

std::optional<std::uint64_t> restricted_policy_count(const AbsorbingAnalysis& analysis) {
    std::vector<std::size_t> counts;
    for (const auto& list : analysis.restricted_actions) counts.push_back(list.size());
    return checked_product(counts);
}

template <class Scalar>
StationaryPolicy first_restricted_policy(const AbsorbingAnalysis& analysis, const Model<Scalar>& model) {
    std::vector<ActionId> choices;
    for (const auto& list : analysis.restricted_actions) choices.push_back(list.front());
    return StationaryPolicy::create(model, std::move(choices));
}

template <class Scalar>
void enumerate_product(const Model<Scalar>& model, const std::vector<std::vector<ActionId>>& choices,
                       const std::function<bool(const StationaryPolicy&)>& visit) {
    const std::size_t n = choices.size();
    for (const auto& list : choices)
        if (list.empty()) return;
    std::vector<std::size_t> digit(n, 0);
    std::vector<ActionId> current(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) current[i] = choices[i][digit[i]];
        if (!visit(StationaryPolicy::create(model, current))) return;
        // odometer: last state varies fastest
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++digit[pos] < choices[pos].size()) break;
            digit[pos] = 0;
            if (pos == 0) return;
        }
        if (n == 0) return;
    }
}

template <class Scalar>
void enumerate_restricted_policies(const AbsorbingAnalysis& analysis, const Model<Scalar>& model,
                                   const std::function<bool(const StationaryPolicy&)>& visit,
                                   std::uint64_t cap) {
    if (analysis.model_fingerprint != model.fingerprint())
        throw Error(ErrorCode::ModelMismatch, "absorbing analysis was built for a different model");
    const auto count = restricted_policy_count(analysis);
    if (!count || *count > cap)
        throw Error(ErrorCode::TooManyPolicies, "restricted policy class exceeds the enumeration cap",
                    {{"cap", cap}, {"count", count ? nlohmann::ordered_json(*count) : nlohmann::ordered_json(">2^64")}});
    enumerate_product(model, analysis.restricted_actions, visit);
}

template <class Scalar>
std::vector<StationaryPolicy> restricted_policies(const AbsorbingAnalysis& analysis, const Model<Scalar>& model,
                                                  std::uint64_t cap) {
    std::vector<StationaryPolicy> out;
    enumerate_restricted_policies(analysis, model, [&](const StationaryPolicy& g) {
        out.push_back(g);
        return true;
    }, cap);
    return out;
}

#define RELIA_INSTANTIATE(S)                                                                             \
    template AbsorbingAnalysis compute_largest_absorbing(const Model<S>&);                               \
    template PolicyAbsorption absorbing_set_of_policy(const Model<S>&, const StationaryPolicy&);         \
    template StationaryPolicy first_restricted_policy(const AbsorbingAnalysis&, const Model<S>&);        \
    template void enumerate_product(const Model<S>&, const std::vector<std::vector<ActionId>>&,          \
                                    const std::function<bool(const StationaryPolicy&)>&);                \
    template void enumerate_restricted_policies(const AbsorbingAnalysis&, const Model<S>&,               \
                                                const std::function<bool(const StationaryPolicy&)>&,     \
                                                std::uint64_t);                                          \
    template std::vector<StationaryPolicy> restricted_policies(const AbsorbingAnalysis&, const Model<S>&, \
                                                               std::uint64_t);

RELIA_INSTANTIATE(double)
RELIA_INSTANTIATE(Rational)

#undef RELIA_INSTANTIATE

}  // namespace relia
