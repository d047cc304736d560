#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "relia/model.hpp"

namespace relia {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Result of the layered peeling of B^c.
///
/// U_0 = B is implicit. U_n collects the states outside U_0..U_{n-1} from which
/// every action puts positive mass on U_0 ∪ ... ∪ U_{n-1}. Peeling stops at the
/// first N* with U_{N*} empty or nothing left; what remains is F*, the largest
/// set of survivor states that some stationary policy never leaves.
struct AbsorbingAnalysis {
    std::vector<StateSet> layers;  // U_1 .. U_{N*}; the last one may be empty
    std::size_t n_star = 0;
    StateSet f_star;
    StateSet g_star;
    /// A*(i): A(i) on B ∪ G*, the actions keeping all mass in F* on F*.
    std::vector<std::vector<ActionId>> restricted_actions;
    std::uint64_t model_fingerprint = 0;

    bool allows(StateId s, ActionId a) const;
};

/// Layered construction of G_1(g), G_2(g), ... for one fixed policy.
struct PolicyAbsorption {
    std::vector<StateSet> g_layers;
    std::size_t n_g = 0;
    StateSet f_of_g;  // F(g), the largest B^c-closed set of g
};

template <class Scalar>
AbsorbingAnalysis compute_largest_absorbing(const Model<Scalar>& model);

/// True iff the policy picks from A*(i) on every survivor state, which is
/// exactly the condition F(g) = F*.
bool membership_test(const AbsorbingAnalysis& analysis, const StationaryPolicy& policy);

template <class Scalar>
PolicyAbsorption absorbing_set_of_policy(const Model<Scalar>& model, const StationaryPolicy& policy);

/// |prod_i A*(i)|, or nullopt when it overflows 64 bits.
std::optional<std::uint64_t> restricted_policy_count(const AbsorbingAnalysis& analysis);

/// Lexicographically first member of the restricted class.
template <class Scalar>
StationaryPolicy first_restricted_policy(const AbsorbingAnalysis& analysis, const Model<Scalar>& model);

/// Visits every policy with choice(i) in A*(i), in lexicographic order of the
/// action indices (state 0 most significant). The visitor returns false to stop.
/// Throws TooManyPolicies when the class is larger than `cap`.
template <class Scalar>
void enumerate_restricted_policies(const AbsorbingAnalysis& analysis, const Model<Scalar>& model,
                                   const std::function<bool(const StationaryPolicy&)>& visit,
                                   std::uint64_t cap = kDefaultEnumerationCap);

/// Convenience form collecting the whole sequence.
template <class Scalar>
std::vector<StationaryPolicy> restricted_policies(const AbsorbingAnalysis& analysis, const Model<Scalar>& model,
                                                  std::uint64_t cap = kDefaultEnumerationCap);

/// Enumerates the product of arbitrary per-state action lists in the same order.
template <class Scalar>
void enumerate_product(const Model<Scalar>& model, const std::vector<std::vector<ActionId>>& choices,
                       const std::function<bool(const StationaryPolicy&)>& visit);

}  // namespace relia
