#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "relia/core.hpp"

namespace relia {

inline constexpr double kDefaultRowSumTol = 1e-9;

/// One transition row as written in a model file, entries still as literals.
struct RawTransition {
    std::string state;
    std::string action;
    std::vector<std::pair<std::string, std::string>> entries;
};

/// A model description as parsed from disk, before any validation.
struct RawModel {
    std::vector<std::string> states;
    std::vector<std::string> failed;
    std::vector<std::pair<std::string, std::vector<std::string>>> actions;
    std::vector<RawTransition> transitions;
    Arithmetic arithmetic = Arithmetic::Float;
    std::string description;
};

struct ValidationOptions {
    double row_sum_tol = kDefaultRowSumTol;
};

/// A validated controlled Markov system: states S, failed set B, admissible
/// actions A(i) and the kernel p(.|i,a) on K = {(i,a) : a in A(i)}.
///
/// Immutable once built. Rows are stored densely over S.
template <class Scalar>
class Model {
public:
    using scalar_type = Scalar;

    std::size_t num_states() const { return state_names_.size(); }
    std::size_t num_actions() const { return action_names_.size(); }
    /// |K|, the number of admissible state-action pairs.
    std::size_t num_pairs() const;

    const std::string& state_name(StateId s) const { return state_names_.at(s.index); }
    const std::string& action_name(ActionId a) const { return action_names_.at(a.index); }
    std::optional<StateId> find_state(std::string_view name) const;
    std::optional<ActionId> find_action(std::string_view name) const;

    const StateSet& failed() const { return failed_; }
    const StateSet& survivors() const { return survivors_; }
    bool is_failed(StateId s) const { return failed_.contains(s); }

    /// A(i), sorted by ActionId.
    std::span<const ActionId> actions(StateId s) const { return actions_.at(s.index); }
    bool admits(StateId s, ActionId a) const;

    /// p(.|i,a) over all of S. Throws InvalidPolicy when a is not in A(i).
    std::span<const Scalar> row(StateId s, ActionId a) const;

    /// p(set|i,a).
    Scalar mass(StateId s, ActionId a, const StateSet& set) const;

    /// True when some j in `set` has p(j|i,a) > 0.
    bool reaches(StateId s, ActionId a, const StateSet& set) const;

    Arithmetic arithmetic() const { return is_exact_v<Scalar> ? Arithmetic::Exact : Arithmetic::Float; }
    double row_sum_tol() const { return row_sum_tol_; }
    const std::string& description() const { return description_; }

    /// Content hash used to detect policies or analyses built for another model.
    std::uint64_t fingerprint() const { return fingerprint_; }

    const std::vector<std::string>& state_names() const { return state_names_; }
    const std::vector<std::string>& action_names() const { return action_names_; }

private:
    template <class S>
    friend Model<S> validate_model(const RawModel& raw, const ValidationOptions& options);
    template <class S>
    friend Model<double> to_float_model(const Model<S>& model);

    std::size_t slot(StateId s, ActionId a) const;

    std::vector<std::string> state_names_;
    std::vector<std::string> action_names_;
    StateSet failed_;
    StateSet survivors_;
    std::vector<std::vector<ActionId>> actions_;
    // rows_[i][k] is the row for (i, actions_[i][k]).
    std::vector<std::vector<std::vector<Scalar>>> rows_;
    double row_sum_tol_ = kDefaultRowSumTol;
    std::string description_;
    std::uint64_t fingerprint_ = 0;
};

using FloatModel = Model<double>;
using ExactModel = Model<Rational>;
using AnyModel = std::variant<FloatModel, ExactModel>;

/// Checks every model invariant and builds the indexed form. Probabilities
/// are taken verbatim: float rows are never renormalised, exact rows are
/// parsed without any floating point intermediate.
template <class Scalar>
Model<Scalar> validate_model(const RawModel& raw, const ValidationOptions& options = {});

/// Validates in the arithmetic the file asks for, or in `force` when given.
AnyModel validate_any(const RawModel& raw, std::optional<Arithmetic> force = std::nullopt,
                      const ValidationOptions& options = {});

/// Same structure with every probability rounded to double.
template <class Scalar>
Model<double> to_float_model(const Model<Scalar>& model);

/// Deterministic stationary policy: one admissible action per state.
class StationaryPolicy {
public:
    template <class Scalar>
    static StationaryPolicy create(const Model<Scalar>& model, std::vector<ActionId> choices);

    ActionId operator[](StateId s) const { return choices_.at(s.index); }
    const std::vector<ActionId>& choices() const { return choices_; }
    std::size_t size() const { return choices_.size(); }
    std::uint64_t model_fingerprint() const { return fingerprint_; }

    bool operator==(const StationaryPolicy& other) const { return choices_ == other.choices_; }

private:
    StationaryPolicy(std::vector<ActionId> choices, std::uint64_t fingerprint)
        : choices_(std::move(choices)), fingerprint_(fingerprint) {}

    std::vector<ActionId> choices_;
    std::uint64_t fingerprint_;
};

/// The policy taking the smallest ActionId in A(i) everywhere.
template <class Scalar>
StationaryPolicy first_policy(const Model<Scalar>& model);

/// prod_i |A(i)|. Throws Overflow past the range of uint64.
template <class Scalar>
std::uint64_t policy_space_size(const Model<Scalar>& model);

/// Saturating product of per-state choice counts; returns nullopt on overflow.
std::optional<std::uint64_t> checked_product(std::span<const std::size_t> counts);

}  // namespace relia
