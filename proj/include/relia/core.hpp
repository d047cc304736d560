#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace relia {

/// Exact arbitrary-precision rational used by the exact arithmetic mode.
using Rational = mpq_class;

/// Dense index into the state list of a model.
struct StateId {
    std::size_t index = 0;
    auto operator<=>(const StateId&) const = default;
};

/// Dense index into the global action list of a model.
struct ActionId {
    std::size_t index = 0;
    auto operator<=>(const ActionId&) const = default;
};

enum class Arithmetic { Float, Exact };

std::string_view to_string(Arithmetic mode);

enum class ErrorCode {
    MalformedModel,
    DuplicateName,
    UnknownStateOrAction,
    EmptyFailureSet,
    FailureSetIsAllStates,
    EmptyActionSet,
    BadRowSum,
    NegativeProbability,
    InvalidPolicy,
    Overflow,
    ModelMismatch,
    TooManyPolicies,
    PolicyOutsideClass,
    EmptyGStar,
    SingularSystem,
    ResidualTooLarge,
    OutOfRangeSolution,
    CoverageMismatch,
    NotConverged,
    IterationBudgetExceeded,
    NoUniformMinimizer,
};

std::string_view to_string(ErrorCode code);

/// Domain error carrying a stable code and structured details for reports.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::ordered_json details = {})
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::ordered_json& details() const noexcept { return details_; }

    nlohmann::ordered_json to_json() const;

private:
    ErrorCode code_;
    nlohmann::ordered_json details_;
};

/// A set of states over a fixed universe |S|, stored as a bitmap.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t universe) : bits_(universe, false) {}

    std::size_t universe() const noexcept { return bits_.size(); }
    bool contains(StateId s) const { return bits_[s.index]; }
    void insert(StateId s) { bits_[s.index] = true; }
    void erase(StateId s) { bits_[s.index] = false; }

    std::size_t size() const;
    bool empty() const { return size() == 0; }

    StateSet& operator|=(const StateSet& other);
    StateSet& operator-=(const StateSet& other);
    StateSet operator|(const StateSet& other) const { return StateSet(*this) |= other; }
    StateSet operator-(const StateSet& other) const { return StateSet(*this) -= other; }
    StateSet complement() const;

    bool is_subset_of(const StateSet& other) const;
    bool intersects(const StateSet& other) const;

    /// Members in increasing index order.
    std::vector<StateId> members() const;

    bool operator==(const StateSet&) const = default;

private:
    std::vector<bool> bits_;
};

/// Arithmetic helpers shared by the float and exact code paths.
template <class Scalar>
struct Num;

template <>
struct Num<double> {
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double to_double(double x) { return x; }
    /// Shortest text that reads back to the same double (17 significant digits).
    static std::string format(double x);
};

template <>
struct Num<Rational> {
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static double to_double(const Rational& x) { return x.get_d(); }
    /// "num/den", or "num" for integers.
    static std::string format(const Rational& x);
};

template <class Scalar>
inline constexpr bool is_exact_v = std::is_same_v<Scalar, Rational>;

/// Parses a decimal ("0.25", "1e-3") or rational ("3/16") literal exactly.
Rational parse_rational(std::string_view text);

/// Parses the same literal syntax into the nearest double.
double parse_double(std::string_view text);

}  // namespace relia
