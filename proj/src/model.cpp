#include "relia/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace relia {

namespace {

class Fnv1a {
public:
    void add(std::string_view text) {
        for (unsigned char c : text) {
            hash_ ^= c;
            hash_ *= 1099511628211ULL;
        }
        // separator so that ("ab","c") and ("a","bc") differ
        hash_ ^= 0xff;
        hash_ *= 1099511628211ULL;
    }
    void add(std::size_t value) { add(std::to_string(value)); }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 1469598103934665603ULL;
};

template <class Scalar>
Scalar parse_probability(const std::string& literal);

template <>
double parse_probability<double>(const std::string& literal) {
    return parse_double(literal);
}

template <>
Rational parse_probability<Rational>(const std::string& literal) {
    return parse_rational(literal);
}

template <class Scalar>
bool row_sum_ok(const Scalar& sum, double tol) {
    if constexpr (is_exact_v<Scalar>) {
        (void)tol;
        return sum == 1;
    } else {
        return std::abs(sum - 1.0) <= tol;
    }
}

[[noreturn]] void unknown(std::string_view what, std::string_view name) {
    throw Error(ErrorCode::UnknownStateOrAction,
                "unknown " + std::string(what) + " '" + std::string(name) + "'",
                {{"kind", std::string(what)}, {"name", std::string(name)}});
}

}  // namespace

std::optional<std::uint64_t> checked_product(std::span<const std::size_t> counts) {
    std::uint64_t product = 1;
    for (auto c : counts) {
        if (c != 0 && product > std::numeric_limits<std::uint64_t>::max() / c) return std::nullopt;
        product *= c;
    }
    return product;
}

template <class Scalar>
std::size_t Model<Scalar>::num_pairs() const {
    std::size_t n = 0;
    for (const auto& a : actions_) n += a.size();
    return n;
}

template <class Scalar>
std::optional<StateId> Model<Scalar>::find_state(std::string_view name) const {
    for (std::size_t i = 0; i < state_names_.size(); ++i)
        if (state_names_[i] == name) return StateId{i};
    return std::nullopt;
}

template <class Scalar>
std::optional<ActionId> Model<Scalar>::find_action(std::string_view name) const {
    for (std::size_t a = 0; a < action_names_.size(); ++a)
        if (action_names_[a] == name) return ActionId{a};
    return std::nullopt;
}

template <class Scalar>
std::size_t Model<Scalar>::slot(StateId s, ActionId a) const {
    const auto& list = actions_.at(s.index);
    const auto it = std::lower_bound(list.begin(), list.end(), a);
    if (it == list.end() || *it != a) {
        throw Error(ErrorCode::InvalidPolicy,
                    "action '" + (a.index < action_names_.size() ? action_names_[a.index]
                                                                  : std::to_string(a.index)) +
                        "' is not admissible in state '" + state_names_.at(s.index) + "'",
                    {{"state", state_names_.at(s.index)}, {"action", a.index}});
    }
    return static_cast<std::size_t>(it - list.begin());
}

template <class Scalar>
bool Model<Scalar>::admits(StateId s, ActionId a) const {
    const auto& list = actions_.at(s.index);
    return std::binary_search(list.begin(), list.end(), a);
}

template <class Scalar>
std::span<const Scalar> Model<Scalar>::row(StateId s, ActionId a) const {
    return rows_[s.index][slot(s, a)];
}

template <class Scalar>
Scalar Model<Scalar>::mass(StateId s, ActionId a, const StateSet& set) const {
    const auto r = row(s, a);
    Scalar total = Num<Scalar>::zero();
    for (std::size_t j = 0; j < r.size(); ++j)
        if (set.contains(StateId{j})) total += r[j];
    return total;
}

template <class Scalar>
bool Model<Scalar>::reaches(StateId s, ActionId a, const StateSet& set) const {
    const auto r = row(s, a);
    for (std::size_t j = 0; j < r.size(); ++j)
        if (set.contains(StateId{j}) && r[j] > 0) return true;
    return false;
}

template <class Scalar>
Model<Scalar> validate_model(const RawModel& raw, const ValidationOptions& options) {
    Model<Scalar> m;
    m.row_sum_tol_ = options.row_sum_tol;
    m.description_ = raw.description;

    std::map<std::string, std::size_t, std::less<>> state_index;
    for (const auto& name : raw.states) {
        if (!state_index.emplace(name, m.state_names_.size()).second)
            throw Error(ErrorCode::DuplicateName, "duplicate state '" + name + "'", {{"name", name}});
        m.state_names_.push_back(name);
    }
    const std::size_t n = m.state_names_.size();
    if (n == 0) throw Error(ErrorCode::MalformedModel, "model has no states");

    auto lookup_state = [&](std::string_view name) {
        const auto it = state_index.find(name);
        if (it == state_index.end()) unknown("state", name);
        return StateId{it->second};
    };

    m.failed_ = StateSet(n);
    for (const auto& name : raw.failed) m.failed_.insert(lookup_state(name));
    if (m.failed_.empty()) throw Error(ErrorCode::EmptyFailureSet, "failed set B is empty");
    if (m.failed_.size() == n)
        throw Error(ErrorCode::FailureSetIsAllStates, "failed set B contains every state");
    m.survivors_ = m.failed_.complement();

    // Action ids are assigned in state order, then in listed order.
    std::vector<const std::vector<std::string>*> listed(n, nullptr);
    for (const auto& [state, names] : raw.actions) {
        const auto s = lookup_state(state);
        if (listed[s.index] != nullptr)
            throw Error(ErrorCode::DuplicateName, "actions listed twice for state '" + state + "'",
                        {{"state", state}});
        listed[s.index] = &names;
    }
    std::map<std::string, std::size_t, std::less<>> action_index;
    m.actions_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (listed[i] == nullptr || listed[i]->empty())
            throw Error(ErrorCode::EmptyActionSet,
                        "state '" + m.state_names_[i] + "' has no admissible action",
                        {{"state", m.state_names_[i]}});
        for (const auto& name : *listed[i]) {
            const auto [it, inserted] = action_index.emplace(name, m.action_names_.size());
            if (inserted) m.action_names_.push_back(name);
            const ActionId a{it->second};
            if (std::find(m.actions_[i].begin(), m.actions_[i].end(), a) != m.actions_[i].end())
                throw Error(ErrorCode::DuplicateName,
                            "action '" + name + "' listed twice for state '" + m.state_names_[i] + "'",
                            {{"state", m.state_names_[i]}, {"action", name}});
            m.actions_[i].push_back(a);
        }
        std::sort(m.actions_[i].begin(), m.actions_[i].end());
    }

    m.rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        m.rows_[i].assign(m.actions_[i].size(), std::vector<Scalar>(n, Num<Scalar>::zero()));

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& t : raw.transitions) {
        const auto s = lookup_state(t.state);
        const auto a_it = action_index.find(t.action);
        if (a_it == action_index.end()) unknown("action", t.action);
        const ActionId a{a_it->second};
        if (!m.admits(s, a)) unknown("state|action pair", t.state + "|" + t.action);
        if (!seen.emplace(s.index, a.index).second)
            throw Error(ErrorCode::DuplicateName, "transition row '" + t.state + "|" + t.action + "' given twice",
                        {{"state", t.state}, {"action", t.action}});
        auto& row = m.rows_[s.index][m.slot(s, a)];
        std::vector<bool> filled(n, false);
        for (const auto& [target, literal] : t.entries) {
            const auto j = lookup_state(target);
            if (filled[j.index])
                throw Error(ErrorCode::DuplicateName,
                            "target '" + target + "' repeated in row '" + t.state + "|" + t.action + "'");
            filled[j.index] = true;
            Scalar p = parse_probability<Scalar>(literal);
            if (p < 0)
                throw Error(ErrorCode::NegativeProbability,
                            "negative probability in row '" + t.state + "|" + t.action + "' to '" + target + "'",
                            {{"state", t.state}, {"action", t.action}, {"target", target}, {"value", literal}});
            row[j.index] = std::move(p);
        }
    }

    // Omitted rows are all-zero and fail the row-sum check below.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m.actions_[i].size(); ++k) {
            Scalar sum = Num<Scalar>::zero();
            for (const auto& p : m.rows_[i][k]) sum += p;
            if (!row_sum_ok(sum, options.row_sum_tol)) {
                const auto& action = m.action_names_[m.actions_[i][k].index];
                throw Error(ErrorCode::BadRowSum,
                            "row '" + m.state_names_[i] + "|" + action + "' sums to " + Num<Scalar>::format(sum),
                            {{"state", m.state_names_[i]}, {"action", action}, {"sum", Num<Scalar>::format(sum)}});
            }
        }
    }

    Fnv1a hash;
    hash.add(to_string(m.arithmetic()));
    for (const auto& s : m.state_names_) hash.add(s);
    for (const auto& s : m.failed_.members()) hash.add(s.index);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m.actions_[i].size(); ++k) {
            hash.add(m.action_names_[m.actions_[i][k].index]);
            for (const auto& p : m.rows_[i][k]) hash.add(Num<Scalar>::format(p));
        }
    }
    m.fingerprint_ = hash.value();
    return m;
}

AnyModel validate_any(const RawModel& raw, std::optional<Arithmetic> force,
                      const ValidationOptions& options) {
    const auto mode = force.value_or(raw.arithmetic);
    if (mode == Arithmetic::Exact) return validate_model<Rational>(raw, options);
    return validate_model<double>(raw, options);
}

template <class Scalar>
Model<double> to_float_model(const Model<Scalar>& model) {
    Model<double> out;
    out.state_names_ = model.state_names_;
    out.action_names_ = model.action_names_;
    out.failed_ = model.failed_;
    out.survivors_ = model.survivors_;
    out.actions_ = model.actions_;
    out.row_sum_tol_ = model.row_sum_tol_;
    out.description_ = model.description_;
    out.rows_.resize(model.rows_.size());
    for (std::size_t i = 0; i < model.rows_.size(); ++i) {
        for (const auto& row : model.rows_[i]) {
            std::vector<double> converted;
            converted.reserve(row.size());
            for (const auto& p : row) converted.push_back(Num<Scalar>::to_double(p));
            out.rows_[i].push_back(std::move(converted));
        }
    }
    Fnv1a hash;
    hash.add(std::to_string(model.fingerprint_));
    hash.add("float");
    out.fingerprint_ = hash.value();
    return out;
}

template <class Scalar>
StationaryPolicy StationaryPolicy::create(const Model<Scalar>& model, std::vector<ActionId> choices) {
    if (choices.size() != model.num_states())
        throw Error(ErrorCode::InvalidPolicy,
                    "policy covers " + std::to_string(choices.size()) + " states, model has " +
                        std::to_string(model.num_states()));
    for (std::size_t i = 0; i < choices.size(); ++i) {
        if (!model.admits(StateId{i}, choices[i]))
            throw Error(ErrorCode::InvalidPolicy,
                        "policy picks an inadmissible action in state '" + model.state_name(StateId{i}) + "'",
                        {{"state", model.state_name(StateId{i})}});
    }
    return StationaryPolicy(std::move(choices), model.fingerprint());
}

template <class Scalar>
StationaryPolicy first_policy(const Model<Scalar>& model) {
    std::vector<ActionId> choices;
    for (std::size_t i = 0; i < model.num_states(); ++i) choices.push_back(model.actions(StateId{i}).front());
    return StationaryPolicy::create(model, std::move(choices));
}

template <class Scalar>
std::uint64_t policy_space_size(const Model<Scalar>& model) {
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < model.num_states(); ++i) counts.push_back(model.actions(StateId{i}).size());
    const auto product = checked_product(counts);
    if (!product) throw Error(ErrorCode::Overflow, "number of stationary policies exceeds 2^64");
    return *product;
}

template class Model<double>;
template class Model<Rational>;
template Model<double> validate_model<double>(const RawModel&, const ValidationOptions&);
template Model<Rational> validate_model<Rational>(const RawModel&, const ValidationOptions&);
template Model<double> to_float_model(const Model<double>&);
template Model<double> to_float_model(const Model<Rational>&);
template StationaryPolicy StationaryPolicy::create(const Model<double>&, std::vector<ActionId>);
template StationaryPolicy StationaryPolicy::create(const Model<Rational>&, std::vector<ActionId>);
template StationaryPolicy first_policy(const Model<double>&);
template StationaryPolicy first_policy(const Model<Rational>&);
template std::uint64_t policy_space_size(const Model<double>&);
template std::uint64_t policy_space_size(const Model<Rational>&);

}  // namespace relia
