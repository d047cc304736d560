#include "relia/model_io.hpp"

#include <fstream>
#include <sstream>

namespace relia {

namespace {

using ojson = nlohmann::ordered_json;

// DOM builder that stores every number as its source text.
class LexemeSax : public nlohmann::detail::json_sax_dom_parser<ojson> {
public:
    using Base = nlohmann::detail::json_sax_dom_parser<ojson>;
    using Base::Base;

    bool number_integer(ojson::number_integer_t value) {
        std::string text = std::to_string(value);
        return Base::string(text);
    }
    bool number_unsigned(ojson::number_unsigned_t value) {
        std::string text = std::to_string(value);
        return Base::string(text);
    }
    bool number_float(ojson::number_float_t, const std::string& lexeme) {
        std::string text = lexeme;
        return Base::string(text);
    }
};

[[noreturn]] void malformed(const std::string& message) {
    throw Error(ErrorCode::MalformedModel, message);
}

ojson parse_document(std::string_view text) {
    ojson doc;
    LexemeSax sax(doc, true);
    try {
        ojson::sax_parse(text.begin(), text.end(), &sax);
    } catch (const ojson::exception& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    return doc;
}

std::string expect_string(const ojson& value, const std::string& where) {
    if (!value.is_string()) malformed(where + " must be a string");
    return value.get<std::string>();
}

std::vector<std::string> expect_string_array(const ojson& value, const std::string& where) {
    if (!value.is_array()) malformed(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& item : value) out.push_back(expect_string(item, where + " entry"));
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

RawModel parse_raw_model(std::string_view text) {
    const ojson doc = parse_document(text);
    if (!doc.is_object()) malformed("model document must be a JSON object");

    for (const auto& [key, _] : doc.items()) {
        if (key != "states" && key != "failed" && key != "actions" && key != "transitions" &&
            key != "arithmetic" && key != "description")
            malformed("unexpected top-level key '" + key + "'");
    }
    for (const char* key : {"states", "failed", "actions", "transitions"})
        if (!doc.contains(key)) malformed(std::string("missing top-level key '") + key + "'");

    RawModel raw;
    raw.states = expect_string_array(doc["states"], "'states'");
    raw.failed = expect_string_array(doc["failed"], "'failed'");

    const auto& actions = doc["actions"];
    if (!actions.is_object()) malformed("'actions' must be an object");
    for (const auto& [state, list] : actions.items())
        raw.actions.emplace_back(state, expect_string_array(list, "actions of '" + state + "'"));

    const auto& transitions = doc["transitions"];
    if (!transitions.is_object()) malformed("'transitions' must be an object");
    for (const auto& [key, row] : transitions.items()) {
        const auto bar = key.find('|');
        if (bar == std::string::npos || key.find('|', bar + 1) != std::string::npos)
            malformed("transition key '" + key + "' must have the form \"state|action\"");
        if (!row.is_object()) malformed("transition row '" + key + "' must be an object");
        RawTransition t{key.substr(0, bar), key.substr(bar + 1), {}};
        for (const auto& [target, value] : row.items())
            t.entries.emplace_back(target, expect_string(value, "probability in row '" + key + "'"));
        raw.transitions.push_back(std::move(t));
    }

    if (doc.contains("arithmetic")) {
        const auto mode = expect_string(doc["arithmetic"], "'arithmetic'");
        if (mode == "float") raw.arithmetic = Arithmetic::Float;
        else if (mode == "exact") raw.arithmetic = Arithmetic::Exact;
        else malformed("'arithmetic' must be \"float\" or \"exact\"");
    }
    if (doc.contains("description")) raw.description = expect_string(doc["description"], "'description'");
    return raw;
}

RawModel load_raw_model(const std::filesystem::path& path) {
    return parse_raw_model(read_file(path));
}

template <class Scalar>
ojson model_to_json(const Model<Scalar>& model) {
    ojson out;
    if (!model.description().empty()) out["description"] = model.description();
    out["arithmetic"] = std::string(to_string(model.arithmetic()));
    out["states"] = model.state_names();
    ojson failed = ojson::array();
    for (const auto& s : model.failed().members()) failed.push_back(model.state_name(s));
    out["failed"] = failed;

    ojson actions = ojson::object();
    ojson transitions = ojson::object();
    for (std::size_t i = 0; i < model.num_states(); ++i) {
        const StateId s{i};
        ojson names = ojson::array();
        for (const auto a : model.actions(s)) {
            names.push_back(model.action_name(a));
            ojson row = ojson::object();
            const auto probs = model.row(s, a);
            for (std::size_t j = 0; j < probs.size(); ++j) {
                if (probs[j] == 0) continue;
                if constexpr (is_exact_v<Scalar>) row[model.state_name(StateId{j})] = Num<Scalar>::format(probs[j]);
                else row[model.state_name(StateId{j})] = probs[j];
            }
            transitions[model.state_name(s) + "|" + model.action_name(a)] = row;
        }
        actions[model.state_name(s)] = names;
    }
    out["actions"] = actions;
    out["transitions"] = transitions;
    return out;
}

template <class Scalar>
StationaryPolicy parse_policy(const Model<Scalar>& model, std::string_view text) {
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::InvalidPolicy, std::string("invalid policy JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::InvalidPolicy, "policy document must be a JSON object");

    std::vector<std::optional<ActionId>> picked(model.num_states());
    for (const auto& [state, value] : doc.items()) {
        const auto s = model.find_state(state);
        if (!s) throw Error(ErrorCode::UnknownStateOrAction, "policy names unknown state '" + state + "'",
                            {{"kind", "state"}, {"name", state}});
        if (!value.is_string())
            throw Error(ErrorCode::InvalidPolicy, "policy entry for '" + state + "' must be an action name");
        const auto name = value.template get<std::string>();
        const auto a = model.find_action(name);
        if (!a) throw Error(ErrorCode::UnknownStateOrAction, "policy names unknown action '" + name + "'",
                            {{"kind", "action"}, {"name", name}});
        picked[s->index] = *a;
    }
    std::vector<ActionId> choices;
    for (std::size_t i = 0; i < model.num_states(); ++i) {
        const StateId s{i};
        if (picked[i]) {
            choices.push_back(*picked[i]);
        } else if (model.actions(s).size() == 1) {
            choices.push_back(model.actions(s).front());
        } else {
            throw Error(ErrorCode::InvalidPolicy,
                        "policy does not choose an action for state '" + model.state_name(s) + "'",
                        {{"state", model.state_name(s)}});
        }
    }
    return StationaryPolicy::create(model, std::move(choices));
}

template <class Scalar>
StationaryPolicy load_policy(const Model<Scalar>& model, const std::filesystem::path& path) {
    return parse_policy(model, read_file(path));
}

template <class Scalar>
ojson policy_to_json(const Model<Scalar>& model, const StationaryPolicy& policy) {
    ojson out = ojson::object();
    for (std::size_t i = 0; i < model.num_states(); ++i)
        out[model.state_name(StateId{i})] = model.action_name(policy[StateId{i}]);
    return out;
}

template ojson model_to_json(const Model<double>&);
template ojson model_to_json(const Model<Rational>&);
template StationaryPolicy parse_policy(const Model<double>&, std::string_view);
template StationaryPolicy parse_policy(const Model<Rational>&, std::string_view);
template StationaryPolicy load_policy(const Model<double>&, const std::filesystem::path&);
template StationaryPolicy load_policy(const Model<Rational>&, const std::filesystem::path&);
template ojson policy_to_json(const Model<double>&, const StationaryPolicy&);
template ojson policy_to_json(const Model<Rational>&, const StationaryPolicy&);

}  // namespace relia
