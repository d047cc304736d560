#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "relia/model.hpp"

namespace relia {

/// Parses the JSON model document. Numeric literals are kept as text so that
/// exact mode never sees a floating point intermediate.
RawModel parse_raw_model(std::string_view text);

RawModel load_raw_model(const std::filesystem::path& path);

/// Writes a validated model back to the file format. Exact models emit
/// rational strings, float models emit round-trip decimals; zero entries
/// are omitted.
template <class Scalar>
nlohmann::ordered_json model_to_json(const Model<Scalar>& model);

/// Reads a policy document (state name -> action name). States with a single
/// admissible action may be omitted.
template <class Scalar>
StationaryPolicy parse_policy(const Model<Scalar>& model, std::string_view text);

template <class Scalar>
StationaryPolicy load_policy(const Model<Scalar>& model, const std::filesystem::path& path);

template <class Scalar>
nlohmann::ordered_json policy_to_json(const Model<Scalar>& model, const StationaryPolicy& policy);

}  // namespace relia
