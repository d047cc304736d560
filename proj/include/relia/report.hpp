#pragma once

#include "relia/absorbing.hpp"
#include "relia/evaluate.hpp"
#include "relia/oracle.hpp"
#include "relia/solver.hpp"

namespace relia::report {

using Json = nlohmann::ordered_json;

template <class Scalar>
Json model_summary(const Model<Scalar>& model);

template <class Scalar>
Json state_set(const Model<Scalar>& model, const StateSet& set);

template <class Scalar>
Json analysis(const Model<Scalar>& model, const AbsorbingAnalysis& analysis);

/// State name -> probability text (17 significant digits, or an exact rational).
template <class Scalar>
Json failure_vector(const Model<Scalar>& model, const FailureVector<Scalar>& q);

template <class Scalar>
Json reliability_vector(const Model<Scalar>& model, const FailureVector<Scalar>& q);

template <class Scalar>
Json policy(const Model<Scalar>& model, const StationaryPolicy& g);

template <class Scalar>
Json solve(const Model<Scalar>& model, const SolveReport<Scalar>& report);

template <class Scalar>
Json simulation(const Model<Scalar>& model, const SimulationEstimate& estimate, std::uint64_t seed);

}  // namespace relia::report
