#pragma once

// JSON codecs for run artifacts, shared by the run store and the service.

#include <json.hpp>

#include "placeplan/records.hpp"

namespace placeplan::detail {

using nlohmann::json;

json to_json(const CandidateList& c);
json to_json(const ReceptacleDecision& d);
/// `with_support` adds the blended support points and weights.
json to_json(const PlanResult& r, bool with_support);
json to_json(const PlacementOutcome& o);
json to_json(const RunRecord& r);

CandidateList candidates_from(const json& j);
ReceptacleDecision decision_from(const json& j);
PlanResult plan_result_from(const json& j);
PlacementOutcome outcome_from(const json& j);
RunRecord run_record_from(const json& j);

}  // namespace placeplan::detail
