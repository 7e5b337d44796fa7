#pragma once

#include <json.hpp>

#include "qwalk/classical.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/mixing.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

nlohmann::json to_json(const BoundCheck& check);
nlohmann::json to_json(const MeasuredTime& t);
nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const MixingReport& report);
nlohmann::json to_json(const Cut& cut);
nlohmann::json to_json(const ConductanceResult& result);
nlohmann::json to_json(const PhiComparisonReport& report);
nlohmann::json to_json(const SpectralGapResult& result);
nlohmann::json to_json(const SpacingReport& report);
nlohmann::json to_json(const AmplificationResult& result);
nlohmann::json to_json(const AmplifiedSamplingReport& report);
nlohmann::json to_json(const FillingLowerBoundReport& report);
nlohmann::json to_json(const CoinedLowerBoundReport& report);
nlohmann::json to_json(const NonunitaryLowerBoundReport& report);
nlohmann::json to_json(const StateDistanceReport& report);
nlohmann::json to_json(const ProjectionCheckReport& report);
nlohmann::json to_json(const CompleteMixtureReport& report);
nlohmann::json to_json(const Distribution& dist);

}  // namespace qwalk
