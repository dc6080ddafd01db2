#pragma once

#include <json.hpp>

#include "ylab/bands.hpp"
#include "ylab/coupling.hpp"
#include "ylab/hdclt.hpp"

// JSON views of the report types. Field names are part of the external
// interface and must not change.

namespace ylab {

nlohmann::json to_json(const MomentInputs& m);
nlohmann::json to_json(const CouplingBound& b);
nlohmann::json to_json(const CltBoundReport& r);
nlohmann::json to_json(const KsEstimate& k);
nlohmann::json to_json(const BandResult& b);

}  // namespace ylab
