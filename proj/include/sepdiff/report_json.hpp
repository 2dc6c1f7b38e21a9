#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sepdiff/diffusion_model.hpp"
#include "sepdiff/nflvr.hpp"
#include "sepdiff/separating.hpp"
#include "sepdiff/simulator.hpp"

namespace sepdiff {

using Json = nlohmann::ordered_json;

// Finite numbers as numbers, infinities as "inf" / "-inf", NaN as null.
Json json_number(double x);
// Cemetery point as "none".
Json json_point(const std::optional<double>& x);

Json to_json(const IntegralVerdict& v);
Json to_json(const BoundaryReport& r);
Json to_json(const Violation& v);
Json to_json(const PointClass& p);
Json to_json(const SeparatingSet& a);
Json to_json(const TimeDescriptor& t);
Json to_json(const SeparationReport& r);
Json to_json(const NflvrReport& r);
Json to_json(const GridChain& c);  // summary only, no per-node arrays
Json to_json(const MonteCarloEstimate& e);
Json to_json(const ValidationReport& r);

// Both boundaries plus the critical points of a single diffusion.
Json classification_json(const DiffusionSpec& spec);

}  // namespace sepdiff
