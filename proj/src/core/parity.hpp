#pragma once

#include <cstdint>

#include <json.hpp>

#include "core/metrics.hpp"

namespace wtkp {

// Reference cases for external implementations of the permutation-invariant
// keypoint score: inputs, chosen permutation, summed squared tip distance and
// OKS. Every tenth case (starting with the first) is an identity case with
// pred = gt. Pure in (seed, count).
nlohmann::ordered_json export_parity_fixtures(std::uint64_t seed, std::size_t count,
                                              const OksConstants& k = kDefaultOksConstants);

}  // namespace wtkp
