#pragma once

#include <json.hpp>
#include <string>

#include "mfda/nn/predictor.hpp"

namespace mfda {

/// Writes the surrogate to a JSON document: network structure, flat row-major
/// weight arrays per layer, normalization constants, and the caller's
/// metadata (seed, epochs, final losses, ...). Doubles are serialized with
/// shortest round-trip precision, so a reload reproduces predictions
/// bit-for-bit.
void save_fusion_surrogate(const std::string& path, const FusionSurrogate& surrogate,
                           const nlohmann::json& metadata = nlohmann::json::object());

FusionSurrogate load_fusion_surrogate(const std::string& path);

/// Metadata block of a saved surrogate, without materializing the weights.
nlohmann::json read_surrogate_metadata(const std::string& path);

}  // namespace mfda
