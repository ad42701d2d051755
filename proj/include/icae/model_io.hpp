#pragma once

#include <string>

#include "icae/model.hpp"

namespace icae {

// Versioned structured-text model file. Layout: a three-line header (magic +
// format version, creation timestamp, checksum), then the canonical body with
// all four networks as explicitly dimensioned arrays. The checksum covers the
// body only, so two runs that learn identical parameters produce identical
// checksums regardless of when they were saved.

// "fnv1a64:<16 hex digits>" over the canonical body
std::string model_checksum(const TrainedPair& pair);

// Atomic write (temp file + rename).
void save_model(const TrainedPair& pair, const std::string& path);

// Verifies magic, version, checksum and shape consistency before returning.
TrainedPair load_model(const std::string& path);

} // namespace icae
