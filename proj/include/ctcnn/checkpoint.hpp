#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctcnn/model.hpp"

namespace ctcnn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// CNCK container: "CNCK", u32 version, u32 header length, UTF-8 JSON header
// (arch, input shape, class names, layers with hyperparameters and parameter
// shapes), then every parameter tensor as little-endian f32 in layer order.
std::vector<std::uint8_t> encode_checkpoint(const Sequential<float>& model);

// Rebuilds the model from the header and checks the payload against it.
// Throws FormatError (with byte offset) on any mismatch; never returns a
// partially loaded model.
Sequential<float> decode_checkpoint(const std::vector<std::uint8_t>& bytes);

// Atomic: written to a temp file, then renamed into place.
void save_checkpoint(const Sequential<float>& model, const std::filesystem::path& path);
Sequential<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace ctcnn
