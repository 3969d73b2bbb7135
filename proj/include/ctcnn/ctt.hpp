#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctcnn/tensor.hpp"

namespace ctcnn {

// CTT1 raw tensor file: "CTT1", u32 rank, rank x u32 extents, f32 payload,
// all little-endian.
std::vector<std::uint8_t> encode_ctt(const Tensor& t);
Tensor decode_ctt(const std::vector<std::uint8_t>& bytes);

void write_ctt(const std::filesystem::path& path, const Tensor& t);
Tensor read_ctt(const std::filesystem::path& path);

}  // namespace ctcnn
