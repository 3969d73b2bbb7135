#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctcnn/tensor.hpp"

namespace ctcnn {

// 8-bit interleaved pixels, channels is 1 (gray) or 3 (RGB).
struct Image8 {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;
};

// DecodeError naming the path on failure.
Image8 decode_png(const std::filesystem::path& path);
Image8 decode_jpeg(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Image8& image);
void write_jpeg(const std::filesystem::path& path, const Image8& image, int quality = 95);

// Half-pixel-centre bilinear resampling (align_corners = false) of an
// H x W x C tensor. Resizing to the same extent is the identity.
Tensor resize_bilinear(const Tensor& image, std::size_t out_height, std::size_t out_width);

// PNG / JPEG / CTT1 to a size x size x 3 tensor in [0, 1]. 8-bit images are
// scaled by 1/255; CTT1 payloads are taken as [0, 1] intensities and clamped.
// Gray inputs are replicated to three channels.
Tensor load_image(const std::filesystem::path& path, std::size_t size = 350);

}  // namespace ctcnn
