#include "ctcnn/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "ctcnn/ctt.hpp"
#include "ctcnn/error.hpp"

namespace ctcnn {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw FilesystemError("cannot open " + path.string());
  return f;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

}  // namespace

Image8 decode_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw DecodeError("cannot decode PNG " + path.string() + ": " + img.message);
  }
  const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
  img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  Image8 out;
  out.height = img.height;
  out.width = img.width;
  out.channels = gray ? 1 : 3;
  out.pixels.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw DecodeError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Image8& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.pixels.data(), 0, nullptr)) {
    throw FilesystemError("cannot write PNG " + path.string() + ": " + img.message);
  }
}

Image8 decode_jpeg(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  jpeg_decompress_struct info{};
  JpegErrorManager err{};
  info.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  Image8 out;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&info);
    throw DecodeError("cannot decode JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&info);
  jpeg_stdio_src(&info, file.get());
  jpeg_read_header(&info, TRUE);
  info.out_color_space = info.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&info);
  out.height = info.output_height;
  out.width = info.output_width;
  out.channels = static_cast<std::size_t>(info.output_components);
  out.pixels.resize(out.height * out.width * out.channels);
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = out.pixels.data() + info.output_scanline * out.width * out.channels;
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return out;
}

void write_jpeg(const std::filesystem::path& path, const Image8& image, int quality) {
  FilePtr file = open_file(path, "wb");
  jpeg_compress_struct info{};
  JpegErrorManager err{};
  info.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&info);
    throw FilesystemError("cannot write JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_compress(&info);
  jpeg_stdio_dest(&info, file.get());
  info.image_width = static_cast<JDIMENSION>(image.width);
  info.image_height = static_cast<JDIMENSION>(image.height);
  info.input_components = static_cast<int>(image.channels);
  info.in_color_space = image.channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&info);
  jpeg_set_quality(&info, quality, TRUE);
  jpeg_start_compress(&info, TRUE);
  while (info.next_scanline < info.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(image.pixels.data() +
                                        info.next_scanline * image.width * image.channels);
    jpeg_write_scanlines(&info, &row, 1);
  }
  jpeg_finish_compress(&info);
  jpeg_destroy_compress(&info);
}

Tensor resize_bilinear(const Tensor& image, std::size_t out_h, std::size_t out_w) {
  if (image.rank() != 3) {
    throw DimensionError("resize_bilinear expects H x W x C, got " + shape_to_string(image.shape()));
  }
  const std::size_t in_h = image.extent(0), in_w = image.extent(1), c = image.extent(2);
  if (in_h == out_h && in_w == out_w) return image;

  struct Tap {
    std::size_t lo, hi;
    float frac;
  };
  auto taps = [](std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t d = 0; d < out; ++d) {
      double src = (static_cast<double>(d) + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const std::size_t lo = static_cast<std::size_t>(std::floor(src));
      const std::size_t hi = std::min(lo + 1, in - 1);
      t[d] = {lo, hi, static_cast<float>(src - static_cast<double>(lo))};
    }
    return t;
  };
  const auto ty = taps(in_h, out_h);
  const auto tx = taps(in_w, out_w);

  Tensor out({out_h, out_w, c});
  for (std::size_t i = 0; i < out_h; ++i) {
    for (std::size_t j = 0; j < out_w; ++j) {
      for (std::size_t k = 0; k < c; ++k) {
        const float a = image.at(ty[i].lo, tx[j].lo, k);
        const float b = image.at(ty[i].lo, tx[j].hi, k);
        const float p = image.at(ty[i].hi, tx[j].lo, k);
        const float q = image.at(ty[i].hi, tx[j].hi, k);
        const float top = a + (b - a) * tx[j].frac;
        const float bottom = p + (q - p) * tx[j].frac;
        out.at(i, j, k) = top + (bottom - top) * ty[i].frac;
      }
    }
  }
  return out;
}

Tensor load_image(const std::filesystem::path& path, std::size_t size) {
  const std::string ext = lower_extension(path);
  Tensor raw;
  if (ext == ".ctt") {
    raw = read_ctt(path);
    if (raw.rank() != 3 || (raw.extent(2) != 1 && raw.extent(2) != 3)) {
      throw FormatError(path.string() + ": CTT1 image must have shape [H,W,1] or [H,W,3], got " +
                            shape_to_string(raw.shape()),
                        4);
    }
    for (float& v : raw.data()) {
      if (!std::isfinite(v)) throw DecodeError(path.string() + ": non-finite pixel value");
      v = std::clamp(v, 0.0f, 1.0f);
    }
  } else if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
    const Image8 img = ext == ".png" ? decode_png(path) : decode_jpeg(path);
    raw = Tensor({img.height, img.width, img.channels});
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      raw[i] = static_cast<float>(img.pixels[i]) / 255.0f;
  } else {
    throw DecodeError("unsupported image type: " + path.string());
  }

  if (raw.extent(2) == 1) {
    Tensor rgb({raw.extent(0), raw.extent(1), 3});
    for (std::size_t p = 0; p < raw.size(); ++p)
      for (std::size_t k = 0; k < 3; ++k) rgb[3 * p + k] = raw[p];
    raw = std::move(rgb);
  }
  Tensor out = resize_bilinear(raw, size, size);
  for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

}  // namespace ctcnn
