#pragma once

// Reference implementations used only by tests. They are written as direct
// loops over the defining formulas and share no code with the library's
// lowered (im2col + matmul) paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <string>

#include "ctcnn/random.hpp"
#include "ctcnn/tensor.hpp"

namespace oracle {

template <typename T>
ctcnn::BasicTensor<T> naive_matmul(const ctcnn::BasicTensor<T>& a, const ctcnn::BasicTensor<T>& b) {
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  ctcnn::BasicTensor<T> c({m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T acc{0};
      for (std::size_t t = 0; t < k; ++t) acc += a[i * k + t] * b[t * n + j];
      c[i * n + j] = acc;
    }
  return c;
}

// y[i,j,o] = b[o] + sum_{u,v,c} w[u,v,c,o] * x[i+u, j+v, c]
template <typename T>
ctcnn::BasicTensor<T> direct_conv3x3(const ctcnn::BasicTensor<T>& x, const ctcnn::BasicTensor<T>& w,
                                     const ctcnn::BasicTensor<T>& bias) {
  const std::size_t h = x.extent(0), wd = x.extent(1), cin = x.extent(2), cout = w.extent(3);
  ctcnn::BasicTensor<T> y({h - 2, wd - 2, cout});
  for (std::size_t i = 0; i + 2 < h; ++i)
    for (std::size_t j = 0; j + 2 < wd; ++j)
      for (std::size_t o = 0; o < cout; ++o) {
        T acc{0};
        for (std::size_t u = 0; u < 3; ++u)
          for (std::size_t v = 0; v < 3; ++v)
            for (std::size_t c = 0; c < cin; ++c)
              acc += w[((u * 3 + v) * cin + c) * cout + o] * x.at(i + u, j + v, c);
        y.at(i, j, o) = bias[o] + acc;
      }
  return y;
}

// Enumerates every valid 3x3 patch, reading each element by coordinates.
template <typename T>
ctcnn::BasicTensor<T> enumerate_patches(const ctcnn::BasicTensor<T>& x) {
  const std::size_t h = x.extent(0), w = x.extent(1), c = x.extent(2);
  ctcnn::BasicTensor<T> out({(h - 2) * (w - 2), 9 * c});
  std::size_t row = 0;
  for (std::size_t i = 0; i + 2 < h; ++i)
    for (std::size_t j = 0; j + 2 < w; ++j, ++row) {
      std::size_t col = 0;
      for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t v = 0; v < 3; ++v)
          for (std::size_t k = 0; k < c; ++k) out[row * 9 * c + col++] = x.at(i + u, j + v, k);
    }
  return out;
}

template <typename T>
ctcnn::BasicTensor<T> random_tensor(ctcnn::Shape shape, ctcnn::Rng& rng, double lo = -1.0,
                                    double hi = 1.0) {
  ctcnn::BasicTensor<T> t(std::move(shape));
  for (T& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template <typename T>
double max_abs_diff(const ctcnn::BasicTensor<T>& a, const ctcnn::BasicTensor<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  return m;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ctcnn_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle

namespace oracle {

// Central difference of a scalar function with respect to one coordinate.
template <typename F>
double central_difference(double& coord, double h, F&& f) {
  const double saved = coord;
  coord = saved + h;
  const double plus = f();
  coord = saved - h;
  const double minus = f();
  coord = saved;
  return (plus - minus) / (2 * h);
}

inline double rel_err(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-12});
}

}  // namespace oracle
