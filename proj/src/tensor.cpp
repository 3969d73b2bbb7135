#include "ctcnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ctcnn/error.hpp"

namespace ctcnn {

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > 4) {
    throw DimensionError("tensor rank must be 1..4, got shape " + shape_to_string(shape));
  }
  for (std::size_t e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive, got " + shape_to_string(shape));
  }
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_size(shape_), T{0});
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (shape_size(shape_) != data_.size()) {
    throw DimensionError("shape " + shape_to_string(shape_) + " needs " +
                         std::to_string(shape_size(shape_)) + " elements, got " +
                         std::to_string(data_.size()));
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::filled(Shape shape, T value) {
  BasicTensor t(std::move(shape));
  t.fill(value);
  return t;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) const {
  return BasicTensor(std::move(shape), data_);
}

template <typename T>
void BasicTensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0)) {
    throw DimensionError("matmul: cannot multiply " + shape_to_string(a.shape()) + " by " +
                         shape_to_string(b.shape()));
  }
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  BasicTensor<T> c({m, n});
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  T* pc = c.data().data();
  // i-t-j order: each c[i,j] still accumulates over ascending t.
  for (std::size_t i = 0; i < m; ++i) {
    T* row = pc + i * n;
    for (std::size_t t = 0; t < k; ++t) {
      const T av = pa[i * k + t];
      const T* brow = pb + t * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  return c;
}

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a) {
  if (a.rank() != 2) throw DimensionError("transpose expects rank 2, got " + shape_to_string(a.shape()));
  const std::size_t m = a.extent(0), n = a.extent(1);
  BasicTensor<T> out({n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a[i * n + j];
  return out;
}

template <typename T>
BasicTensor<T> im2col(const BasicTensor<T>& input) {
  if (input.rank() != 3 || input.extent(0) < 3 || input.extent(1) < 3) {
    throw DimensionError("im2col: input " + shape_to_string(input.shape()) +
                         " is smaller than the 3x3 kernel or not H x W x C");
  }
  const std::size_t h = input.extent(0), w = input.extent(1), c = input.extent(2);
  const std::size_t oh = h - 2, ow = w - 2, cols = 9 * c;
  BasicTensor<T> out({oh * ow, cols});
  T* dst = out.data().data();
  const T* src = input.data().data();
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      for (std::size_t u = 0; u < 3; ++u) {
        // (kw, c) is contiguous in the source row, so copy 3*c values at once.
        const T* from = src + ((i + u) * w + j) * c;
        std::copy(from, from + 3 * c, dst);
        dst += 3 * c;
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> col2im(const BasicTensor<T>& cols, std::size_t height, std::size_t width,
                      std::size_t channels) {
  if (height < 3 || width < 3 || cols.rank() != 2 ||
      cols.extent(0) != (height - 2) * (width - 2) || cols.extent(1) != 9 * channels) {
    throw DimensionError("col2im: patch matrix " + shape_to_string(cols.shape()) +
                         " does not match image " +
                         shape_to_string({height, width, channels}));
  }
  BasicTensor<T> out({height, width, channels});
  T* dst = out.data().data();
  const T* src = cols.data().data();
  const std::size_t oh = height - 2, ow = width - 2;
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      for (std::size_t u = 0; u < 3; ++u) {
        T* to = dst + ((i + u) * width + j) * channels;
        for (std::size_t q = 0; q < 3 * channels; ++q) to[q] += src[q];
        src += 3 * channels;
      }
    }
  }
  return out;
}

template <typename T>
std::size_t argmax(const BasicTensor<T>& v) {
  if (v.empty()) throw DimensionError("argmax of an empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

template <typename T>
bool all_finite(const BasicTensor<T>& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](T x) { return std::isfinite(x); });
}

#define CTCNN_INSTANTIATE(T)                                                              \
  template class BasicTensor<T>;                                                          \
  template BasicTensor<T> matmul(const BasicTensor<T>&, const BasicTensor<T>&);           \
  template BasicTensor<T> transpose(const BasicTensor<T>&);                               \
  template BasicTensor<T> im2col(const BasicTensor<T>&);                                  \
  template BasicTensor<T> col2im(const BasicTensor<T>&, std::size_t, std::size_t,         \
                                 std::size_t);                                            \
  template std::size_t argmax(const BasicTensor<T>&);                                     \
  template bool all_finite(const BasicTensor<T>&);

CTCNN_INSTANTIATE(float)
CTCNN_INSTANTIATE(double)

#undef CTCNN_INSTANTIATE

}  // namespace ctcnn
