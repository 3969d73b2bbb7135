#include "ctcnn/layers.hpp"

#include "ctcnn/error.hpp"

namespace ctcnn {

std::string_view layer_type_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d: return "Conv2D";
    case LayerKind::relu: return "ReLU";
    case LayerKind::max_pool2d: return "MaxPooling2D";
    case LayerKind::dropout: return "Dropout";
    case LayerKind::flatten: return "Flatten";
    case LayerKind::dense: return "Dense";
  }
  return "?";
}

std::string_view layer_row_prefix(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::relu: return "re_lu";
    case LayerKind::max_pool2d: return "max_pooling2d";
    case LayerKind::dropout: return "dropout";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dense: return "dense";
  }
  return "?";
}

namespace {

template <typename T>
void accumulate(BasicTensor<T>& into, const BasicTensor<T>& delta) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += delta[i];
}

void require_same_shape(const Shape& got, const Shape& want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": gradient shape " + shape_to_string(got) +
                         " does not match " + shape_to_string(want));
  }
}

}  // namespace

// ---------------------------------------------------------------- Conv2D

template <typename T>
Conv2D<T>::Conv2D(std::size_t in_channels, std::size_t out_channels)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      weights_({3, 3, in_channels, out_channels}),
      bias_({out_channels}),
      weight_grad_({3, 3, in_channels, out_channels}),
      bias_grad_({out_channels}) {}

template <typename T>
Shape Conv2D<T>::output_shape(const Shape& input) const {
  if (input.size() != 3 || input[0] < 3 || input[1] < 3) {
    throw DimensionError("Conv2D: input " + shape_to_string(input) +
                         " must be H x W x C with H, W >= 3");
  }
  if (input[2] != in_channels_) {
    throw DimensionError("Conv2D: input has " + std::to_string(input[2]) +
                         " channels, layer expects " + std::to_string(in_channels_));
  }
  return {input[0] - 2, input[1] - 2, out_channels_};
}

template <typename T>
BasicTensor<T> Conv2D<T>::infer(const BasicTensor<T>& x) const {
  const Shape out_shape = output_shape(x.shape());
  const TensorT kernel = weights_.reshaped({9 * in_channels_, out_channels_});
  TensorT y = matmul(im2col(x), kernel);
  const std::size_t positions = y.extent(0);
  for (std::size_t p = 0; p < positions; ++p)
    for (std::size_t o = 0; o < out_channels_; ++o) y[p * out_channels_ + o] += bias_[o];
  return y.reshaped(out_shape);
}

template <typename T>
BasicTensor<T> Conv2D<T>::forward_train(const BasicTensor<T>& x) {
  TensorT y = infer(x);
  input_ = x;
  return y;
}

template <typename T>
BasicTensor<T> Conv2D<T>::backward(const BasicTensor<T>& dy) {
  if (!input_) throw StateError("Conv2D: backward called before a train-mode forward");
  const Shape& in = input_->shape();
  require_same_shape(dy.shape(), output_shape(in), "Conv2D");

  const TensorT dz = dy.reshaped({dy.extent(0) * dy.extent(1), out_channels_});
  const TensorT cols = im2col(*input_);

  accumulate(weight_grad_, matmul(transpose(cols), dz).reshaped(weight_grad_.shape()));
  for (std::size_t p = 0; p < dz.extent(0); ++p)
    for (std::size_t o = 0; o < out_channels_; ++o) bias_grad_[o] += dz[p * out_channels_ + o];

  const TensorT kernel_t = transpose(weights_.reshaped({9 * in_channels_, out_channels_}));
  return col2im(matmul(dz, kernel_t), in[0], in[1], in[2]);
}

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(std::size_t in_features, std::size_t out_features)
    : in_(in_features),
      out_(out_features),
      weights_({in_features, out_features}),
      bias_({out_features}),
      weight_grad_({in_features, out_features}),
      bias_grad_({out_features}) {}

template <typename T>
Shape Dense<T>::output_shape(const Shape& input) const {
  if (input.size() != 1 || input[0] != in_) {
    throw DimensionError("Dense: input " + shape_to_string(input) + " must be [" +
                         std::to_string(in_) + "]");
  }
  return {out_};
}

template <typename T>
BasicTensor<T> Dense<T>::infer(const BasicTensor<T>& x) const {
  output_shape(x.shape());
  TensorT y({out_});
  const T* w = weights_.data().data();
  for (std::size_t i = 0; i < in_; ++i) {
    const T xi = x[i];
    const T* row = w + i * out_;
    for (std::size_t j = 0; j < out_; ++j) y[j] += row[j] * xi;
  }
  for (std::size_t j = 0; j < out_; ++j) y[j] += bias_[j];
  return y;
}

template <typename T>
BasicTensor<T> Dense<T>::forward_train(const BasicTensor<T>& x) {
  TensorT y = infer(x);
  input_ = x;
  return y;
}

template <typename T>
BasicTensor<T> Dense<T>::backward(const BasicTensor<T>& dy) {
  if (!input_) throw StateError("Dense: backward called before a train-mode forward");
  require_same_shape(dy.shape(), {out_}, "Dense");
  const BasicTensor<T>& x = *input_;
  TensorT dx({in_});
  T* dw = weight_grad_.data().data();
  const T* w = weights_.data().data();
  for (std::size_t i = 0; i < in_; ++i) {
    const T xi = x[i];
    T* grow = dw + i * out_;
    const T* wrow = w + i * out_;
    T acc{0};
    for (std::size_t j = 0; j < out_; ++j) {
      grow[j] += xi * dy[j];
      acc += wrow[j] * dy[j];
    }
    dx[i] = acc;
  }
  accumulate(bias_grad_, dy);
  return dx;
}

// ---------------------------------------------------------------- ReLU

template <typename T>
BasicTensor<T> ReLU<T>::infer(const BasicTensor<T>& x) const {
  TensorT y = x;
  for (T& v : y.data()) v = v > T{0} ? v : T{0};
  return y;
}

template <typename T>
BasicTensor<T> ReLU<T>::forward_train(const BasicTensor<T>& x) {
  input_ = x;
  return infer(x);
}

template <typename T>
BasicTensor<T> ReLU<T>::backward(const BasicTensor<T>& dy) {
  if (!input_) throw StateError("ReLU: backward called before a train-mode forward");
  require_same_shape(dy.shape(), input_->shape(), "ReLU");
  TensorT dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!((*input_)[i] > T{0})) dx[i] = T{0};
  return dx;
}

template <typename T>
void ReLU<T>::append_branch_state(std::vector<std::size_t>& out) const {
  if (!input_) return;
  for (T v : input_->data()) out.push_back(v > T{0} ? 1 : 0);
}

// ---------------------------------------------------------------- MaxPool2D

template <typename T>
Shape MaxPool2D<T>::output_shape(const Shape& input) const {
  if (input.size() != 3 || input[0] < 2 || input[1] < 2) {
    throw DimensionError("MaxPool2D: input " + shape_to_string(input) +
                         " must be H x W x C with H, W >= 2");
  }
  return {input[0] / 2, input[1] / 2, input[2]};
}

template <typename T>
BasicTensor<T> MaxPool2D<T>::pool(const BasicTensor<T>& x, std::vector<std::size_t>* winners) const {
  const Shape out_shape = output_shape(x.shape());
  const std::size_t w = x.extent(1), c = x.extent(2);
  const std::size_t oh = out_shape[0], ow = out_shape[1];
  TensorT y(out_shape);
  if (winners) winners->assign(y.size(), 0);
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t top = ((2 * i) * w + 2 * j) * c + ch;
        const std::size_t candidates[4] = {top, top + c, top + w * c, top + w * c + c};
        std::size_t best = candidates[0];
        for (std::size_t k = 1; k < 4; ++k)
          if (x[candidates[k]] > x[best]) best = candidates[k];
        const std::size_t o = (i * ow + j) * c + ch;
        y[o] = x[best];
        if (winners) (*winners)[o] = best;
      }
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> MaxPool2D<T>::infer(const BasicTensor<T>& x) const {
  return pool(x, nullptr);
}

template <typename T>
BasicTensor<T> MaxPool2D<T>::forward_train(const BasicTensor<T>& x) {
  TensorT y = pool(x, &winners_);
  input_shape_ = x.shape();
  return y;
}

template <typename T>
BasicTensor<T> MaxPool2D<T>::backward(const BasicTensor<T>& dy) {
  if (!input_shape_) throw StateError("MaxPool2D: backward called before a train-mode forward");
  require_same_shape(dy.shape(), output_shape(*input_shape_), "MaxPool2D");
  TensorT dx(*input_shape_);
  for (std::size_t o = 0; o < dy.size(); ++o) dx[winners_[o]] += dy[o];
  return dx;
}

template <typename T>
void MaxPool2D<T>::append_branch_state(std::vector<std::size_t>& out) const {
  out.insert(out.end(), winners_.begin(), winners_.end());
}

// ---------------------------------------------------------------- Dropout

template <typename T>
Dropout<T>::Dropout(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("Dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

template <typename T>
BasicTensor<T> Dropout<T>::forward_train(const BasicTensor<T>& x) {
  if (!(frozen_ && mask_ && mask_->shape() == x.shape())) {
    const T scale = static_cast<T>(1.0 / (1.0 - rate_));
    const double keep = 1.0 - rate_;
    TensorT mask(x.shape());
    for (T& m : mask.data()) m = rng_.bernoulli(keep) ? scale : T{0};
    mask_ = std::move(mask);
  }
  TensorT y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= (*mask_)[i];
  return y;
}

template <typename T>
BasicTensor<T> Dropout<T>::backward(const BasicTensor<T>& dy) {
  if (!mask_) throw StateError("Dropout: backward called before a train-mode forward");
  require_same_shape(dy.shape(), mask_->shape(), "Dropout");
  TensorT dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= (*mask_)[i];
  return dx;
}

// ---------------------------------------------------------------- Flatten

template <typename T>
BasicTensor<T> Flatten<T>::backward(const BasicTensor<T>& dy) {
  if (!input_shape_) throw StateError("Flatten: backward called before a train-mode forward");
  require_same_shape(dy.shape(), {shape_size(*input_shape_)}, "Flatten");
  return dy.reshaped(*input_shape_);
}

template class Conv2D<float>;
template class Conv2D<double>;
template class Dense<float>;
template class Dense<double>;
template class ReLU<float>;
template class ReLU<double>;
template class MaxPool2D<float>;
template class MaxPool2D<double>;
template class Dropout<float>;
template class Dropout<double>;
template class Flatten<float>;
template class Flatten<double>;

}  // namespace ctcnn
