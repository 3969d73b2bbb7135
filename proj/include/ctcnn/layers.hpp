#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "ctcnn/random.hpp"
#include "ctcnn/tensor.hpp"

namespace ctcnn {

enum class Mode { train, infer };

enum class LayerKind { conv2d, relu, max_pool2d, dropout, flatten, dense };

// Keras-style type name ("Conv2D", "MaxPooling2D", ...).
std::string_view layer_type_name(LayerKind kind);
// Keras-style row prefix ("conv2d", "max_pooling2d", ...).
std::string_view layer_row_prefix(LayerKind kind);

// A layer in a sequential stack.
//
// infer() is const and touches no state, so a frozen layer can serve
// concurrent readers. forward(x, Mode::train) caches what backward() needs;
// backward() returns the input gradient and *accumulates* parameter gradients
// into grads(), which the caller resets with zero_grad().
template <typename T>
class Layer {
 public:
  using TensorT = BasicTensor<T>;

  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  // Throws DimensionError if the layer cannot accept `input`.
  virtual Shape output_shape(const Shape& input) const = 0;
  virtual std::size_t param_count() const { return 0; }

  virtual TensorT infer(const TensorT& x) const = 0;
  TensorT forward(const TensorT& x, Mode mode) {
    if (mode == Mode::train) return forward_train(x);
    reset_cache();
    return infer(x);
  }
  virtual TensorT backward(const TensorT& dy) = 0;

  virtual std::vector<TensorT*> params() { return {}; }
  virtual std::vector<const TensorT*> params() const { return {}; }
  virtual std::vector<TensorT*> grads() { return {}; }
  void zero_grad() {
    for (TensorT* g : grads()) g->fill(T{0});
  }

  // Discrete decisions taken by the last train forward (ReLU gates, pooling
  // winners). Finite-difference checks compare these to detect kink crossings.
  virtual void append_branch_state(std::vector<std::size_t>& /*out*/) const {}

  virtual std::unique_ptr<Layer> clone() const = 0;

 protected:
  virtual TensorT forward_train(const TensorT& x) = 0;
  virtual void reset_cache() = 0;
};

// 3x3, stride 1, valid padding. weights [3,3,Cin,Cout], bias [Cout].
template <typename T>
class Conv2D final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  Conv2D(std::size_t in_channels, std::size_t out_channels);

  LayerKind kind() const override { return LayerKind::conv2d; }
  Shape output_shape(const Shape& input) const override;
  std::size_t param_count() const override { return (9 * in_channels_ + 1) * out_channels_; }

  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& dy) override;

  std::vector<TensorT*> params() override { return {&weights_, &bias_}; }
  std::vector<const TensorT*> params() const override { return {&weights_, &bias_}; }
  std::vector<TensorT*> grads() override { return {&weight_grad_, &bias_grad_}; }

  std::size_t in_channels() const { return in_channels_; }
  std::size_t out_channels() const { return out_channels_; }
  TensorT& weights() { return weights_; }
  const TensorT& weights() const { return weights_; }
  TensorT& bias() { return bias_; }
  const TensorT& bias() const { return bias_; }
  const TensorT& weight_grad() const { return weight_grad_; }
  const TensorT& bias_grad() const { return bias_grad_; }

  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv2D>(*this); }

 protected:
  TensorT forward_train(const TensorT& x) override;
  void reset_cache() override { input_.reset(); }

 private:
  std::size_t in_channels_;
  std::size_t out_channels_;
  TensorT weights_, bias_, weight_grad_, bias_grad_;
  std::optional<TensorT> input_;
};

// y = W^T x + b for a rank-1 input. weights [in,out], bias [out].
template <typename T>
class Dense : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  Dense(std::size_t in_features, std::size_t out_features);

  LayerKind kind() const override { return LayerKind::dense; }
  Shape output_shape(const Shape& input) const override;
  std::size_t param_count() const override { return in_ * out_ + out_; }

  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& dy) override;

  std::vector<TensorT*> params() override { return {&weights_, &bias_}; }
  std::vector<const TensorT*> params() const override { return {&weights_, &bias_}; }
  std::vector<TensorT*> grads() override { return {&weight_grad_, &bias_grad_}; }

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  TensorT& weights() { return weights_; }
  const TensorT& weights() const { return weights_; }
  TensorT& bias() { return bias_; }
  const TensorT& bias() const { return bias_; }
  const TensorT& weight_grad() const { return weight_grad_; }
  const TensorT& bias_grad() const { return bias_grad_; }

  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dense>(*this); }

 protected:
  TensorT forward_train(const TensorT& x) override;
  void reset_cache() override { input_.reset(); }

  TensorT& mutable_weight_grad() { return weight_grad_; }

 private:
  std::size_t in_;
  std::size_t out_;
  TensorT weights_, bias_, weight_grad_, bias_grad_;
  std::optional<TensorT> input_;
};

// max(0, x). The gradient at exactly 0 is 0.
template <typename T>
class ReLU final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  LayerKind kind() const override { return LayerKind::relu; }
  Shape output_shape(const Shape& input) const override { return input; }

  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& dy) override;
  void append_branch_state(std::vector<std::size_t>& out) const override;

  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReLU>(*this); }

 protected:
  TensorT forward_train(const TensorT& x) override;
  void reset_cache() override { input_.reset(); }

 private:
  std::optional<TensorT> input_;
};

// 2x2 window, stride 2, trailing odd row/column dropped. Ties go to the first
// position in row-major window order.
template <typename T>
class MaxPool2D final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  LayerKind kind() const override { return LayerKind::max_pool2d; }
  Shape output_shape(const Shape& input) const override;

  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& dy) override;
  void append_branch_state(std::vector<std::size_t>& out) const override;

  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPool2D>(*this); }

 protected:
  TensorT forward_train(const TensorT& x) override;
  void reset_cache() override {
    winners_.clear();
    input_shape_.reset();
  }

 private:
  TensorT pool(const TensorT& x, std::vector<std::size_t>* winners) const;

  std::vector<std::size_t> winners_;  // flat input index per output element
  std::optional<Shape> input_shape_;
};

// Inverted dropout: train mode keeps each element with probability 1 - rate
// and scales kept values by 1 / (1 - rate); infer mode is the identity.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  // Throws ConfigError unless 0 <= rate < 1.
  Dropout(double rate, std::uint64_t seed);

  LayerKind kind() const override { return LayerKind::dropout; }
  Shape output_shape(const Shape& input) const override { return input; }

  TensorT infer(const TensorT& x) const override { return x; }
  TensorT backward(const TensorT& dy) override;

  double rate() const { return rate_; }
  void reseed(std::uint64_t seed) { rng_ = Rng(seed); }
  // While frozen, train forwards reuse the cached mask instead of drawing.
  void freeze_mask(bool frozen) { frozen_ = frozen; }
  const std::optional<TensorT>& mask() const { return mask_; }

  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dropout>(*this); }

 protected:
  TensorT forward_train(const TensorT& x) override;
  void reset_cache() override {
    if (!frozen_) mask_.reset();
  }

 private:
  double rate_;
  Rng rng_;
  bool frozen_ = false;
  std::optional<TensorT> mask_;
};

template <typename T>
class Flatten final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  LayerKind kind() const override { return LayerKind::flatten; }
  Shape output_shape(const Shape& input) const override { return {shape_size(input)}; }

  TensorT infer(const TensorT& x) const override { return x.reshaped({x.size()}); }
  TensorT backward(const TensorT& dy) override;

  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Flatten>(*this); }

 protected:
  TensorT forward_train(const TensorT& x) override {
    input_shape_ = x.shape();
    return infer(x);
  }
  void reset_cache() override { input_shape_.reset(); }

 private:
  std::optional<Shape> input_shape_;
};

}  // namespace ctcnn
