#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ctcnn/layers.hpp"
#include "ctcnn/tensor.hpp"

namespace ctcnn {

// Architecture presets. `paper` is the 350x350x3 four-class CT classifier;
// `tiny` has the same topology at 64x64x3 with widths 8/8/16/32 and a
// 16-unit hidden dense layer.
enum class Arch { paper, tiny };

Arch parse_arch(std::string_view name);  // ConfigError on unknown names
std::string_view arch_name(Arch arch);

// Ordered layer stack. Adding a layer checks that it accepts the current
// output shape, so a constructed model always chains consistently.
template <typename T>
class Sequential {
 public:
  using TensorT = BasicTensor<T>;

  explicit Sequential(Shape input_shape);
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  void add(std::unique_ptr<Layer<T>> layer);

  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return output_shape_; }
  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  // Logits for one sample. Train mode caches for backward and draws dropout
  // masks; infer mode is a pure function of parameters and input.
  TensorT forward(const TensorT& x, Mode mode);
  TensorT infer(const TensorT& x) const;

  // Accumulates parameter gradients for the last train-mode forward.
  void backward(const TensorT& dlogits);

  std::vector<TensorT*> params();
  std::vector<const TensorT*> params() const;
  std::vector<TensorT*> grads();
  void zero_grad();

  std::size_t param_count() const;

  // Discrete ReLU/pooling decisions of the last train forward.
  std::vector<std::size_t> branch_state() const;

  // Label names in class-id order; persisted with checkpoints.
  std::vector<std::string> class_names;
  std::string arch = "custom";

 private:
  Shape input_shape_;
  Shape output_shape_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

// Glorot-uniform weights, zero biases, dropout streams derived from `seed`.
template <typename T>
void initialize(Sequential<T>& model, std::uint64_t seed);

template <typename T>
Sequential<T> build_model(Arch arch, std::uint64_t seed = 42);

struct LayerSummary {
  std::string name;  // "conv2d", "conv2d_1", ...
  std::string type;  // "Conv2D"
  Shape output_shape;
  std::size_t params = 0;
};

struct ModelSummary {
  std::vector<LayerSummary> rows;
  std::size_t total_params = 0;
  std::size_t trainable_params = 0;
  std::size_t non_trainable_params = 0;
};

// Activation layers are folded into the preceding row.
template <typename T>
ModelSummary summarize(const Sequential<T>& model);

std::string format_summary(const ModelSummary& summary, std::string_view title);

// 13873572 -> "13,873,572"
std::string group_thousands(std::size_t n);

}  // namespace ctcnn
