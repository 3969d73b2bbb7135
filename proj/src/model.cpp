#include "ctcnn/model.hpp"

#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <utility>

#include "ctcnn/error.hpp"
#include "ctcnn/random.hpp"

namespace ctcnn {

Arch parse_arch(std::string_view name) {
  if (name == "paper") return Arch::paper;
  if (name == "tiny") return Arch::tiny;
  throw ConfigError("unknown architecture preset '" + std::string(name) + "' (expected paper|tiny)");
}

std::string_view arch_name(Arch arch) { return arch == Arch::paper ? "paper" : "tiny"; }

template <typename T>
Sequential<T>::Sequential(Shape input_shape)
    : input_shape_(input_shape), output_shape_(std::move(input_shape)) {}

template <typename T>
Sequential<T>::Sequential(const Sequential& other)
    : class_names(other.class_names),
      arch(other.arch),
      input_shape_(other.input_shape_),
      output_shape_(other.output_shape_) {
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

template <typename T>
Sequential<T>& Sequential<T>::operator=(const Sequential& other) {
  if (this != &other) *this = Sequential(other);
  return *this;
}

template <typename T>
void Sequential<T>::add(std::unique_ptr<Layer<T>> layer) {
  output_shape_ = layer->output_shape(output_shape_);
  layers_.push_back(std::move(layer));
}

template <typename T>
BasicTensor<T> Sequential<T>::forward(const TensorT& x, Mode mode) {
  if (x.shape() != input_shape_) {
    throw DimensionError("model expects input " + shape_to_string(input_shape_) + ", got " +
                         shape_to_string(x.shape()));
  }
  TensorT h = x;
  for (auto& l : layers_) h = l->forward(h, mode);
  return h;
}

template <typename T>
BasicTensor<T> Sequential<T>::infer(const TensorT& x) const {
  if (x.shape() != input_shape_) {
    throw DimensionError("model expects input " + shape_to_string(input_shape_) + ", got " +
                         shape_to_string(x.shape()));
  }
  TensorT h = x;
  for (const auto& l : layers_) h = l->infer(h);
  return h;
}

template <typename T>
void Sequential<T>::backward(const TensorT& dlogits) {
  TensorT g = dlogits;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    // The first layer's input gradient is never used.
    if (std::next(it) == layers_.rend() && (*it)->grads().empty()) break;
    g = (*it)->backward(g);
  }
}

template <typename T>
std::vector<BasicTensor<T>*> Sequential<T>::params() {
  std::vector<TensorT*> out;
  for (auto& l : layers_)
    for (TensorT* p : l->params()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<const BasicTensor<T>*> Sequential<T>::params() const {
  std::vector<const TensorT*> out;
  for (const auto& l : layers_)
    for (const TensorT* p : std::as_const(*l).params()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<BasicTensor<T>*> Sequential<T>::grads() {
  std::vector<TensorT*> out;
  for (auto& l : layers_)
    for (TensorT* g : l->grads()) out.push_back(g);
  return out;
}

template <typename T>
void Sequential<T>::zero_grad() {
  for (auto& l : layers_) l->zero_grad();
}

template <typename T>
std::size_t Sequential<T>::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l->param_count();
  return n;
}

template <typename T>
std::vector<std::size_t> Sequential<T>::branch_state() const {
  std::vector<std::size_t> out;
  for (const auto& l : layers_) l->append_branch_state(out);
  return out;
}

template <typename T>
void initialize(Sequential<T>& model, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    Layer<T>& l = model.layer(i);
    std::size_t fan_in = 0, fan_out = 0;
    if (auto* conv = dynamic_cast<Conv2D<T>*>(&l)) {
      fan_in = 9 * conv->in_channels();
      fan_out = 9 * conv->out_channels();
    } else if (auto* dense = dynamic_cast<Dense<T>*>(&l)) {
      fan_in = dense->in_features();
      fan_out = dense->out_features();
    } else if (auto* drop = dynamic_cast<Dropout<T>*>(&l)) {
      drop->reseed(Rng::derive(seed, 1000 + i).next_u64());
      continue;
    } else {
      continue;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    auto ps = l.params();
    for (T& w : ps[0]->data()) w = static_cast<T>(rng.uniform(-limit, limit));
    ps[1]->fill(T{0});
  }
}

template <typename T>
Sequential<T> build_model(Arch arch, std::uint64_t seed) {
  struct Widths {
    std::size_t input, c1, c2, c3, c4, hidden;
  };
  const Widths w = arch == Arch::paper ? Widths{350, 32, 32, 64, 128, 64}
                                       : Widths{64, 8, 8, 16, 32, 16};
  constexpr std::size_t kClasses = 4;
  constexpr double kDropout = 0.5;

  Sequential<T> m({w.input, w.input, 3});
  m.arch = std::string(arch_name(arch));
  m.add(std::make_unique<Conv2D<T>>(3, w.c1));
  m.add(std::make_unique<ReLU<T>>());
  m.add(std::make_unique<Conv2D<T>>(w.c1, w.c2));
  m.add(std::make_unique<ReLU<T>>());
  m.add(std::make_unique<MaxPool2D<T>>());
  m.add(std::make_unique<Conv2D<T>>(w.c2, w.c3));
  m.add(std::make_unique<ReLU<T>>());
  m.add(std::make_unique<MaxPool2D<T>>());
  m.add(std::make_unique<Conv2D<T>>(w.c3, w.c4));
  m.add(std::make_unique<ReLU<T>>());
  m.add(std::make_unique<MaxPool2D<T>>());
  m.add(std::make_unique<Dropout<T>>(kDropout, 0));
  m.add(std::make_unique<Flatten<T>>());
  m.add(std::make_unique<Dense<T>>(m.output_shape()[0], w.hidden));
  m.add(std::make_unique<ReLU<T>>());
  m.add(std::make_unique<Dropout<T>>(kDropout, 0));
  m.add(std::make_unique<Dense<T>>(w.hidden, kClasses));
  initialize(m, seed);
  return m;
}

template <typename T>
ModelSummary summarize(const Sequential<T>& model) {
  ModelSummary s;
  std::map<LayerKind, std::size_t> seen;
  Shape shape = model.input_shape();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Layer<T>& l = model.layer(i);
    shape = l.output_shape(shape);
    if (l.kind() == LayerKind::relu && !s.rows.empty()) {
      s.rows.back().output_shape = shape;
      continue;
    }
    std::size_t& n = seen[l.kind()];
    std::string name(layer_row_prefix(l.kind()));
    if (n > 0) name += "_" + std::to_string(n);
    ++n;
    s.rows.push_back({name, std::string(layer_type_name(l.kind())), shape, l.param_count()});
    s.total_params += l.param_count();
  }
  s.trainable_params = s.total_params;
  return s;
}

std::string group_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string format_summary(const ModelSummary& summary, std::string_view title) {
  auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  const std::string rule(65, '_');
  const std::string heavy(65, '=');
  std::string out = "Model: \"" + std::string(title) + "\"\n" + rule + "\n";
  out += pad(" Layer (type)", 33) + pad("Output Shape", 26) + "Param #\n" + heavy + "\n";
  for (std::size_t r = 0; r < summary.rows.size(); ++r) {
    const LayerSummary& row = summary.rows[r];
    std::string shape = "(None";
    for (std::size_t e : row.output_shape) shape += ", " + std::to_string(e);
    shape += ")";
    out += pad(" " + row.name + " (" + row.type + ")", 33) + pad(shape, 26) +
           std::to_string(row.params) + "\n";
    if (r + 1 < summary.rows.size()) out += "\n";
  }
  out += heavy + "\n";
  out += "Total params: " + group_thousands(summary.total_params) + "\n";
  out += "Trainable params: " + group_thousands(summary.trainable_params) + "\n";
  out += "Non-trainable params: " + group_thousands(summary.non_trainable_params) + "\n";
  out += rule + "\n";
  return out;
}

template class Sequential<float>;
template class Sequential<double>;
template void initialize(Sequential<float>&, std::uint64_t);
template void initialize(Sequential<double>&, std::uint64_t);
template Sequential<float> build_model(Arch, std::uint64_t);
template Sequential<double> build_model(Arch, std::uint64_t);
template ModelSummary summarize(const Sequential<float>&);
template ModelSummary summarize(const Sequential<double>&);

}  // namespace ctcnn
