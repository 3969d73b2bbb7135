#include "ctcnn/optim.hpp"

#include <cmath>

#include "ctcnn/error.hpp"

namespace ctcnn {

namespace {

template <typename T>
void check_pairs(std::span<BasicTensor<T>* const> params, std::span<BasicTensor<T>* const> grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("optimizer: " + std::to_string(params.size()) + " parameter tensors but " +
                         std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i]->shape()) {
      throw DimensionError("optimizer: parameter " + shape_to_string(params[i]->shape()) +
                           " vs gradient " + shape_to_string(grads[i]->shape()));
    }
  }
}

}  // namespace

template <typename T>
void sgd_step(std::span<BasicTensor<T>* const> params, std::span<BasicTensor<T>* const> grads,
              T lr) {
  check_pairs(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->data();
    auto g = grads[i]->data();
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * g[k];
  }
}

template <typename T>
Sgd<T>::Sgd(SgdConfig config) : config_(config) {
  if (!(config.lr > 0)) throw ConfigError("SGD: learning rate must be positive");
}

template <typename T>
void Sgd<T>::step(std::span<BasicTensor<T>* const> params, std::span<BasicTensor<T>* const> grads) {
  sgd_step(params, grads, static_cast<T>(config_.lr));
}

template <typename T>
Adam<T>::Adam(AdamConfig config) : config_(config) {
  if (!(config.lr >= 0) || !(config.beta1 >= 0 && config.beta1 < 1) ||
      !(config.beta2 >= 0 && config.beta2 < 1) || !(config.epsilon >= 0)) {
    throw ConfigError("Adam: need lr >= 0, betas in [0, 1), epsilon >= 0");
  }
}

template <typename T>
void Adam<T>::step(std::span<BasicTensor<T>* const> params, std::span<BasicTensor<T>* const> grads) {
  check_pairs(params, grads);
  if (t_ == 0) {
    m_.clear();
    v_.clear();
    for (const auto* p : params) {
      m_.emplace_back(p->shape());
      v_.emplace_back(p->shape());
    }
  } else {
    if (m_.size() != params.size()) throw DimensionError("Adam: parameter count changed between steps");
    for (std::size_t i = 0; i < params.size(); ++i)
      if (m_[i].shape() != params[i]->shape())
        throw DimensionError("Adam: parameter shape changed between steps");
  }

  ++t_;
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T lr = static_cast<T>(config_.lr);
  const T eps = static_cast<T>(config_.epsilon);
  const T c1 = static_cast<T>(1.0 - std::pow(config_.beta1, static_cast<double>(t_)));
  const T c2 = static_cast<T>(1.0 - std::pow(config_.beta2, static_cast<double>(t_)));

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->data();
    auto g = grads[i]->data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = b1 * m[k] + (T{1} - b1) * g[k];
      v[k] = b2 * v[k] + (T{1} - b2) * g[k] * g[k];
      const T m_hat = m[k] / c1;
      const T v_hat = v[k] / c2;
      p[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template void sgd_step(std::span<BasicTensor<float>* const>, std::span<BasicTensor<float>* const>, float);
template void sgd_step(std::span<BasicTensor<double>* const>, std::span<BasicTensor<double>* const>, double);
template class Sgd<float>;
template class Sgd<double>;
template class Adam<float>;
template class Adam<double>;

}  // namespace ctcnn
