#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctcnn/tensor.hpp"

namespace ctcnn {

// Shared interface for the training loop. params[i] is updated from grads[i].
template <typename T>
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::span<BasicTensor<T>* const> params,
                    std::span<BasicTensor<T>* const> grads) = 0;
};

// theta <- theta - lr * g. Throws DimensionError on shape mismatch.
template <typename T>
void sgd_step(std::span<BasicTensor<T>* const> params, std::span<BasicTensor<T>* const> grads,
              T lr);

struct SgdConfig {
  double lr = 0.01;
};

template <typename T>
class Sgd final : public Optimizer<T> {
 public:
  explicit Sgd(SgdConfig config);  // ConfigError unless lr > 0
  void step(std::span<BasicTensor<T>* const> params,
            std::span<BasicTensor<T>* const> grads) override;

 private:
  SgdConfig config_;
};

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;  // added after the square root
};

// Adam with bias correction. Moments are zero-initialized on the first step
// from the parameter shapes; later steps must present the same shapes.
template <typename T>
class Adam final : public Optimizer<T> {
 public:
  explicit Adam(AdamConfig config = {});  // ConfigError on lr < 0 or betas outside [0,1)

  void step(std::span<BasicTensor<T>* const> params,
            std::span<BasicTensor<T>* const> grads) override;

  std::size_t steps() const { return t_; }
  const std::vector<BasicTensor<T>>& first_moment() const { return m_; }
  const std::vector<BasicTensor<T>>& second_moment() const { return v_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<BasicTensor<T>> m_, v_;
};

}  // namespace ctcnn
