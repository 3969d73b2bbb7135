#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ctcnn/layers.hpp"
#include "ctcnn/model.hpp"

namespace ctcnn {

struct GradCheckOptions {
  double step = 1e-4;
  double tolerance = 1e-6;
  // Coordinates probed per tensor; 0 probes every coordinate.
  std::size_t samples_per_tensor = 0;
  std::uint64_t seed = 42;
};

struct GradCheckReport {
  std::string name;
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  // Probes whose +/- step flipped a ReLU gate or a pooling winner.
  std::size_t skipped = 0;
  bool pass = false;
};

// |a - n| / max(|a|, |n|, 1e-12)
double relative_error(double analytic, double numeric);

// Central differences of f = sum(r * layer(x)) for a fixed random r, against
// the layer's parameter gradients and its input gradient. Dropout masks are
// held fixed for the duration of the check.
GradCheckReport grad_check_layer(Layer<double>& layer, const Tensor64& x,
                                 const GradCheckOptions& options, std::string name);

// Gradient of the fused softmax cross-entropy with respect to the logits.
GradCheckReport grad_check_softmax_cross_entropy(const Tensor64& logits, std::size_t true_class,
                                                 const GradCheckOptions& options);

// Whole-model check of the training loss for one sample, train mode with
// frozen dropout masks.
GradCheckReport grad_check_model(Sequential<double>& model, const Tensor64& x,
                                 std::size_t true_class, const GradCheckOptions& options,
                                 std::string name);

// Dense layer whose backward doubles the weight gradient. The suite uses it to
// confirm that the checker actually catches broken gradients.
class CorruptedDense final : public Dense<double> {
 public:
  using Dense<double>::Dense;
  Tensor64 backward(const Tensor64& dy) override;
  std::unique_ptr<Layer<double>> clone() const override {
    return std::make_unique<CorruptedDense>(*this);
  }
};

struct GradCheckSuiteResult {
  std::vector<GradCheckReport> reports;
  // The corrupted-backward probe; `pass` there means it was rejected.
  GradCheckReport mutation;
  bool all_passed = false;
};

// Conv, dense, pooling, ReLU, dropout, flatten, softmax cross-entropy and the
// tiny preset end to end, all in 64-bit, plus the mutation probe.
GradCheckSuiteResult run_gradcheck_suite(std::uint64_t seed);

}  // namespace ctcnn
