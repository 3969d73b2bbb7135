#include "ctcnn/loss.hpp"

#include <cmath>

#include "ctcnn/error.hpp"

namespace ctcnn {

template <typename T>
SoftmaxCrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>& logits, std::size_t true_class) {
  if (logits.rank() != 1 || logits.size() < 2) {
    throw DimensionError("softmax_cross_entropy: need a rank-1 tensor of >= 2 logits, got " +
                         shape_to_string(logits.shape()));
  }
  const std::size_t classes = logits.size();
  if (true_class >= classes) {
    throw IndexError("softmax_cross_entropy: class " + std::to_string(true_class) +
                     " out of range for " + std::to_string(classes) + " logits");
  }
  if (!all_finite(logits)) throw NumericError("softmax_cross_entropy: non-finite logits");

  const T peak = logits[argmax(logits)];
  BasicTensor<T> p({classes});
  T total{0};
  for (std::size_t i = 0; i < classes; ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (std::size_t i = 0; i < classes; ++i) p[i] /= total;

  const T loss = std::log(total) - (logits[true_class] - peak);
  BasicTensor<T> d = p;
  d[true_class] -= T{1};
  return {loss, std::move(p), std::move(d)};
}

template SoftmaxCrossEntropy<float> softmax_cross_entropy(const BasicTensor<float>&, std::size_t);
template SoftmaxCrossEntropy<double> softmax_cross_entropy(const BasicTensor<double>&, std::size_t);

}  // namespace ctcnn
