#pragma once

#include <cstddef>

#include "ctcnn/tensor.hpp"

namespace ctcnn {

template <typename T>
struct SoftmaxCrossEntropy {
  T loss;
  BasicTensor<T> probabilities;
  BasicTensor<T> dlogits;  // probabilities - onehot(true_class)
};

// Fused softmax + cross-entropy with the max-shifted log-sum-exp.
// DimensionError if fewer than 2 logits, IndexError for a class out of range,
// NumericError for non-finite logits.
template <typename T>
SoftmaxCrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>& logits, std::size_t true_class);

}  // namespace ctcnn
