#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctcnn/data.hpp"
#include "ctcnn/model.hpp"

namespace ctcnn {

struct TrainConfig {
  std::size_t epochs = 32;
  std::size_t batch_size = 32;
  double lr = 0.001;  // Adam
  std::uint64_t seed = 42;
  double split_ratio = 0.8;
  Arch arch = Arch::paper;
  std::filesystem::path checkpoint_path;  // empty: keep the best model in memory only
  std::filesystem::path metrics_path;     // empty: no CSV
  // Wall-clock seconds in the elapsed_s column. Off by default so repeated
  // runs produce identical metrics files.
  bool record_timing = false;

  void validate() const;  // ConfigError
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double elapsed_s = 0.0;
};

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Fraction of equal positions. DimensionError on length mismatch or empty input.
double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> truths);

// Infer-mode pass in sample order; mean cross-entropy and argmax accuracy.
// ConfigError for an empty sample list.
EvalResult evaluate(const Sequential<float>& model, std::span<const Sample> samples);

inline constexpr const char* kMetricsHeader = "epoch,train_loss,train_acc,val_loss,val_acc,elapsed_s";
std::string format_metrics_csv(std::span<const EpochMetrics> history);

struct TrainResult {
  std::vector<EpochMetrics> history;
  std::size_t best_epoch = 0;
  double best_val_acc = -1.0;
  std::optional<Sequential<float>> best_model;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Mini-batch Adam on batch-averaged gradients. After each epoch both splits
// are evaluated, the metrics CSV is rewritten, and the checkpoint is saved
// when val accuracy strictly improves on the best so far. A non-finite loss
// aborts with a NumericError naming the epoch and batch.
TrainResult run_training(Sequential<float>& model, std::span<const Sample> train,
                         std::span<const Sample> val, const TrainConfig& config,
                         const EpochCallback& on_epoch = {});

}  // namespace ctcnn
