#include "ctcnn/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "ctcnn/bytes.hpp"
#include "ctcnn/checkpoint.hpp"
#include "ctcnn/error.hpp"
#include "ctcnn/loss.hpp"
#include "ctcnn/optim.hpp"

namespace ctcnn {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be finite and >= 0");
}

double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> truths) {
  if (predictions.size() != truths.size()) {
    throw DimensionError("accuracy: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(truths.size()) + " labels");
  }
  if (predictions.empty()) throw DimensionError("accuracy of an empty list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == truths[i];
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

EvalResult evaluate(const Sequential<float>& model, std::span<const Sample> samples) {
  if (samples.empty()) throw ConfigError("evaluate: no samples");
  std::vector<std::size_t> predicted, truth;
  double loss_sum = 0.0;
  for (const Sample& s : samples) {
    const Tensor logits = model.infer(s.image);
    loss_sum += softmax_cross_entropy(logits, s.label).loss;
    predicted.push_back(argmax(logits));
    truth.push_back(s.label);
  }
  return {loss_sum / static_cast<double>(samples.size()), accuracy(predicted, truth)};
}

std::string format_metrics_csv(std::span<const EpochMetrics> history) {
  std::string out = std::string(kMetricsHeader) + "\n";
  char line[256];
  for (const EpochMetrics& m : history) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", m.epoch, m.train_loss,
                  m.train_acc, m.val_loss, m.val_acc, m.elapsed_s);
    out += line;
  }
  return out;
}

TrainResult run_training(Sequential<float>& model, std::span<const Sample> train,
                         std::span<const Sample> val, const TrainConfig& config,
                         const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty() || val.empty()) {
    throw ConfigError("training needs non-empty train and val splits (got " +
                      std::to_string(train.size()) + " / " + std::to_string(val.size()) + ")");
  }
  for (const Sample& s : train) {
    if (s.image.shape() != model.input_shape()) {
      throw DimensionError("sample " + s.source.string() + " has shape " +
                           shape_to_string(s.image.shape()) + ", model expects " +
                           shape_to_string(model.input_shape()));
    }
  }

  Adam<float> optimizer(AdamConfig{.lr = config.lr});
  TrainResult result;
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(train.size(), config.batch_size, config.seed, epoch);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      model.zero_grad();
      for (std::size_t idx : batches[b]) {
        const Sample& s = train[idx];
        const Tensor logits = model.forward(s.image, Mode::train);
        const auto where = [&] {
          return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1) + " (" +
                 s.source.string() + ")";
        };
        if (!all_finite(logits)) throw NumericError("non-finite loss at " + where());
        const auto ce = softmax_cross_entropy(logits, s.label);
        if (!std::isfinite(ce.loss)) throw NumericError("non-finite loss at " + where());
        model.backward(ce.dlogits);
      }
      const float scale = 1.0f / static_cast<float>(batches[b].size());
      auto grads = model.grads();
      for (Tensor* g : grads)
        for (float& v : g->data()) v *= scale;
      auto params = model.params();
      optimizer.step(params, grads);
    }

    EpochMetrics m;
    m.epoch = epoch;
    EvalResult tr, va;
    try {
      tr = evaluate(model, train);
      va = evaluate(model, val);
    } catch (const NumericError& e) {
      throw NumericError("evaluation after epoch " + std::to_string(epoch) + ": " + e.what());
    }
    if (!std::isfinite(tr.loss) || !std::isfinite(va.loss)) {
      throw NumericError("non-finite evaluation loss after epoch " + std::to_string(epoch));
    }
    m.train_loss = tr.loss;
    m.train_acc = tr.accuracy;
    m.val_loss = va.loss;
    m.val_acc = va.accuracy;
    if (config.record_timing) {
      m.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    result.history.push_back(m);

    if (m.val_acc > result.best_val_acc) {
      result.best_val_acc = m.val_acc;
      result.best_epoch = epoch;
      result.best_model = model;
      if (!config.checkpoint_path.empty()) save_checkpoint(model, config.checkpoint_path);
    }
    if (!config.metrics_path.empty()) {
      const std::string csv = format_metrics_csv(result.history);
      bytes::write_file_atomic(config.metrics_path, std::vector<std::uint8_t>(csv.begin(), csv.end()));
    }
    if (on_epoch) on_epoch(m);
  }
  return result;
}

}  // namespace ctcnn
