#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctcnn/bytes.hpp"
#include "ctcnn/checkpoint.hpp"
#include "ctcnn/error.hpp"
#include "ctcnn/train.hpp"
#include "oracles.hpp"

using namespace ctcnn;

namespace {

// Flatten -> Dense(48 -> 4) on 4x4x3 inputs: small enough to train in
// milliseconds, same code paths as the presets.
Sequential<float> linear_model(std::uint64_t seed, double dropout = 0.0) {
  Sequential<float> m({4, 4, 3});
  m.add(std::make_unique<Flatten<float>>());
  if (dropout > 0) m.add(std::make_unique<Dropout<float>>(dropout, 0));
  m.add(std::make_unique<Dense<float>>(48, 4));
  initialize(m, seed);
  m.class_names = {"a", "b", "c", "d"};
  return m;
}

// Class k lights up channel 0 in quadrant k.
std::vector<Sample> quadrant_samples(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t n = 0; n < per_class; ++n) {
      Tensor img = oracle::random_tensor<float>({4, 4, 3}, rng, 0.0, 0.2);
      const std::size_t r0 = (k / 2) * 2, c0 = (k % 2) * 2;
      for (std::size_t i = r0; i < r0 + 2; ++i)
        for (std::size_t j = c0; j < c0 + 2; ++j) img.at(i, j, 0) += 0.8f;
      out.push_back({img, k, "q" + std::to_string(k) + "_" + std::to_string(n)});
    }
  return out;
}

}  // namespace

TEST_CASE("accuracy examples") {
  const std::vector<std::size_t> a{0, 1, 2, 3}, b{1, 2, 3, 0};
  CHECK(accuracy(a, a) == 1.0);
  CHECK(accuracy(a, b) == 0.0);
  std::vector<std::size_t> truth(35, 1), pred(35, 1);
  pred[3] = pred[20] = 0;
  CHECK(accuracy(pred, truth) == doctest::Approx(0.9428571428571428).epsilon(1e-15));
  CHECK_THROWS_AS(accuracy(a, std::vector<std::size_t>{0}), DimensionError);
  CHECK_THROWS_AS(accuracy(std::vector<std::size_t>{}, std::vector<std::size_t>{}), DimensionError);
}

TEST_CASE("uniform random predictions score a quarter") {
  Rng rng(17);
  const std::size_t n = 20000;
  std::vector<std::size_t> pred(n), truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    pred[i] = rng.below(4);
    truth[i] = i % 4;
  }
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
  CHECK(std::abs(accuracy(pred, truth) - 0.25) <= 3 * sigma);
}

TEST_CASE("evaluate on a perfect predictor") {
  Sequential<float> m({4});
  auto dense = std::make_unique<Dense<float>>(4, 4);
  for (std::size_t i = 0; i < 4; ++i) dense->weights().at(i, i) = 10.0f;
  m.add(std::move(dense));
  std::vector<Sample> samples;
  for (std::size_t k = 0; k < 4; ++k) {
    Tensor x({4});
    x[k] = 1.0f;
    samples.push_back({x, k, ""});
  }
  const EvalResult r = evaluate(m, samples);
  CHECK(r.accuracy == 1.0);
  CHECK(r.loss < 1e-3);
  CHECK_THROWS_AS(evaluate(m, std::vector<Sample>{}), ConfigError);
}

TEST_CASE("zero final layer gives the ln 4 loss and the class-0 share") {
  auto m = linear_model(1);
  for (Tensor* p : m.params()) p->fill(0.0f);
  auto samples = quadrant_samples(5, 2);
  samples.resize(17);  // 5 of class 0 among 17
  const EvalResult r = evaluate(m, samples);
  CHECK(std::abs(r.loss - 1.3862943611198906) <= 1e-3);
  CHECK(r.accuracy == doctest::Approx(5.0 / 17.0));
}

TEST_CASE("default config runs exactly 32 epochs") {
  auto m = linear_model(3);
  const auto data = quadrant_samples(6, 3);
  const std::vector<Sample> train(data.begin(), data.begin() + 20), val(data.begin() + 20, data.end());
  TrainConfig cfg;
  CHECK(cfg.epochs == 32);
  CHECK(cfg.batch_size == 32);
  CHECK(cfg.lr == 0.001);
  CHECK(cfg.seed == 42);
  CHECK(cfg.split_ratio == 0.8);
  std::size_t calls = 0;
  const auto result = run_training(m, train, val, cfg, [&](const EpochMetrics&) { ++calls; });
  CHECK(result.history.size() == 32);
  CHECK(calls == 32);
  for (std::size_t i = 0; i < 32; ++i) {
    const auto& e = result.history[i];
    CHECK(e.epoch == i + 1);
    CHECK((e.train_acc >= 0 && e.train_acc <= 1 && e.val_acc >= 0 && e.val_acc <= 1));
    CHECK((e.train_loss >= 0 && e.val_loss >= 0));
    CHECK(e.elapsed_s == 0.0);
  }
}

TEST_CASE("zero learning rate freezes the metrics") {
  const auto data = quadrant_samples(4, 4);
  const std::vector<Sample> train(data.begin(), data.begin() + 12), val(data.begin() + 12, data.end());
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.lr = 0.0;
  for (double rate : {0.0, 0.5}) {
    auto m = linear_model(5, rate);
    const auto before = m.params();
    const Tensor w0 = *before.back();
    const auto h = run_training(m, train, val, cfg).history;
    CHECK(*m.params().back() == w0);
    for (const auto& e : h) {
      CHECK(e.train_loss == h[0].train_loss);
      CHECK(e.val_acc == h[0].val_acc);
    }
  }
}

TEST_CASE("training learns the quadrant task and keeps the best checkpoint") {
  oracle::TempDir dir("train");
  auto m = linear_model(7);
  const auto data = quadrant_samples(10, 7);
  std::vector<Sample> train, val;
  for (std::size_t i = 0; i < data.size(); ++i) (i % 5 == 0 ? val : train).push_back(data[i]);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 8;
  cfg.lr = 0.01;
  cfg.checkpoint_path = dir / "best.cnck";
  cfg.metrics_path = dir / "metrics.csv";
  const auto result = run_training(m, train, val, cfg);

  CHECK(result.history.back().train_acc == 1.0);
  CHECK(result.history.back().train_loss < 0.5 * result.history.front().train_loss);

  double best = -1;
  std::size_t best_epoch = 0;
  for (const auto& e : result.history)
    if (e.val_acc > best) {
      best = e.val_acc;
      best_epoch = e.epoch;
    }
  CHECK(result.best_val_acc == best);
  CHECK(result.best_epoch == best_epoch);

  const auto saved = load_checkpoint(cfg.checkpoint_path);
  CHECK(evaluate(saved, val).accuracy == best);
  REQUIRE(result.best_model.has_value());
  CHECK(encode_checkpoint(*result.best_model) == bytes::read_file(cfg.checkpoint_path));

  const auto csv = bytes::read_file(cfg.metrics_path);
  const std::string text(csv.begin(), csv.end());
  CHECK(text.rfind("epoch,train_loss,train_acc,val_loss,val_acc,elapsed_s\n1,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 41);
  CHECK(text == format_metrics_csv(result.history));
}

TEST_CASE("identical runs write identical files") {
  oracle::TempDir dir("det");
  const auto data = quadrant_samples(5, 8);
  const std::vector<Sample> train(data.begin(), data.begin() + 16), val(data.begin() + 16, data.end());
  for (const char* tag : {"a", "b"}) {
    auto m = linear_model(9, 0.5);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 4;
    cfg.checkpoint_path = dir / (std::string(tag) + ".cnck");
    cfg.metrics_path = dir / (std::string(tag) + ".csv");
    run_training(m, train, val, cfg);
  }
  CHECK(bytes::read_file(dir / "a.csv") == bytes::read_file(dir / "b.csv"));
  CHECK(bytes::read_file(dir / "a.cnck") == bytes::read_file(dir / "b.cnck"));
}

TEST_CASE("metrics CSV formatting") {
  const std::vector<EpochMetrics> h{{1, 1.3862943, 0.25, 1.5, 0.2, 0.0}, {2, 0.5, 1.0, 0.25, 0.9428571, 1.5}};
  CHECK(format_metrics_csv(h) ==
        "epoch,train_loss,train_acc,val_loss,val_acc,elapsed_s\n"
        "1,1.386294,0.250000,1.500000,0.200000,0.000000\n"
        "2,0.500000,1.000000,0.250000,0.942857,1.500000\n");
}

TEST_CASE("training configuration and data errors") {
  auto m = linear_model(1);
  const auto data = quadrant_samples(2, 1);
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(run_training(m, data, std::vector<Sample>{}, cfg), ConfigError);
  CHECK_THROWS_AS(run_training(m, std::vector<Sample>{}, data, cfg), ConfigError);
  TrainConfig bad = cfg;
  bad.epochs = 0;
  CHECK_THROWS_AS(run_training(m, data, data, bad), ConfigError);
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(run_training(m, data, data, bad), ConfigError);
  bad = cfg;
  bad.split_ratio = 1.0;
  CHECK_THROWS_AS(run_training(m, data, data, bad), ConfigError);

  std::vector<Sample> wrong{{Tensor({5, 5, 3}), 0, "wrong"}};
  CHECK_THROWS_AS(run_training(m, wrong, data, cfg), DimensionError);
}

TEST_CASE("a non-finite loss aborts with the epoch and batch") {
  auto m = linear_model(1);
  auto data = quadrant_samples(2, 1);
  data[3].image[0] = std::numeric_limits<float>::quiet_NaN();
  TrainConfig cfg;
  cfg.epochs = 2;
  try {
    run_training(m, data, data, cfg);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("epoch 1") != std::string::npos);
    CHECK(msg.find("batch 1") != std::string::npos);
  }
}
