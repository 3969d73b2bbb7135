#include "ctcnn/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "ctcnn/checkpoint.hpp"
#include "ctcnn/data.hpp"
#include "ctcnn/error.hpp"
#include "ctcnn/gradcheck.hpp"
#include "ctcnn/image.hpp"
#include "ctcnn/loss.hpp"
#include "ctcnn/model.hpp"
#include "ctcnn/train.hpp"

namespace ctcnn {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Options {
  std::string arch = "paper";
  std::string data;
  std::string model_path;
  std::string image;
  std::string out_dir;
  std::string subset = "val";
  std::string checkpoint = "model.cnck";
  std::string metrics = "metrics.csv";
  std::size_t epochs = 32;
  std::size_t batch = 32;
  double lr = 0.001;
  std::uint64_t seed = 42;
  double split = 0.8;
  std::size_t per_class = 0;
  std::size_t size = 64;
  bool timing = false;
};

int cmd_summary(const Options& o, std::ostream& out) {
  const Arch arch = parse_arch(o.arch);
  const Sequential<float> model = build_model<float>(arch, o.seed);
  out << format_summary(summarize(model), arch_name(arch));
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  config.arch = parse_arch(o.arch);
  config.epochs = o.epochs;
  config.batch_size = o.batch;
  config.lr = o.lr;
  config.seed = o.seed;
  config.split_ratio = o.split;
  config.checkpoint_path = o.checkpoint;
  config.metrics_path = o.metrics;
  config.record_timing = o.timing;
  config.validate();

  const DatasetListing listing = scan_dataset(o.data);
  for (const auto& w : listing.warnings) err << "warning: " << w << "\n";
  if (listing.classes.size() != 4) {
    throw DatasetError("the model has 4 outputs but the dataset has " +
                       std::to_string(listing.classes.size()) + " classes");
  }
  const DatasetSplit split = split_dataset(listing.entries, config.split_ratio, config.seed);

  Sequential<float> model = build_model<float>(config.arch, config.seed);
  model.class_names = listing.classes.names;
  const std::size_t size = model.input_shape()[0];
  const auto train = load_samples(split.train, size);
  const auto val = load_samples(split.val, size);
  out << "classes:";
  for (const auto& n : listing.classes.names) out << " " << n;
  out << "\nsamples: " << train.size() << " train / " << val.size() << " val\n";

  const TrainResult result = run_training(model, train, val, config, [&](const EpochMetrics& m) {
    out << "epoch " << m.epoch << "/" << config.epochs << " train_loss " << fixed6(m.train_loss)
        << " train_acc " << fixed6(m.train_acc) << " val_loss " << fixed6(m.val_loss)
        << " val_acc " << fixed6(m.val_acc);
    if (config.record_timing) out << " elapsed_s " << fixed6(m.elapsed_s);
    out << "\n";
  });
  out << "best val_acc " << fixed6(result.best_val_acc) << " at epoch " << result.best_epoch
      << ", checkpoint " << o.checkpoint << "\n";
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const Sequential<float> model = load_checkpoint(o.model_path);
  const DatasetListing listing = scan_dataset(o.data);
  if (listing.classes.names != model.class_names) {
    throw DatasetError("dataset classes do not match the classes stored in " + o.model_path);
  }
  std::vector<DatasetEntry> entries;
  if (o.subset == "all") {
    entries = listing.entries;
  } else {
    const DatasetSplit split = split_dataset(listing.entries, o.split, o.seed);
    entries = o.subset == "train" ? split.train : split.val;
  }
  if (entries.empty()) throw DatasetError("subset '" + o.subset + "' is empty");
  const auto samples = load_samples(entries, model.input_shape()[0]);
  const EvalResult r = evaluate(model, samples);
  out << "subset " << o.subset << " samples " << samples.size() << "\n";
  out << "loss " << fixed6(r.loss) << "\n";
  out << "accuracy " << fixed6(r.accuracy) << "\n";
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const Sequential<float> model = load_checkpoint(o.model_path);
  const Tensor logits = model.infer(load_image(o.image, model.input_shape()[0]));
  const auto ce = softmax_cross_entropy(logits, 0);
  const std::size_t best = argmax(logits);
  auto label = [&](std::size_t i) {
    return i < model.class_names.size() ? model.class_names[i] : "class_" + std::to_string(i);
  };
  out << "predicted " << label(best) << "\n";
  for (std::size_t i = 0; i < ce.probabilities.size(); ++i)
    out << label(i) << " " << fixed6(ce.probabilities[i]) << "\n";
  return kExitOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  const GradCheckSuiteResult suite = run_gradcheck_suite(o.seed);
  auto line = [&](const GradCheckReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s %-30s max_rel_err %.3e checked %zu skipped %zu\n",
                  r.pass ? "PASS" : "FAIL", r.name.c_str(), r.max_rel_err, r.checked, r.skipped);
    out << buf;
  };
  for (const auto& r : suite.reports) line(r);
  line(suite.mutation);
  out << (suite.all_passed ? "gradcheck passed\n" : "gradcheck FAILED\n");
  return suite.all_passed ? kExitOk : kExitNumeric;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const std::size_t n = synth_dataset(o.out_dir, o.per_class, o.seed, o.size);
  out << "wrote " << n << " files to " << o.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CNN toolkit for four-class chest-CT classification", "ctcnn"};
  app.require_subcommand(1, 1);
  Options o;

  auto* summary = app.add_subcommand("summary", "Print the layer table of an architecture preset");
  summary->add_option("--arch", o.arch, "paper|tiny")->check(CLI::IsMember({"paper", "tiny"}));

  auto* train = app.add_subcommand("train", "Train a model on a directory-per-class dataset");
  train->add_option("--data", o.data, "Dataset root")->required();
  train->add_option("--arch", o.arch, "paper|tiny")->check(CLI::IsMember({"paper", "tiny"}));
  train->add_option("--epochs", o.epochs, "Epochs (default 32)");
  train->add_option("--batch", o.batch, "Batch size (default 32)");
  train->add_option("--lr", o.lr, "Adam learning rate (default 0.001)");
  train->add_option("--seed", o.seed, "Seed (default 42)");
  train->add_option("--split", o.split, "Train fraction (default 0.8)");
  train->add_option("--out", o.checkpoint, "Best checkpoint path (default model.cnck)");
  train->add_option("--metrics", o.metrics, "Metrics CSV path (default metrics.csv)");
  train->add_flag("--timing", o.timing, "Record wall-clock seconds in elapsed_s");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  eval->add_option("--model", o.model_path, "Checkpoint")->required();
  eval->add_option("--data", o.data, "Dataset root")->required();
  eval->add_option("--seed", o.seed, "Split seed (default 42)");
  eval->add_option("--split", o.split, "Train fraction (default 0.8)");
  eval->add_option("--subset", o.subset, "train|val|all (default val)")
      ->check(CLI::IsMember({"train", "val", "all"}));

  auto* predict = app.add_subcommand("predict", "Classify one image");
  predict->add_option("--model", o.model_path, "Checkpoint")->required();
  predict->add_option("--image", o.image, "PNG, JPEG or CTT1 image")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
  gradcheck->add_option("--seed", o.seed, "Seed (default 42)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic four-class CTT1 dataset");
  synth->add_option("--out", o.out_dir, "Output directory")->required();
  synth->add_option("--per-class", o.per_class, "Images per class")->required()->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed, "Seed (default 42)");
  synth->add_option("--size", o.size, "Image extent 64|350 (default 64)")
      ->check(CLI::IsMember({std::size_t{64}, std::size_t{350}}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitUsage;
  }

  try {
    if (*summary) return cmd_summary(o, out);
    if (*train) return cmd_train(o, out, err);
    if (*eval) return cmd_eval(o, out);
    if (*predict) return cmd_predict(o, out);
    if (*gradcheck) return cmd_gradcheck(o, out);
    if (*synth) return cmd_synth(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ctcnn
