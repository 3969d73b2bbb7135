#include "ctcnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctcnn/loss.hpp"
#include "ctcnn/random.hpp"

namespace ctcnn {

namespace {

Tensor64 random_tensor(Shape shape, Rng& rng, double lo, double hi) {
  Tensor64 t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

double dot(const Tensor64& a, const Tensor64& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<std::size_t> probe_indices(std::size_t n, std::size_t samples, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (samples == 0 || samples >= n) return idx;
  // Partial Fisher-Yates: the first `samples` slots are a uniform draw.
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(samples);
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <typename Layerish>
void freeze_dropout(Layerish& l, bool frozen) {
  if (auto* d = dynamic_cast<Dropout<double>*>(&l)) d->freeze_mask(frozen);
}

// Probes one coordinate. `eval` returns (loss, branch state) at the current
// parameters.
template <typename Eval>
void probe(double& coord, double analytic, const std::vector<std::size_t>& base_state,
           const GradCheckOptions& opt, Eval&& eval, GradCheckReport& report) {
  const double saved = coord;
  coord = saved + opt.step;
  auto [f_plus, s_plus] = eval();
  coord = saved - opt.step;
  auto [f_minus, s_minus] = eval();
  coord = saved;
  if (s_plus != base_state || s_minus != base_state) {
    ++report.skipped;
    return;
  }
  const double numeric = (f_plus - f_minus) / (2.0 * opt.step);
  report.max_rel_err = std::max(report.max_rel_err, relative_error(analytic, numeric));
  ++report.checked;
}

void finish(GradCheckReport& report, const GradCheckOptions& opt) {
  report.pass = report.checked > 0 && report.max_rel_err <= opt.tolerance;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

Tensor64 CorruptedDense::backward(const Tensor64& dy) {
  const Tensor64 before = weight_grad();
  Tensor64 dx = Dense<double>::backward(dy);
  Tensor64& g = mutable_weight_grad();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = before[i] + 2.0 * (g[i] - before[i]);
  return dx;
}

GradCheckReport grad_check_layer(Layer<double>& layer, const Tensor64& x,
                                 const GradCheckOptions& opt, std::string name) {
  GradCheckReport report;
  report.name = std::move(name);
  Rng rng(opt.seed);
  const Tensor64 r = random_tensor(layer.output_shape(x.shape()), rng, -1.0, 1.0);

  Tensor64 input = x;
  layer.forward(input, Mode::train);
  freeze_dropout(layer, true);
  layer.zero_grad();
  const Tensor64 dx = layer.backward(r);
  std::vector<std::size_t> base_state;
  layer.append_branch_state(base_state);

  // Analytic gradients are copied out because every probe reruns forward.
  std::vector<Tensor64> grads;
  for (const Tensor64* g : layer.grads()) grads.push_back(*g);

  auto eval = [&] {
    const double f = dot(r, layer.forward(input, Mode::train));
    std::vector<std::size_t> state;
    layer.append_branch_state(state);
    return std::pair{f, state};
  };

  auto params = layer.params();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k : probe_indices(params[t]->size(), opt.samples_per_tensor, rng))
      probe((*params[t])[k], grads[t][k], base_state, opt, eval, report);
  }
  for (std::size_t k : probe_indices(input.size(), opt.samples_per_tensor, rng))
    probe(input[k], dx[k], base_state, opt, eval, report);

  freeze_dropout(layer, false);
  finish(report, opt);
  return report;
}

GradCheckReport grad_check_softmax_cross_entropy(const Tensor64& logits, std::size_t true_class,
                                                 const GradCheckOptions& opt) {
  GradCheckReport report;
  report.name = "softmax_cross_entropy";
  Tensor64 z = logits;
  const Tensor64 analytic = softmax_cross_entropy(z, true_class).dlogits;
  const std::vector<std::size_t> none;
  auto eval = [&] { return std::pair{softmax_cross_entropy(z, true_class).loss, none}; };
  for (std::size_t k = 0; k < z.size(); ++k) probe(z[k], analytic[k], none, opt, eval, report);
  finish(report, opt);
  return report;
}

GradCheckReport grad_check_model(Sequential<double>& model, const Tensor64& x,
                                 std::size_t true_class, const GradCheckOptions& opt,
                                 std::string name) {
  GradCheckReport report;
  report.name = std::move(name);
  Rng rng(opt.seed);

  const Tensor64 logits = model.forward(x, Mode::train);
  for (std::size_t i = 0; i < model.size(); ++i) freeze_dropout(model.layer(i), true);
  model.zero_grad();
  model.backward(softmax_cross_entropy(logits, true_class).dlogits);
  const std::vector<std::size_t> base_state = model.branch_state();

  std::vector<Tensor64> grads;
  for (const Tensor64* g : model.grads()) grads.push_back(*g);

  auto eval = [&] {
    const double f = softmax_cross_entropy(model.forward(x, Mode::train), true_class).loss;
    return std::pair{f, model.branch_state()};
  };

  auto params = model.params();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k : probe_indices(params[t]->size(), opt.samples_per_tensor, rng))
      probe((*params[t])[k], grads[t][k], base_state, opt, eval, report);
  }

  for (std::size_t i = 0; i < model.size(); ++i) freeze_dropout(model.layer(i), false);
  finish(report, opt);
  return report;
}

GradCheckSuiteResult run_gradcheck_suite(std::uint64_t seed) {
  GradCheckSuiteResult result;
  GradCheckOptions opt;
  opt.seed = seed;
  Rng rng = Rng::derive(seed, 7);

  auto randomize = [&](Layer<double>& l) {
    for (Tensor64* p : l.params())
      for (double& v : p->data()) v = rng.uniform(-1.0, 1.0);
  };

  {
    Dense<double> dense(8, 5);
    randomize(dense);
    result.reports.push_back(grad_check_layer(dense, random_tensor({8}, rng, -1, 1), opt, "dense 8->5"));
  }
  {
    Conv2D<double> conv(2, 2);
    randomize(conv);
    result.reports.push_back(
        grad_check_layer(conv, random_tensor({6, 6, 2}, rng, -1, 1), opt, "conv2d 6x6x2->2"));
  }
  {
    MaxPool2D<double> pool;
    result.reports.push_back(
        grad_check_layer(pool, random_tensor({6, 6, 2}, rng, -1, 1), opt, "max_pool2d 6x6x2"));
  }
  {
    ReLU<double> relu;
    result.reports.push_back(grad_check_layer(relu, random_tensor({4, 4, 2}, rng, -1, 1), opt, "relu 4x4x2"));
  }
  {
    Dropout<double> drop(0.5, rng.next_u64());
    result.reports.push_back(
        grad_check_layer(drop, random_tensor({4, 4, 2}, rng, -1, 1), opt, "dropout 0.5 4x4x2"));
  }
  {
    Flatten<double> flat;
    result.reports.push_back(grad_check_layer(flat, random_tensor({3, 3, 2}, rng, -1, 1), opt, "flatten 3x3x2"));
  }
  result.reports.push_back(grad_check_softmax_cross_entropy(
      random_tensor({4}, rng, -2, 2), static_cast<std::size_t>(rng.below(4)), opt));
  {
    Sequential<double> model = build_model<double>(Arch::tiny, seed);
    GradCheckOptions model_opt = opt;
    model_opt.samples_per_tensor = 8;
    result.reports.push_back(grad_check_model(model, random_tensor({64, 64, 3}, rng, 0, 1),
                                              static_cast<std::size_t>(rng.below(4)), model_opt,
                                              "tiny model end to end"));
  }
  {
    CorruptedDense bad(8, 5);
    randomize(bad);
    GradCheckReport r = grad_check_layer(bad, random_tensor({8}, rng, -1, 1), opt, "mutation: dense dw doubled");
    r.pass = !r.pass;
    result.mutation = r;
  }

  result.all_passed = result.mutation.pass;
  for (const auto& r : result.reports) result.all_passed = result.all_passed && r.pass;
  return result;
}

}  // namespace ctcnn
