#include "angular/models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "angular/format.hpp"

namespace angular {

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation: " + name);
}

LossKind parse_loss(const std::string& name) {
  if (name == "mse") return LossKind::mse;
  if (name == "softmax_cross_entropy" || name == "cross_entropy") {
    return LossKind::softmax_cross_entropy;
  }
  throw std::invalid_argument("unknown loss: " + name);
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("MlpSpec: need at least input and output layers");
  }
  for (std::size_t n : layer_sizes) {
    if (n == 0) throw std::invalid_argument("MlpSpec: layer sizes must be positive");
  }
}

std::vector<LayerLayout> make_layout(const MlpSpec& spec) {
  spec.validate();
  std::vector<LayerLayout> layout;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    LayerLayout layer;
    layer.in = spec.layer_sizes[l];
    layer.out = spec.layer_sizes[l + 1];
    layer.weight_offset = offset;
    offset += layer.in * layer.out;
    layer.bias_offset = offset;
    offset += layer.out;
    layout.push_back(layer);
  }
  return layout;
}

std::size_t param_count(const MlpSpec& spec) {
  const auto layout = make_layout(spec);
  return layout.back().bias_offset + layout.back().out;
}

MlpParams init_params(const MlpSpec& spec, Rng& rng) {
  MlpParams params;
  params.layout = make_layout(spec);
  params.flat.assign(param_count(spec), 0.0);
  for (const LayerLayout& layer : params.layout) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (std::size_t k = 0; k < layer.in * layer.out; ++k) {
      params.flat[layer.weight_offset + k] = rng.uniform(-limit, limit);
    }
  }
  return params;
}

std::size_t Dataset::classes() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

void Dataset::validate() const {
  if (features.size() != labels.size() * n_features) {
    throw std::invalid_argument("Dataset: feature rows and labels differ in count");
  }
  const std::size_t k = classes();
  std::vector<bool> seen(k, false);
  for (int label : labels) {
    if (label < 0) throw std::invalid_argument("Dataset: negative label");
    seen[static_cast<std::size_t>(label)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("Dataset: class labels are not contiguous from 0");
  }
}

namespace {

double activate(Activation a, double x) {
  return a == Activation::tanh ? std::tanh(x) : (x > 0.0 ? x : 0.0);
}

// Derivative expressed through the activation output y (and input x for relu).
double activate_derivative(Activation a, double x, double y) {
  if (a == Activation::tanh) return 1.0 - y * y;
  return x > 0.0 ? 1.0 : 0.0;
}

struct ForwardTrace {
  // pre[l] and post[l] for every layer; post[0] is the input.
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
};

void check_params(const MlpParams& params, const MlpSpec& spec) {
  if (params.flat.size() != param_count(spec)) {
    throw std::invalid_argument("MlpParams: flat size does not match spec");
  }
}

void run_forward(const MlpParams& params, const MlpSpec& spec, std::span<const double> input,
                 ForwardTrace& trace) {
  const std::size_t layers = params.layout.size();
  trace.pre.resize(layers + 1);
  trace.post.resize(layers + 1);
  trace.post[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const LayerLayout& layer = params.layout[l];
    const auto& x = trace.post[l];
    auto& z = trace.pre[l + 1];
    z.assign(layer.out, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double acc = params.flat[layer.bias_offset + o];
      const double* w = params.flat.data() + layer.weight_offset + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * x[i];
      z[o] = acc;
    }
    auto& y = trace.post[l + 1];
    if (l + 1 == layers) {
      y = z;  // output layer is linear
    } else {
      y.resize(layer.out);
      for (std::size_t o = 0; o < layer.out; ++o) y[o] = activate(spec.activation, z[o]);
    }
  }
}

// Per-sample loss and d loss / d output.
double sample_loss(LossKind kind, const std::vector<double>& out, int label,
                   std::vector<double>* d_out) {
  const std::size_t k = out.size();
  const auto target = static_cast<std::size_t>(label);
  if (target >= k) throw std::invalid_argument("label exceeds network output size");
  if (kind == LossKind::softmax_cross_entropy) {
    const double peak = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double z : out) total += std::exp(z - peak);
    const double log_norm = peak + std::log(total);
    if (d_out != nullptr) {
      d_out->resize(k);
      for (std::size_t c = 0; c < k; ++c) (*d_out)[c] = std::exp(out[c] - log_norm);
      (*d_out)[target] -= 1.0;
    }
    return log_norm - out[target];
  }
  double loss = 0.0;
  const double inv_k = 1.0 / static_cast<double>(k);
  if (d_out != nullptr) d_out->resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double diff = out[c] - (c == target ? 1.0 : 0.0);
    loss += diff * diff * inv_k;
    if (d_out != nullptr) (*d_out)[c] = 2.0 * diff * inv_k;
  }
  return loss;
}

std::vector<std::size_t> all_rows(const Dataset& data) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

std::vector<double> forward(const MlpParams& params, const MlpSpec& spec,
                            std::span<const double> input) {
  check_params(params, spec);
  if (input.size() != spec.layer_sizes.front()) {
    throw std::invalid_argument("forward: input width does not match spec");
  }
  ForwardTrace trace;
  run_forward(params, spec, input, trace);
  return trace.post.back();
}

LossAndGrad loss_and_grad(const MlpParams& params, const MlpSpec& spec, const Dataset& data,
                          std::span<const std::size_t> rows) {
  check_params(params, spec);
  if (rows.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  if (data.n_features != spec.layer_sizes.front()) {
    throw std::invalid_argument("loss_and_grad: feature width does not match spec");
  }
  LossAndGrad result;
  result.grad.assign(params.flat.size(), 0.0);
  const std::size_t layers = params.layout.size();
  const double inv_n = 1.0 / static_cast<double>(rows.size());

  ForwardTrace trace;
  std::vector<double> delta;
  std::vector<double> next_delta;
  for (std::size_t r : rows) {
    run_forward(params, spec, data.row(r), trace);
    result.loss += sample_loss(spec.loss, trace.post.back(), data.labels[r], &delta) * inv_n;
    for (double& d : delta) d *= inv_n;

    for (std::size_t l = layers; l-- > 0;) {
      const LayerLayout& layer = params.layout[l];
      const auto& x = trace.post[l];
      for (std::size_t o = 0; o < layer.out; ++o) {
        result.grad[layer.bias_offset + o] += delta[o];
        double* gw = result.grad.data() + layer.weight_offset + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) gw[i] += delta[o] * x[i];
      }
      if (l == 0) break;
      next_delta.assign(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double* w = params.flat.data() + layer.weight_offset + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) next_delta[i] += w[i] * delta[o];
      }
      for (std::size_t i = 0; i < layer.in; ++i) {
        next_delta[i] *= activate_derivative(spec.activation, trace.pre[l][i], x[i]);
      }
      delta.swap(next_delta);
    }
  }
  if (!std::isfinite(result.loss)) throw NonFiniteError("loss_and_grad: non-finite loss");
  return result;
}

LossAndGrad loss_and_grad(const MlpParams& params, const MlpSpec& spec, const Dataset& data) {
  const auto rows = all_rows(data);
  return loss_and_grad(params, spec, data, rows);
}

double loss_only(const MlpParams& params, const MlpSpec& spec, const Dataset& data,
                 std::span<const std::size_t> rows) {
  check_params(params, spec);
  if (rows.empty()) throw std::invalid_argument("loss_only: empty batch");
  ForwardTrace trace;
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    run_forward(params, spec, data.row(r), trace);
    loss += sample_loss(spec.loss, trace.post.back(), data.labels[r], nullptr) * inv_n;
  }
  return loss;
}

double loss_only(const MlpParams& params, const MlpSpec& spec, const Dataset& data) {
  const auto rows = all_rows(data);
  return loss_only(params, spec, data, rows);
}

double accuracy(const MlpParams& params, const MlpSpec& spec, const Dataset& data) {
  if (data.rows() == 0) throw std::invalid_argument("accuracy: empty dataset");
  check_params(params, spec);
  ForwardTrace trace;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    run_forward(params, spec, data.row(r), trace);
    const auto& out = trace.post.back();
    const auto best = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
    if (best == data.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows());
}

Dataset make_blobs(Rng& rng, std::size_t n_per_class, std::size_t classes, double separation) {
  if (n_per_class == 0) throw std::invalid_argument("make_blobs: n_per_class must be >= 1");
  if (classes == 0) throw std::invalid_argument("make_blobs: classes must be >= 1");
  Dataset data;
  data.n_features = 2;
  data.features.reserve(2 * n_per_class * classes);
  data.labels.reserve(n_per_class * classes);
  for (std::size_t k = 0; k < classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(classes);
    const double cx = separation * std::cos(angle);
    const double cy = separation * std::sin(angle);
    for (std::size_t n = 0; n < n_per_class; ++n) {
      data.features.push_back(cx + rng.normal());
      data.features.push_back(cy + rng.normal());
      data.labels.push_back(static_cast<int>(k));
    }
  }
  return data;
}

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  for (std::size_t j = 0; j < data.n_features; ++j) os << 'x' << j << ',';
  os << "label\n";
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (double x : data.row(r)) os << format_double(x) << ',';
    os << data.labels[r] << '\n';
  }
}

Dataset read_dataset_csv(std::istream& is, Split split) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_dataset_csv: missing header");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2) throw std::invalid_argument("read_dataset_csv: need features and a label");
  Dataset data;
  data.split = split;
  data.n_features = columns - 1;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        if (col < data.n_features) {
          data.features.push_back(parse_double(cell));
        } else if (col == data.n_features) {
          std::size_t used = 0;
          data.labels.push_back(std::stoi(cell, &used));
          if (used != cell.size()) throw std::invalid_argument(cell);
        }
      } catch (const std::exception&) {
        throw std::invalid_argument("read_dataset_csv: bad value on line " +
                                    std::to_string(line_no));
      }
      ++col;
    }
    if (col != columns) {
      throw std::invalid_argument("read_dataset_csv: wrong column count on line " +
                                  std::to_string(line_no));
    }
  }
  data.validate();
  return data;
}

}  // namespace angular
