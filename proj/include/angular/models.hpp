#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "angular/numerics.hpp"

namespace angular {

enum class Activation { tanh, relu };
enum class LossKind { mse, softmax_cross_entropy };
enum class Split { train, test };

Activation parse_activation(const std::string& name);
LossKind parse_loss(const std::string& name);

struct MlpSpec {
  /// Input, hidden..., output widths.
  std::vector<std::size_t> layer_sizes;
  Activation activation = Activation::tanh;
  LossKind loss = LossKind::softmax_cross_entropy;

  void validate() const;
};

/// Location of one dense layer inside the flat parameter vector. Weights are
/// stored row-major as [out][in], followed by the bias of length out.
struct LayerLayout {
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
  std::size_t in = 0;
  std::size_t out = 0;
};

struct MlpParams {
  ParamVector flat;
  std::vector<LayerLayout> layout;
};

std::vector<LayerLayout> make_layout(const MlpSpec& spec);
std::size_t param_count(const MlpSpec& spec);

/// Glorot-uniform weights, zero biases.
MlpParams init_params(const MlpSpec& spec, Rng& rng);

struct Dataset {
  std::size_t n_features = 0;
  /// Row-major, rows() * n_features values.
  std::vector<double> features;
  std::vector<int> labels;
  Split split = Split::train;

  std::size_t rows() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }
  /// Largest label + 1.
  std::size_t classes() const;

  /// Throws if feature and label counts disagree or classes are not
  /// contiguous from 0.
  void validate() const;
};

struct LossAndGrad {
  double loss = 0.0;
  ParamVector grad;
};

/// Mean loss over the selected rows and its gradient by reverse mode.
/// mse is the mean over rows of sum_k (output_k - onehot_k)^2 / K.
LossAndGrad loss_and_grad(const MlpParams& params, const MlpSpec& spec, const Dataset& data,
                          std::span<const std::size_t> rows);
LossAndGrad loss_and_grad(const MlpParams& params, const MlpSpec& spec, const Dataset& data);

/// Loss only (no backward pass); used by finite-difference checks.
double loss_only(const MlpParams& params, const MlpSpec& spec, const Dataset& data,
                 std::span<const std::size_t> rows);
double loss_only(const MlpParams& params, const MlpSpec& spec, const Dataset& data);

/// Network outputs (pre-softmax) for one input row.
std::vector<double> forward(const MlpParams& params, const MlpSpec& spec,
                            std::span<const double> input);

/// Fraction of rows whose arg-max output equals the label. Throws on an
/// empty dataset.
double accuracy(const MlpParams& params, const MlpSpec& spec, const Dataset& data);

/// Isotropic unit-variance Gaussian clusters in 2-D, class k centred at
/// separation * (cos(2 pi k / K), sin(2 pi k / K)). Rows are grouped by class.
Dataset make_blobs(Rng& rng, std::size_t n_per_class, std::size_t classes, double separation);

/// Header row "x0,...,x{d-1},label", then one row per sample.
void write_dataset_csv(std::ostream& os, const Dataset& data);
Dataset read_dataset_csv(std::istream& is, Split split = Split::train);

}  // namespace angular
