#pragma once

// Feed-forward ReLU network: a list of affine layers (A_l, b_l), activation
// max(.,0) after every layer except the last; `relu_on_output` restores the
// literal everywhere-rectified semantics for construction checks.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nsreg {

struct Layer {
  int rows = 0;            // output dimension
  int cols = 0;            // input dimension
  std::vector<double> w;   // rows*cols, row-major
  std::vector<double> b;   // rows

  double& at(int r, int c) { return w[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return w[static_cast<size_t>(r) * cols + c]; }
};

struct ReluNetwork {
  std::vector<Layer> layers;
  bool relu_on_output = false;

  int input_dim() const { return layers.empty() ? 0 : layers.front().cols; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().rows; }
  int depth() const { return static_cast<int>(layers.size()); }
  int max_width() const;

  /// Throws std::invalid_argument if layer dimensions do not chain or the
  /// output is not one-dimensional.
  void validate() const;
};

struct NetworkStats {
  int depth = 0;          // |Theta|
  std::size_t nonzeros = 0;  // ||Theta||_0 over all weights and biases
  double max_abs = 0.0;   // ||Theta||_inf
};

NetworkStats network_stats(const ReluNetwork& net);

/// Single-point evaluation (dispatches to the active kernel backend).
double forward(const ReluNetwork& net, std::span<const double> x);

/// Evaluates n points stored row-major in xs.
void forward_batch(const ReluNetwork& net, const double* xs, std::size_t n,
                   double* out);

std::size_t param_count(const ReluNetwork& net);

/// Parameter vector layout: per layer, weights row-major then biases.
void flatten_params(const ReluNetwork& net, std::span<double> out);
void unflatten_params(ReluNetwork& net, std::span<const double> in);

/// Dense network skeleton for layer sizes, e.g. {2,3,3,3,1}; all parameters 0.
ReluNetwork make_dense_shape(const std::vector<int>& sizes);

// JSON form: {layers:[{rows, cols, weights, bias}], relu_on_output}
std::string network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const std::string& text);
ReluNetwork load_network_file(const std::string& path);
void save_network_file(const ReluNetwork& net, const std::string& path);

}  // namespace nsreg
