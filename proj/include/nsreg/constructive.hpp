#pragma once

// Explicit ReLU-network constructions: exact summation, approximate pairwise
// multiplication via the sawtooth squaring chain, binary-tree products, inner
// products, the 2-layer/5-parameter step approximator, horizon indicators,
// and the full piecewise assembly, with architecture accounting.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nsreg/relu_net.hpp"

namespace nsreg {

struct ApproxBudget {
  double eps1 = 0.0;     // smooth-part tolerance n^{-beta/(2beta+D)}
  double eps2 = 0.0;     // boundary-part tolerance n^{-alpha/(2alpha+2D-2)}
  double eps3 = 0.0;     // combination tolerance, max of the two
  double theta2 = 0.0;   // (2D-2)/alpha
  double theta3 = 0.0;   // min{(2D-2)/alpha, D/beta}
  double S_bound = 0.0;  // c' * max{n^{D/(2beta+D)}, n^{(D-1)/(alpha+D-1)}}
  double L_bound = 0.0;  // c * (1 + max{beta/D, alpha/(2(D-1))})
  double B_bound = 0.0;  // c * n^2 (smallest admissible integer exponent)
};

ApproxBudget architecture_budget(double beta, double alpha, int D, std::size_t n,
                                 double c = 1.0, double c_prime = 1.0);

/// Exact summation of all inputs; a single all-ones affine layer.
ReluNetwork build_sum_net(int dp);

/// Two-input product with sup error <= eps over [-1,1]^2, via
/// x*y = 2 sq(|x+y|/2) - sq(|x|)/2 - sq(|y|)/2 with the m-stage sawtooth
/// squaring approximator (m stages give sup error 4^{-m-1} per square).
ReluNetwork build_mult_net(double eps);

/// Binary tree of pairwise products; sup error <= (dp-1)*eps over [-1,1]^dp.
ReluNetwork build_tree_product_net(int dp, double eps);

/// 2*dp inputs; |net(x) - sum_d x_d x_{dp+d}| <= dp*eps on [-1,1]^{2dp}.
ReluNetwork build_inner_product_net(int dp, double eps);

/// The ramp clamp(t/eps^2, 0, 1) = relu(t/eps^2) - relu(t/eps^2 - 1):
/// 2 layers, 5 nonzero parameters from {1, -1, eps^-2}, values in [0,1],
/// L2 distance eps/sqrt(3) from the step 1_{t>=0} over [-1,1].
ReluNetwork build_heaviside_net(double eps);

/// Indicator of one side of x_axis = hnet(x_{-axis}). Composes coordinate
/// routing, hnet, the sign-adjusted shift, a [-1,1] clamp, and the ramp. The
/// ramp is placed on the outside strip x_axis - h in (-eps^2, 0), so the
/// sign=+1 net is exact on its closed region and the sign=-1 net is exact on
/// the open complement; the two sum to 1 everywhere.
ReluNetwork build_horizon_net(const ReluNetwork& hnet, int axis, int sign,
                              double eps);

/// Wires M smooth subnets and M region subnets into an inner-product head
/// realizing sum_m f_m * 1_{R_m}. Smooth outputs are compressed by 1/scale
/// before multiplication (they must satisfy |f_m| <= scale) and the result is
/// re-expanded, so the head is built at tolerance eps/scale and the
/// full-scale error budget stays <= M*eps plus the subnet errors.
ReluNetwork assemble_piecewise_net(const std::vector<ReluNetwork>& smooth_nets,
                                   const std::vector<ReluNetwork>& region_nets,
                                   double eps, double scale = 2.0);

// ---- network combinators ----

/// Single affine layer; `weights` is rows x cols row-major.
ReluNetwork affine_net(int rows, int cols, std::vector<double> weights,
                       std::vector<double> bias);

/// g after f; f's affine output layer merges into g's first layer.
ReluNetwork compose(const ReluNetwork& g, const ReluNetwork& f);

/// Same-depth nets evaluated on one shared input; outputs concatenate.
ReluNetwork parallel_shared(const std::vector<ReluNetwork>& nets);

/// Pads a single-output net to the target depth with (relu(v), relu(-v))
/// pass-through pairs.
ReluNetwork raise_depth(const ReluNetwork& net, int target_depth);

/// Rewires the first layer to read input coordinate index_map[c] (0-based)
/// from a full_dim-dimensional input.
ReluNetwork select_inputs(const ReluNetwork& net, const std::vector<int>& index_map,
                          int full_dim);

/// Multiplies the (affine) output layer by `factor`.
ReluNetwork scale_output(const ReluNetwork& net, double factor);

// ---- reporting ----

struct BuilderReport {
  std::string kind;
  double eps = 0.0;
  int L = 0;
  std::size_t S = 0;
  double Binf = 0.0;
  double measured_error_grid = 0.0;
};

std::string report_to_json(const BuilderReport& report);

BuilderReport make_report(const std::string& kind, double eps,
                          const ReluNetwork& net, double measured_error_grid);

// Dense-grid error measurement helpers (per_axis points per axis, inclusive
// endpoints).
using ScalarField = std::function<double(std::span<const double>)>;
double grid_sup_error(const ReluNetwork& net, const ScalarField& truth,
                      double lo, double hi, int per_axis);
double grid_l2_error(const ReluNetwork& net, const ScalarField& truth,
                     double lo, double hi, int per_axis);

}  // namespace nsreg
