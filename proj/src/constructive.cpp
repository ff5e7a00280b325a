#include "nsreg/constructive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace nsreg {

namespace {

void require_affine_out(const ReluNetwork& net, const char* who) {
  if (net.relu_on_output)
    throw std::invalid_argument(std::string(who) + ": subnet must end affine");
}

void check_eps(double eps, const char* who) {
  if (!(eps > 0.0) || !(eps < 0.5))
    throw std::invalid_argument(std::string(who) + ": eps must lie in (0, 1/2)");
}

/// Sawtooth stages needed so that 3 * 4^{-m-1} <= eps (each square contributes
/// 4^{-m-1}; the product combination uses 2 + 1/2 + 1/2 of them).
int squaring_stages(double eps) {
  const int m =
      static_cast<int>(std::ceil((std::log2(1.0 / eps) - 2.0) / 2.0)) + 1;
  return std::max(m, 1);
}

ReluNetwork identity_net1() {
  return affine_net(1, 1, {1.0}, {0.0});
}

}  // namespace

ApproxBudget architecture_budget(double beta, double alpha, int D, std::size_t n,
                                 double c, double c_prime) {
  if (beta <= 0.0 || alpha <= 0.0)
    throw std::invalid_argument("architecture_budget: beta, alpha must be > 0");
  if (D < 2) throw std::invalid_argument("architecture_budget: D must be >= 2");
  if (n < 1) throw std::invalid_argument("architecture_budget: n must be >= 1");

  const double nd = static_cast<double>(n);
  ApproxBudget b;
  b.eps1 = std::pow(nd, -beta / (2.0 * beta + D));
  b.eps2 = std::pow(nd, -alpha / (2.0 * alpha + 2.0 * D - 2.0));
  b.eps3 = std::max(b.eps1, b.eps2);
  b.theta2 = (2.0 * D - 2.0) / alpha;
  b.theta3 = std::min((2.0 * D - 2.0) / alpha, D / beta);
  b.S_bound = c_prime * std::max(std::pow(nd, D / (2.0 * beta + D)),
                                 std::pow(nd, (D - 1.0) / (alpha + D - 1.0)));
  b.L_bound = c * (1.0 + std::max(beta / D, alpha / (2.0 * (D - 1.0))));
  b.B_bound = c * nd * nd;
  return b;
}

ReluNetwork affine_net(int rows, int cols, std::vector<double> weights,
                       std::vector<double> bias) {
  if (rows < 1 || cols < 1 ||
      weights.size() != static_cast<size_t>(rows) * cols ||
      bias.size() != static_cast<size_t>(rows))
    throw std::invalid_argument("affine_net: shape/storage mismatch");
  ReluNetwork net;
  net.layers.push_back({rows, cols, std::move(weights), std::move(bias)});
  return net;
}

ReluNetwork compose(const ReluNetwork& g, const ReluNetwork& f) {
  require_affine_out(f, "compose");
  if (f.output_dim() != g.input_dim())
    throw std::invalid_argument("compose: dimension mismatch");

  ReluNetwork out;
  out.relu_on_output = g.relu_on_output;
  out.layers.assign(f.layers.begin(), f.layers.end() - 1);

  const Layer& fl = f.layers.back();
  const Layer& g0 = g.layers.front();
  Layer merged;
  merged.rows = g0.rows;
  merged.cols = fl.cols;
  merged.w.assign(static_cast<size_t>(merged.rows) * merged.cols, 0.0);
  merged.b.assign(static_cast<size_t>(merged.rows), 0.0);
  for (int r = 0; r < g0.rows; ++r) {
    double acc_b = g0.b[static_cast<size_t>(r)];
    for (int k = 0; k < g0.cols; ++k) {
      const double grk = g0.at(r, k);
      acc_b += grk * fl.b[static_cast<size_t>(k)];
      for (int c = 0; c < fl.cols; ++c) merged.at(r, c) += grk * fl.at(k, c);
    }
    merged.b[static_cast<size_t>(r)] = acc_b;
  }
  out.layers.push_back(std::move(merged));
  out.layers.insert(out.layers.end(), g.layers.begin() + 1, g.layers.end());
  return out;
}

ReluNetwork parallel_shared(const std::vector<ReluNetwork>& nets) {
  if (nets.empty()) throw std::invalid_argument("parallel_shared: no nets");
  const int depth = nets.front().depth();
  const int in_dim = nets.front().input_dim();
  for (const auto& net : nets) {
    require_affine_out(net, "parallel_shared");
    if (net.depth() != depth || net.input_dim() != in_dim)
      throw std::invalid_argument("parallel_shared: nets must share depth and input dim");
  }

  ReluNetwork out;
  for (int l = 0; l < depth; ++l) {
    int rows = 0, cols = 0;
    for (const auto& net : nets) {
      rows += net.layers[static_cast<size_t>(l)].rows;
      cols += net.layers[static_cast<size_t>(l)].cols;
    }
    if (l == 0) cols = in_dim;  // shared input, stacked not block-diagonal

    Layer layer;
    layer.rows = rows;
    layer.cols = cols;
    layer.w.assign(static_cast<size_t>(rows) * cols, 0.0);
    layer.b.assign(static_cast<size_t>(rows), 0.0);

    int row_off = 0, col_off = 0;
    for (const auto& net : nets) {
      const Layer& src = net.layers[static_cast<size_t>(l)];
      const int base_col = l == 0 ? 0 : col_off;
      for (int r = 0; r < src.rows; ++r) {
        for (int c = 0; c < src.cols; ++c)
          layer.at(row_off + r, base_col + c) = src.at(r, c);
        layer.b[static_cast<size_t>(row_off + r)] = src.b[static_cast<size_t>(r)];
      }
      row_off += src.rows;
      col_off += src.cols;
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

ReluNetwork raise_depth(const ReluNetwork& net, int target_depth) {
  require_affine_out(net, "raise_depth");
  if (net.output_dim() != 1)
    throw std::invalid_argument("raise_depth: needs a single-output net");
  const int extra = target_depth - net.depth();
  if (extra < 0) throw std::invalid_argument("raise_depth: target shallower than net");
  if (extra == 0) return net;

  ReluNetwork out;
  out.layers.assign(net.layers.begin(), net.layers.end() - 1);

  // Split the output v into (relu(v), relu(-v)), carry, then recombine.
  const Layer& last = net.layers.back();
  Layer split;
  split.rows = 2;
  split.cols = last.cols;
  split.w.resize(2 * static_cast<size_t>(last.cols));
  split.b = {last.b[0], -last.b[0]};
  for (int c = 0; c < last.cols; ++c) {
    split.w[static_cast<size_t>(c)] = last.at(0, c);
    split.w[static_cast<size_t>(last.cols + c)] = -last.at(0, c);
  }
  out.layers.push_back(std::move(split));
  for (int k = 0; k < extra - 1; ++k)
    out.layers.push_back({2, 2, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}});
  out.layers.push_back({1, 2, {1.0, -1.0}, {0.0}});
  return out;
}

ReluNetwork select_inputs(const ReluNetwork& net, const std::vector<int>& index_map,
                          int full_dim) {
  if (static_cast<int>(index_map.size()) != net.input_dim())
    throw std::invalid_argument("select_inputs: map size != net input dim");
  for (int idx : index_map)
    if (idx < 0 || idx >= full_dim)
      throw std::invalid_argument("select_inputs: index out of range");

  ReluNetwork out = net;
  Layer& first = out.layers.front();
  std::vector<double> w(static_cast<size_t>(first.rows) * full_dim, 0.0);
  for (int r = 0; r < first.rows; ++r)
    for (int c = 0; c < first.cols; ++c)
      w[static_cast<size_t>(r) * full_dim + index_map[static_cast<size_t>(c)]] +=
          first.at(r, c);
  first.w = std::move(w);
  first.cols = full_dim;
  return out;
}

ReluNetwork scale_output(const ReluNetwork& net, double factor) {
  require_affine_out(net, "scale_output");
  ReluNetwork out = net;
  for (double& v : out.layers.back().w) v *= factor;
  for (double& v : out.layers.back().b) v *= factor;
  return out;
}

ReluNetwork build_sum_net(int dp) {
  if (dp < 1) throw std::invalid_argument("build_sum_net: dp must be >= 1");
  return affine_net(1, dp, std::vector<double>(static_cast<size_t>(dp), 1.0), {0.0});
}

ReluNetwork build_heaviside_net(double eps) {
  check_eps(eps, "build_heaviside_net");
  const double inv = 1.0 / (eps * eps);
  ReluNetwork net;
  net.layers.push_back({2, 1, {inv, inv}, {0.0, -1.0}});
  net.layers.push_back({1, 2, {1.0, -1.0}, {0.0}});
  return net;
}

ReluNetwork build_mult_net(double eps) {
  check_eps(eps, "build_mult_net");
  const int m = squaring_stages(eps);

  ReluNetwork net;
  // Layer 1: signed parts of x+y, x, y.
  net.layers.push_back({6, 2,
                        {1, 1,  -1, -1,  1, 0,  -1, 0,  0, 1,  0, -1},
                        {0, 0, 0, 0, 0, 0}});
  // Layer 2: c_ch = relu(1 - |.|) per channel; t_ch = 1 - c_ch = min(|.|, 1).
  net.layers.push_back({3, 6,
                        {-0.5, -0.5, 0, 0, 0, 0,
                         0, 0, -1, -1, 0, 0,
                         0, 0, 0, 0, -1, -1},
                        {1, 1, 1}});

  // Stage 1 per channel: carry cc = relu(c), w1 = relu(1-c) = relu(t),
  // v1 = relu(0.5-c) = relu(t - 1/2).
  {
    Layer stage;
    stage.rows = 9;
    stage.cols = 3;
    stage.w.assign(27, 0.0);
    stage.b.assign(9, 0.0);
    for (int ch = 0; ch < 3; ++ch) {
      const int r0 = ch * 3;
      stage.at(r0 + 0, ch) = 1.0;                               // cc
      stage.at(r0 + 1, ch) = -1.0; stage.b[static_cast<size_t>(r0 + 1)] = 1.0;  // w1
      stage.at(r0 + 2, ch) = -1.0; stage.b[static_cast<size_t>(r0 + 2)] = 0.5;  // v1
    }
    net.layers.push_back(std::move(stage));
  }

  // Stages 2..m per channel: inputs (cc, w, v[, pp]); g = 2w - 4v;
  // outputs (cc, relu(g), relu(g - 1/2), relu(pp + g/4^{s-1})).
  for (int s = 2; s <= m; ++s) {
    const int in_per = s == 2 ? 3 : 4;
    const double pow4 = std::pow(4.0, s - 1);
    Layer stage;
    stage.rows = 12;
    stage.cols = 3 * in_per;
    stage.w.assign(static_cast<size_t>(stage.rows) * stage.cols, 0.0);
    stage.b.assign(12, 0.0);
    for (int ch = 0; ch < 3; ++ch) {
      const int in0 = ch * in_per;
      const int r0 = ch * 4;
      stage.at(r0 + 0, in0 + 0) = 1.0;  // cc carry
      stage.at(r0 + 1, in0 + 1) = 2.0;  // relu(g)
      stage.at(r0 + 1, in0 + 2) = -4.0;
      stage.at(r0 + 2, in0 + 1) = 2.0;  // relu(g - 1/2)
      stage.at(r0 + 2, in0 + 2) = -4.0;
      stage.b[static_cast<size_t>(r0 + 2)] = -0.5;
      stage.at(r0 + 3, in0 + 1) = 2.0 / pow4;  // partial sum
      stage.at(r0 + 3, in0 + 2) = -4.0 / pow4;
      if (in_per == 4) stage.at(r0 + 3, in0 + 3) = 1.0;
      net.layers.size();  // no-op; keeps clang-tidy quiet about unused warnings
    }
    net.layers.push_back(std::move(stage));
  }

  // Output: 2*sq(t_u) - sq(t_a)/2 - sq(t_b)/2 where
  // sq(t) = (1 - cc) - pp - g_m/4^m and g_m = 2w - 4v.
  {
    const int in_per = m == 1 ? 3 : 4;
    const double pow4 = std::pow(4.0, m);
    const double coef[3] = {2.0, -0.5, -0.5};
    Layer head;
    head.rows = 1;
    head.cols = 3 * in_per;
    head.w.assign(static_cast<size_t>(head.cols), 0.0);
    head.b.assign(1, 0.0);
    double bias = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
      const int in0 = ch * in_per;
      bias += coef[ch];
      head.w[static_cast<size_t>(in0 + 0)] = -coef[ch];            // -cc
      head.w[static_cast<size_t>(in0 + 1)] = -coef[ch] * 2.0 / pow4;  // -2w/4^m
      head.w[static_cast<size_t>(in0 + 2)] = coef[ch] * 4.0 / pow4;   // +4v/4^m
      if (in_per == 4) head.w[static_cast<size_t>(in0 + 3)] = -coef[ch];  // -pp
    }
    head.b[0] = bias;
    net.layers.push_back(std::move(head));
  }
  return net;
}

namespace {

ReluNetwork tree_product(const std::vector<int>& indices, int full_dim, double eps) {
  if (indices.size() == 1) return select_inputs(identity_net1(), indices, full_dim);
  if (indices.size() == 2)
    return select_inputs(build_mult_net(eps), indices, full_dim);

  const size_t half = indices.size() / 2;
  ReluNetwork left =
      tree_product({indices.begin(), indices.begin() + half}, full_dim, eps);
  ReluNetwork right =
      tree_product({indices.begin() + half, indices.end()}, full_dim, eps);
  const int depth = std::max(left.depth(), right.depth());
  left = raise_depth(left, depth);
  right = raise_depth(right, depth);
  return compose(build_mult_net(eps), parallel_shared({left, right}));
}

}  // namespace

ReluNetwork build_tree_product_net(int dp, double eps) {
  if (dp < 2) throw std::invalid_argument("build_tree_product_net: dp must be >= 2");
  check_eps(eps, "build_tree_product_net");
  std::vector<int> indices(static_cast<size_t>(dp));
  for (int d = 0; d < dp; ++d) indices[static_cast<size_t>(d)] = d;
  return tree_product(indices, dp, eps);
}

ReluNetwork build_inner_product_net(int dp, double eps) {
  if (dp < 1) throw std::invalid_argument("build_inner_product_net: dp must be >= 1");
  check_eps(eps, "build_inner_product_net");
  std::vector<ReluNetwork> blocks;
  blocks.reserve(static_cast<size_t>(dp));
  for (int d = 0; d < dp; ++d)
    blocks.push_back(select_inputs(build_mult_net(eps), {d, dp + d}, 2 * dp));
  return compose(build_sum_net(dp), parallel_shared(blocks));
}

ReluNetwork build_horizon_net(const ReluNetwork& hnet, int axis, int sign,
                              double eps) {
  check_eps(eps, "build_horizon_net");
  require_affine_out(hnet, "build_horizon_net");
  if (hnet.output_dim() != 1)
    throw std::invalid_argument("build_horizon_net: hnet must output one value");
  const int dim = hnet.input_dim() + 1;
  if (axis < 1 || axis > dim)
    throw std::invalid_argument("build_horizon_net: axis out of range");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("build_horizon_net: sign must be +1 or -1");

  std::vector<int> reduced;
  for (int d = 0; d < dim; ++d)
    if (d != axis - 1) reduced.push_back(d);
  ReluNetwork sub = select_inputs(hnet, reduced, dim);
  ReluNetwork carry = select_inputs(identity_net1(), {axis - 1}, dim);
  const int depth = std::max(sub.depth(), carry.depth());
  sub = raise_depth(sub, depth);
  carry = raise_depth(carry, depth);
  ReluNetwork pair = parallel_shared({sub, carry});  // outputs (h, x_axis)

  // t = sign * (x_axis - h), clamped to [-1, 1]; the ramp then reads
  // s = t + eps^2 for sign=+1 (exact at the boundary, ramp just outside) and
  // s = t for sign=-1 (exact complement).
  const double sg = static_cast<double>(sign);
  ReluNetwork shift = affine_net(1, 2, {-sg, sg}, {0.0});
  ReluNetwork chain = compose(shift, pair);

  ReluNetwork clamp;
  clamp.layers.push_back({1, 1, {1.0}, {1.0}});   // u1 = relu(t + 1)
  clamp.layers.push_back({1, 1, {-1.0}, {2.0}});  // u2 = relu(2 - u1); t_cl = 1 - u2
  const double inv = 1.0 / (eps * eps);
  const double offset = sign > 0 ? eps * eps : 0.0;
  // s = (1 - u2) + offset; ramp units relu(s/eps^2), relu(s/eps^2 - 1).
  clamp.layers.push_back({2, 1, {-inv, -inv},
                          {(1.0 + offset) * inv, (1.0 + offset) * inv - 1.0}});
  clamp.layers.push_back({1, 2, {1.0, -1.0}, {0.0}});
  return compose(clamp, chain);
}

ReluNetwork assemble_piecewise_net(const std::vector<ReluNetwork>& smooth_nets,
                                   const std::vector<ReluNetwork>& region_nets,
                                   double eps, double scale) {
  if (smooth_nets.empty() || smooth_nets.size() != region_nets.size())
    throw std::invalid_argument(
        "assemble_piecewise_net: need equal, nonempty smooth/region counts");
  check_eps(eps, "assemble_piecewise_net");
  if (!(scale > 0.0))
    throw std::invalid_argument("assemble_piecewise_net: scale must be > 0");
  const int m = static_cast<int>(smooth_nets.size());
  const int dim = smooth_nets.front().input_dim();

  std::vector<ReluNetwork> blocks;
  blocks.reserve(static_cast<size_t>(2 * m));
  int depth = 1;
  for (const auto& net : smooth_nets) depth = std::max(depth, net.depth());
  for (const auto& net : region_nets) depth = std::max(depth, net.depth());
  for (const auto& net : smooth_nets) {
    if (net.input_dim() != dim)
      throw std::invalid_argument("assemble_piecewise_net: input dims differ");
    blocks.push_back(raise_depth(scale_output(net, 1.0 / scale), depth));
  }
  for (const auto& net : region_nets) {
    if (net.input_dim() != dim)
      throw std::invalid_argument("assemble_piecewise_net: input dims differ");
    blocks.push_back(raise_depth(net, depth));
  }

  ReluNetwork head = build_inner_product_net(m, eps / scale);
  return scale_output(compose(head, parallel_shared(blocks)), scale);
}

std::string report_to_json(const BuilderReport& report) {
  nlohmann::json doc;
  doc["kind"] = report.kind;
  doc["eps"] = report.eps;
  doc["L"] = report.L;
  doc["S"] = report.S;
  doc["Binf"] = report.Binf;
  doc["measured_error_grid"] = report.measured_error_grid;
  return doc.dump(2);
}

BuilderReport make_report(const std::string& kind, double eps,
                          const ReluNetwork& net, double measured_error_grid) {
  const NetworkStats stats = network_stats(net);
  return {kind, eps, stats.depth, stats.nonzeros, stats.max_abs,
          measured_error_grid};
}

namespace {

template <typename Accum>
void for_each_grid_point(int dim, double lo, double hi, int per_axis, Accum&& fn) {
  std::vector<int> idx(static_cast<size_t>(dim), 0);
  std::vector<double> x(static_cast<size_t>(dim));
  const double step = per_axis > 1 ? (hi - lo) / (per_axis - 1) : 0.0;
  while (true) {
    for (int d = 0; d < dim; ++d) x[static_cast<size_t>(d)] = lo + step * idx[static_cast<size_t>(d)];
    fn(std::span<const double>(x));
    int d = 0;
    for (; d < dim; ++d) {
      if (++idx[static_cast<size_t>(d)] < per_axis) break;
      idx[static_cast<size_t>(d)] = 0;
    }
    if (d == dim) break;
  }
}

}  // namespace

double grid_sup_error(const ReluNetwork& net, const ScalarField& truth,
                      double lo, double hi, int per_axis) {
  double worst = 0.0;
  for_each_grid_point(net.input_dim(), lo, hi, per_axis,
                      [&](std::span<const double> x) {
                        worst = std::max(worst,
                                         std::fabs(forward(net, x) - truth(x)));
                      });
  return worst;
}

double grid_l2_error(const ReluNetwork& net, const ScalarField& truth,
                     double lo, double hi, int per_axis) {
  double sum = 0.0;
  size_t count = 0;
  for_each_grid_point(net.input_dim(), lo, hi, per_axis,
                      [&](std::span<const double> x) {
                        const double d = forward(net, x) - truth(x);
                        sum += d * d;
                        ++count;
                      });
  return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace nsreg
