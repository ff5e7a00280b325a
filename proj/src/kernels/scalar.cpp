// Scalar reference kernels. Straight per-point loops; the obviously-correct
// baseline the SIMD variants are tested against.

#include <cstddef>
#include <vector>

#include "nsreg/kernels/dispatch.hpp"
#include "nsreg/relu_net.hpp"

namespace nsreg::kernels {
namespace {

void forward_one(const ReluNetwork& net, const double* x, double* buf_a,
                 double* buf_b, double* out) {
  const int depth = net.depth();
  const double* cur = x;
  double* next = buf_a;
  double* other = buf_b;
  for (int l = 0; l < depth; ++l) {
    const Layer& layer = net.layers[static_cast<size_t>(l)];
    const bool rectify = l + 1 < depth || net.relu_on_output;
    for (int r = 0; r < layer.rows; ++r) {
      double acc = layer.b[static_cast<size_t>(r)];
      const double* wrow = layer.w.data() + static_cast<size_t>(r) * layer.cols;
      for (int c = 0; c < layer.cols; ++c) acc += wrow[c] * cur[c];
      next[r] = rectify ? (acc > 0.0 ? acc : 0.0) : acc;
    }
    cur = next;
    std::swap(next, other);
  }
  *out = cur[0];
}

void scalar_mlp_forward(const ReluNetwork& net, const double* xs, std::size_t n,
                        double* out) {
  const size_t width = static_cast<size_t>(net.max_width());
  std::vector<double> buf_a(width), buf_b(width);
  const size_t dim = static_cast<size_t>(net.input_dim());
  for (size_t i = 0; i < n; ++i)
    forward_one(net, xs + i * dim, buf_a.data(), buf_b.data(), out + i);
}

double scalar_mlp_loss_grad(const ReluNetwork& net, const double* xs,
                            const double* ys, std::size_t n, double* grad) {
  const int depth = net.depth();
  const size_t dim = static_cast<size_t>(net.input_dim());
  const size_t params = param_count(net);
  const size_t width = static_cast<size_t>(net.max_width());

  // Post-activation values per layer (acts[0] is the input) and the ReLU
  // active mask per layer, kept for the backward pass.
  std::vector<std::vector<double>> acts(static_cast<size_t>(depth) + 1);
  std::vector<std::vector<unsigned char>> active(static_cast<size_t>(depth));
  acts[0].resize(dim);
  for (int l = 0; l < depth; ++l) {
    acts[static_cast<size_t>(l) + 1].resize(static_cast<size_t>(net.layers[static_cast<size_t>(l)].rows));
    active[static_cast<size_t>(l)].resize(static_cast<size_t>(net.layers[static_cast<size_t>(l)].rows));
  }
  std::vector<double> delta(width), delta_prev(width);

  for (size_t p = 0; p < params; ++p) grad[p] = 0.0;
  double loss = 0.0;

  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < dim; ++d) acts[0][d] = xs[i * dim + d];
    for (int l = 0; l < depth; ++l) {
      const Layer& layer = net.layers[static_cast<size_t>(l)];
      const bool rectify = l + 1 < depth || net.relu_on_output;
      const auto& in = acts[static_cast<size_t>(l)];
      auto& outv = acts[static_cast<size_t>(l) + 1];
      auto& act = active[static_cast<size_t>(l)];
      for (int r = 0; r < layer.rows; ++r) {
        double acc = layer.b[static_cast<size_t>(r)];
        const double* wrow = layer.w.data() + static_cast<size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c) acc += wrow[c] * in[static_cast<size_t>(c)];
        if (rectify) {
          act[static_cast<size_t>(r)] = acc > 0.0 ? 1 : 0;
          outv[static_cast<size_t>(r)] = acc > 0.0 ? acc : 0.0;
        } else {
          act[static_cast<size_t>(r)] = 1;
          outv[static_cast<size_t>(r)] = acc;
        }
      }
    }

    const double resid = acts[static_cast<size_t>(depth)][0] - ys[i];
    loss += resid * resid;

    // Backward: delta holds dLoss_i/dz for the current layer (up to the 2/n
    // factor applied at the end).
    delta[0] = resid * (active[static_cast<size_t>(depth) - 1][0] ? 1.0 : 0.0);
    size_t offset = params;
    for (int l = depth - 1; l >= 0; --l) {
      const Layer& layer = net.layers[static_cast<size_t>(l)];
      const size_t wsize = static_cast<size_t>(layer.rows) * layer.cols;
      offset -= wsize + static_cast<size_t>(layer.rows);
      double* gw = grad + offset;
      double* gb = grad + offset + wsize;
      const auto& in = acts[static_cast<size_t>(l)];
      for (int r = 0; r < layer.rows; ++r) {
        const double dr = delta[static_cast<size_t>(r)];
        double* gwrow = gw + static_cast<size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c) gwrow[c] += dr * in[static_cast<size_t>(c)];
        gb[r] += dr;
      }
      if (l > 0) {
        const auto& act = active[static_cast<size_t>(l) - 1];
        for (int c = 0; c < layer.cols; ++c) {
          double acc = 0.0;
          for (int r = 0; r < layer.rows; ++r)
            acc += delta[static_cast<size_t>(r)] * layer.at(r, c);
          delta_prev[static_cast<size_t>(c)] = act[static_cast<size_t>(c)] ? acc : 0.0;
        }
        std::swap(delta, delta_prev);
      }
    }
  }

  const double scale = 2.0 / static_cast<double>(n);
  for (size_t p = 0; p < params; ++p) grad[p] *= scale;
  return loss / static_cast<double>(n);
}

void scalar_pairwise_sqdist(const double* a, std::size_t na, const double* b,
                            std::size_t nb, std::size_t dim, double* out) {
  for (size_t i = 0; i < na; ++i) {
    const double* ai = a + i * dim;
    for (size_t j = 0; j < nb; ++j) {
      const double* bj = b + j * dim;
      double acc = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        const double diff = ai[d] - bj[d];
        acc += diff * diff;
      }
      out[i * nb + j] = acc;
    }
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", scalar_mlp_forward, scalar_mlp_loss_grad,
                       scalar_pairwise_sqdist};
  return ops;
}

}  // namespace nsreg::kernels
