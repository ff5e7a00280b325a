// AVX2 kernels: four points per vector lane-block. Per-point arithmetic runs
// in the same order as the scalar reference, so forwards agree bitwise; the
// loss gradient reduces across lanes in a fixed tree at the end of the batch.

#include "nsreg/kernels/dispatch.hpp"
#include "nsreg/relu_net.hpp"

#ifdef NSREG_BUILD_AVX2

#include <immintrin.h>

#include <cstddef>
#include <vector>

namespace nsreg::kernels {
namespace {

constexpr size_t kLanes = 4;

inline double reduce_fixed(__m256d v) {
  alignas(32) double x[4];
  _mm256_store_pd(x, v);
  return (x[0] + x[1]) + (x[2] + x[3]);
}

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

void avx2_mlp_forward(const ReluNetwork& net, const double* xs, std::size_t n,
                      double* out) {
  const size_t dim = static_cast<size_t>(net.input_dim());
  const size_t width = static_cast<size_t>(net.max_width());
  const int depth = net.depth();
  const __m256d zero = _mm256_setzero_pd();

  std::vector<__m256d> cur(std::max(width, dim)), nxt(width);
  const size_t blocks = n / kLanes;
  for (size_t blk = 0; blk < blocks; ++blk) {
    const double* p = xs + blk * kLanes * dim;
    for (size_t d = 0; d < dim; ++d)
      cur[d] = _mm256_set_pd(p[3 * dim + d], p[2 * dim + d], p[dim + d], p[d]);
    for (int l = 0; l < depth; ++l) {
      const Layer& layer = net.layers[static_cast<size_t>(l)];
      const bool rectify = l + 1 < depth || net.relu_on_output;
      for (int r = 0; r < layer.rows; ++r) {
        __m256d acc = _mm256_set1_pd(layer.b[static_cast<size_t>(r)]);
        const double* wrow = layer.w.data() + static_cast<size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c) {
          const __m256d wv = _mm256_set1_pd(wrow[c]);
          acc = _mm256_add_pd(acc, _mm256_mul_pd(wv, cur[static_cast<size_t>(c)]));
        }
        nxt[static_cast<size_t>(r)] = rectify ? _mm256_max_pd(acc, zero) : acc;
      }
      std::swap(cur, nxt);
    }
    _mm256_storeu_pd(out + blk * kLanes, cur[0]);
  }

  std::vector<double> buf_a(width), buf_b(width);
  for (size_t i = blocks * kLanes; i < n; ++i)
    forward_one(net, xs + i * dim, buf_a.data(), buf_b.data(), out + i);
}

double avx2_mlp_loss_grad(const ReluNetwork& net, const double* xs,
                          const double* ys, std::size_t n, double* grad) {
  const int depth = net.depth();
  const size_t dim = static_cast<size_t>(net.input_dim());
  const size_t params = param_count(net);
  const size_t width = static_cast<size_t>(net.max_width());
  const __m256d zero = _mm256_setzero_pd();

  std::vector<std::vector<__m256d>> acts(static_cast<size_t>(depth) + 1);
  std::vector<std::vector<__m256d>> active(static_cast<size_t>(depth));
  acts[0].resize(dim);
  for (int l = 0; l < depth; ++l) {
    acts[static_cast<size_t>(l) + 1].resize(
        static_cast<size_t>(net.layers[static_cast<size_t>(l)].rows));
    active[static_cast<size_t>(l)].resize(
        static_cast<size_t>(net.layers[static_cast<size_t>(l)].rows));
  }
  std::vector<__m256d> delta(width), delta_prev(width);
  std::vector<__m256d> gacc(params, zero);
  __m256d lacc = zero;

  const size_t nblocks = (n + kLanes - 1) / kLanes;
  for (size_t blk = 0; blk < nblocks; ++blk) {
    const size_t base = blk * kLanes;
    const size_t live = std::min(kLanes, n - base);

    alignas(32) double lane[4];
    for (size_t d = 0; d < dim; ++d) {
      for (size_t k = 0; k < kLanes; ++k)
        lane[k] = k < live ? xs[(base + k) * dim + d] : 0.0;
      acts[0][d] = _mm256_load_pd(lane);
    }
    for (size_t k = 0; k < kLanes; ++k) lane[k] = k < live ? ys[base + k] : 0.0;
    const __m256d yv = _mm256_load_pd(lane);
    for (size_t k = 0; k < kLanes; ++k) lane[k] = k < live ? 1.0 : 0.0;
    const __m256d live_mask = _mm256_load_pd(lane);

    for (int l = 0; l < depth; ++l) {
      const Layer& layer = net.layers[static_cast<size_t>(l)];
      const bool rectify = l + 1 < depth || net.relu_on_output;
      const auto& in = acts[static_cast<size_t>(l)];
      auto& outv = acts[static_cast<size_t>(l) + 1];
      auto& act = active[static_cast<size_t>(l)];
      for (int r = 0; r < layer.rows; ++r) {
        __m256d acc = _mm256_set1_pd(layer.b[static_cast<size_t>(r)]);
        const double* wrow = layer.w.data() + static_cast<size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c) {
          const __m256d wv = _mm256_set1_pd(wrow[c]);
          acc = _mm256_add_pd(acc, _mm256_mul_pd(wv, in[static_cast<size_t>(c)]));
        }
        if (rectify) {
          const __m256d mask = _mm256_cmp_pd(acc, zero, _CMP_GT_OQ);
          act[static_cast<size_t>(r)] = _mm256_and_pd(mask, _mm256_set1_pd(1.0));
          outv[static_cast<size_t>(r)] = _mm256_and_pd(mask, acc);
        } else {
          act[static_cast<size_t>(r)] = _mm256_set1_pd(1.0);
          outv[static_cast<size_t>(r)] = acc;
        }
      }
    }

    __m256d resid = _mm256_sub_pd(acts[static_cast<size_t>(depth)][0], yv);
    resid = _mm256_mul_pd(resid, live_mask);
    lacc = _mm256_add_pd(lacc, _mm256_mul_pd(resid, resid));

    delta[0] = _mm256_mul_pd(resid, active[static_cast<size_t>(depth) - 1][0]);
    size_t offset = params;
    for (int l = depth - 1; l >= 0; --l) {
      const Layer& layer = net.layers[static_cast<size_t>(l)];
      const size_t wsize = static_cast<size_t>(layer.rows) * layer.cols;
      offset -= wsize + static_cast<size_t>(layer.rows);
      const auto& in = acts[static_cast<size_t>(l)];
      for (int r = 0; r < layer.rows; ++r) {
        const __m256d dr = delta[static_cast<size_t>(r)];
        __m256d* gwrow = gacc.data() + offset + static_cast<size_t>(r) * layer.cols;
        for (int c = 0; c < layer.cols; ++c)
          gwrow[c] = _mm256_add_pd(gwrow[c],
                                   _mm256_mul_pd(dr, in[static_cast<size_t>(c)]));
        __m256d& gb = gacc[offset + wsize + static_cast<size_t>(r)];
        gb = _mm256_add_pd(gb, dr);
      }
      if (l > 0) {
        const auto& act = active[static_cast<size_t>(l) - 1];
        for (int c = 0; c < layer.cols; ++c) {
          __m256d acc = zero;
          for (int r = 0; r < layer.rows; ++r) {
            const __m256d wv = _mm256_set1_pd(layer.at(r, c));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(delta[static_cast<size_t>(r)], wv));
          }
          delta_prev[static_cast<size_t>(c)] =
              _mm256_mul_pd(acc, act[static_cast<size_t>(c)]);
        }
        std::swap(delta, delta_prev);
      }
    }
  }

  const double scale = 2.0 / static_cast<double>(n);
  for (size_t p = 0; p < params; ++p) grad[p] = reduce_fixed(gacc[p]) * scale;
  return reduce_fixed(lacc) / static_cast<double>(n);
}

void avx2_pairwise_sqdist(const double* a, std::size_t na, const double* b,
                          std::size_t nb, std::size_t dim, double* out) {
  for (size_t i = 0; i < na; ++i) {
    const double* ai = a + i * dim;
    double* row = out + i * nb;
    size_t j = 0;
    for (; j + kLanes <= nb; j += kLanes) {
      __m256d acc = _mm256_setzero_pd();
      for (size_t d = 0; d < dim; ++d) {
        const __m256d av = _mm256_set1_pd(ai[d]);
        const __m256d bv = _mm256_set_pd(b[(j + 3) * dim + d], b[(j + 2) * dim + d],
                                         b[(j + 1) * dim + d], b[j * dim + d]);
        const __m256d diff = _mm256_sub_pd(av, bv);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
      }
      _mm256_storeu_pd(row + j, acc);
    }
    for (; j < nb; ++j) {
      const double* bj = b + j * dim;
      double acc = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        const double diff = ai[d] - bj[d];
        acc += diff * diff;
      }
      row[j] = acc;
    }
  }
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops{"avx2", avx2_mlp_forward, avx2_mlp_loss_grad,
                       avx2_pairwise_sqdist};
  return &ops;
}

}  // namespace nsreg::kernels

#else  // !NSREG_BUILD_AVX2

namespace nsreg::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace nsreg::kernels

#endif
