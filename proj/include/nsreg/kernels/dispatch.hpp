#pragma once

// Runtime-selected numeric kernels. Every entry point has a scalar reference
// implementation and an AVX2 variant; the dispatcher picks by cpuid, the
// NSREG_KERNEL environment variable (scalar|avx2|auto), or force_backend().
//
// Contract notes:
//  - mlp_forward: per-point results are identical across backends (no
//    cross-point reductions).
//  - mlp_loss_grad: accumulates over points; backends may differ in summation
//    order, so cross-backend agreement is to rounding, not bitwise. Within one
//    backend results are exactly reproducible.

#include <cstddef>

namespace nsreg {
struct ReluNetwork;
}

namespace nsreg::kernels {

struct Ops {
  const char* name;

  // out[i] = net(xs[i*dim .. i*dim+dim)).
  void (*mlp_forward)(const ReluNetwork& net, const double* xs, std::size_t n,
                      double* out);

  // Mean squared error over (xs, ys) and its gradient in the flatten_params
  // layout. Returns the MSE.
  double (*mlp_loss_grad)(const ReluNetwork& net, const double* xs,
                          const double* ys, std::size_t n, double* grad);

  // out[i*nb + j] = ||a_i - b_j||^2.
  void (*pairwise_sqdist)(const double* a, std::size_t na, const double* b,
                          std::size_t nb, std::size_t dim, double* out);
};

enum class Backend { kAuto, kScalar, kAvx2 };

const Ops& active();
const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when not compiled in or unsupported

/// Overrides the automatic choice; throws if the backend is unavailable.
void force_backend(Backend backend);

bool avx2_supported();

}  // namespace nsreg::kernels
