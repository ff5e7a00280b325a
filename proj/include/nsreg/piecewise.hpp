#pragma once

// Piecewise smooth target functions on the unit cube: smooth components paired
// with regions cut out by horizon-function half-spaces, plus the seeded
// data-generating process (uniform design, Gaussian noise).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsreg/expr.hpp"

namespace nsreg {

/// A smooth scalar function with its declared smoothness order. `beta` is
/// metadata only; nothing verifies Hoelder membership.
struct SmoothComponent {
  ExprPtr expr;
  double beta = 1.0;

  double eval(std::span<const double> x) const { return expr->eval(x); }
};

/// One side of the graph x_axis = boundary(x_{-axis}). The boundary expression
/// lives on the remaining D-1 coordinates, in their original order (x1..x_{D-1}
/// name the point with coordinate `axis` removed).
///
/// sign=+1 keeps {x_axis - boundary >= 0} (boundary points are inside);
/// sign=-1 keeps the exact complement {x_axis - boundary < 0}, so a pair with
/// equal boundaries partitions the cube.
struct BasisPiece {
  ExprPtr boundary;
  int axis = 1;  // 1-based
  int sign = +1;
  double alpha = 1.0;  // declared boundary smoothness, metadata
};

int horizon_indicator(const BasisPiece& piece, std::span<const double> x);

/// Intersection of J >= 1 basis pieces.
struct Region {
  std::vector<BasisPiece> pieces;
};

int region_member(const Region& region, std::span<const double> x);

struct PiecewiseTerm {
  SmoothComponent component;
  Region region;
};

/// f(x) = sum_m component_m(x) * 1_{region_m}(x).
struct PiecewiseSmoothFunction {
  int dim = 2;
  std::vector<PiecewiseTerm> terms;

  double min_beta() const;
  double min_alpha() const;
};

double eval_piecewise(const PiecewiseSmoothFunction& f, std::span<const double> x);

/// The built-in two-piece 2-D benchmark target:
///   f(x) = 1_{R1}(x) (0.2 + x1^2 + 0.1 x2)
///        + 1_{R2}(x) (0.7 + 0.01 |4 x1 + 10 x2 - 9|^1.5)
/// with R1 = {x2 >= -0.6 x1 + 0.75} and R2 its complement.
PiecewiseSmoothFunction preset_experiment_target();

struct Dataset {
  int dim = 0;
  std::vector<double> xs;  // n*dim, row-major points
  std::vector<double> ys;  // n
  double sigma = 0.0;
  std::uint64_t seed = 0;

  size_t size() const { return ys.size(); }
  std::span<const double> x(size_t i) const {
    return {xs.data() + i * static_cast<size_t>(dim), static_cast<size_t>(dim)};
  }
};

/// X_i iid uniform on the cube, Y_i = f(X_i) + N(0, sigma^2); a pure function
/// of (f, n, sigma, seed). Draw order: all D coordinates of X_i, i ascending,
/// then the n noise terms.
Dataset sample_dataset(const PiecewiseSmoothFunction& f, size_t n, double sigma,
                       std::uint64_t seed);

// JSON document form:
//   {dim, terms:[{expr, beta, region:[{axis, sign, alpha, boundary-expr}]}]}
std::string target_to_json(const PiecewiseSmoothFunction& f);
PiecewiseSmoothFunction target_from_json(const std::string& text);
PiecewiseSmoothFunction load_target_file(const std::string& path);

}  // namespace nsreg
