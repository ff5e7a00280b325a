#include "nsreg/piecewise.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nsreg/rng.hpp"

namespace nsreg {

int horizon_indicator(const BasisPiece& piece, std::span<const double> x) {
  const int dim = static_cast<int>(x.size());
  if (piece.axis < 1 || piece.axis > dim)
    throw std::invalid_argument("horizon_indicator: axis " +
                                std::to_string(piece.axis) +
                                " out of range for dimension " +
                                std::to_string(dim));
  std::vector<double> reduced;
  reduced.reserve(x.size() - 1);
  for (int d = 0; d < dim; ++d)
    if (d != piece.axis - 1) reduced.push_back(x[static_cast<size_t>(d)]);
  if (piece.boundary->max_coord() > dim - 1)
    throw std::invalid_argument(
        "horizon_indicator: boundary expression references coordinate beyond "
        "dimension " + std::to_string(dim - 1));
  const double t = x[static_cast<size_t>(piece.axis - 1)] - piece.boundary->eval(reduced);
  if (piece.sign >= 0) return t >= 0.0 ? 1 : 0;
  return t < 0.0 ? 1 : 0;
}

int region_member(const Region& region, std::span<const double> x) {
  if (region.pieces.empty())
    throw std::invalid_argument("region_member: region has no pieces");
  for (const auto& piece : region.pieces)
    if (horizon_indicator(piece, x) == 0) return 0;
  return 1;
}

double PiecewiseSmoothFunction::min_beta() const {
  double b = terms.empty() ? 1.0 : terms.front().component.beta;
  for (const auto& t : terms) b = std::min(b, t.component.beta);
  return b;
}

double PiecewiseSmoothFunction::min_alpha() const {
  double a = 1.0;
  bool first = true;
  for (const auto& t : terms)
    for (const auto& p : t.region.pieces) {
      a = first ? p.alpha : std::min(a, p.alpha);
      first = false;
    }
  return a;
}

double eval_piecewise(const PiecewiseSmoothFunction& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.dim)
    throw std::invalid_argument("eval_piecewise: point dimension " +
                                std::to_string(x.size()) + " != " +
                                std::to_string(f.dim));
  double s = 0.0;
  for (const auto& term : f.terms)
    if (region_member(term.region, x) == 1) s += term.component.eval(x);
  return s;
}

PiecewiseSmoothFunction preset_experiment_target() {
  PiecewiseSmoothFunction f;
  f.dim = 2;

  // Boundary line x2 = 0.75 - 0.6 x1 (expressed over the remaining coordinate).
  ExprPtr boundary = parse_expr("(- 0.75 (* 0.6 x1))");

  PiecewiseTerm upper;
  upper.component.expr = parse_expr("(+ 0.2 (pow x1 2) (* 0.1 x2))");
  upper.component.beta = 2.0;
  upper.region.pieces.push_back({boundary, /*axis=*/2, /*sign=*/+1, /*alpha=*/2.0});

  PiecewiseTerm lower;
  lower.component.expr =
      parse_expr("(+ 0.7 (* 0.01 (pow (abs (- (+ (* 4 x1) (* 10 x2)) 9)) 1.5)))");
  lower.component.beta = 1.5;
  lower.region.pieces.push_back({boundary, /*axis=*/2, /*sign=*/-1, /*alpha=*/2.0});

  f.terms = {std::move(upper), std::move(lower)};
  return f;
}

Dataset sample_dataset(const PiecewiseSmoothFunction& f, size_t n, double sigma,
                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  if (sigma < 0.0) throw std::invalid_argument("sample_dataset: sigma must be >= 0");

  Dataset data;
  data.dim = f.dim;
  data.sigma = sigma;
  data.seed = seed;
  data.xs.resize(n * static_cast<size_t>(f.dim));
  data.ys.resize(n);

  Rng rng(seed);
  for (double& c : data.xs) c = rng.next_uniform();
  for (size_t i = 0; i < n; ++i) {
    const double noise = sigma > 0.0 ? sigma * rng.next_gaussian() : 0.0;
    data.ys[i] = eval_piecewise(f, data.x(i)) + noise;
  }
  return data;
}

std::string target_to_json(const PiecewiseSmoothFunction& f) {
  nlohmann::json doc;
  doc["dim"] = f.dim;
  doc["terms"] = nlohmann::json::array();
  for (const auto& term : f.terms) {
    nlohmann::json jt;
    jt["expr"] = to_prefix(*term.component.expr);
    jt["beta"] = term.component.beta;
    jt["region"] = nlohmann::json::array();
    for (const auto& p : term.region.pieces) {
      nlohmann::json jp;
      jp["axis"] = p.axis;
      jp["sign"] = p.sign;
      jp["alpha"] = p.alpha;
      jp["boundary-expr"] = to_prefix(*p.boundary);
      jt["region"].push_back(std::move(jp));
    }
    doc["terms"].push_back(std::move(jt));
  }
  return doc.dump(2);
}

PiecewiseSmoothFunction target_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  PiecewiseSmoothFunction f;
  f.dim = doc.at("dim").get<int>();
  if (f.dim < 1) throw std::invalid_argument("target json: dim must be >= 1");
  for (const auto& jt : doc.at("terms")) {
    PiecewiseTerm term;
    term.component.expr = parse_expr(jt.at("expr").get<std::string>());
    term.component.beta = jt.at("beta").get<double>();
    if (term.component.beta <= 0.0)
      throw std::invalid_argument("target json: beta must be > 0");
    for (const auto& jp : jt.at("region")) {
      BasisPiece piece;
      piece.axis = jp.at("axis").get<int>();
      piece.sign = jp.at("sign").get<int>() >= 0 ? +1 : -1;
      piece.alpha = jp.at("alpha").get<double>();
      piece.boundary = parse_expr(jp.at("boundary-expr").get<std::string>());
      if (piece.axis < 1 || piece.axis > f.dim)
        throw std::invalid_argument("target json: axis out of range");
      term.region.pieces.push_back(std::move(piece));
    }
    if (term.region.pieces.empty())
      throw std::invalid_argument("target json: region needs at least one piece");
    f.terms.push_back(std::move(term));
  }
  if (f.terms.empty()) throw std::invalid_argument("target json: no terms");
  return f;
}

PiecewiseSmoothFunction load_target_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open target file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return target_from_json(buf.str());
}

}  // namespace nsreg
