#include "nsreg/relu_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nsreg/kernels/dispatch.hpp"

namespace nsreg {

int ReluNetwork::max_width() const {
  int w = input_dim();
  for (const auto& layer : layers) w = std::max(w, layer.rows);
  return w;
}

void ReluNetwork::validate() const {
  if (layers.empty()) throw std::invalid_argument("network has no layers");
  for (size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.rows < 1 || layer.cols < 1)
      throw std::invalid_argument("layer " + std::to_string(l) + " has empty shape");
    if (layer.w.size() != static_cast<size_t>(layer.rows) * layer.cols ||
        layer.b.size() != static_cast<size_t>(layer.rows))
      throw std::invalid_argument("layer " + std::to_string(l) + " storage mismatch");
    if (l > 0 && layers[l - 1].rows != layer.cols)
      throw std::invalid_argument("layer dimensions do not chain at layer " +
                                  std::to_string(l));
  }
  if (layers.back().rows != 1)
    throw std::invalid_argument("output dimension must be 1");
}

NetworkStats network_stats(const ReluNetwork& net) {
  NetworkStats s;
  s.depth = net.depth();
  for (const auto& layer : net.layers) {
    for (double v : layer.w) {
      if (v != 0.0) ++s.nonzeros;
      s.max_abs = std::max(s.max_abs, std::fabs(v));
    }
    for (double v : layer.b) {
      if (v != 0.0) ++s.nonzeros;
      s.max_abs = std::max(s.max_abs, std::fabs(v));
    }
  }
  return s;
}

double forward(const ReluNetwork& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim())
    throw std::invalid_argument("forward: input dimension " +
                                std::to_string(x.size()) + " != " +
                                std::to_string(net.input_dim()));
  double out = 0.0;
  kernels::active().mlp_forward(net, x.data(), 1, &out);
  return out;
}

void forward_batch(const ReluNetwork& net, const double* xs, std::size_t n,
                   double* out) {
  kernels::active().mlp_forward(net, xs, n, out);
}

std::size_t param_count(const ReluNetwork& net) {
  size_t p = 0;
  for (const auto& layer : net.layers) p += layer.w.size() + layer.b.size();
  return p;
}

void flatten_params(const ReluNetwork& net, std::span<double> out) {
  size_t k = 0;
  for (const auto& layer : net.layers) {
    for (double v : layer.w) out[k++] = v;
    for (double v : layer.b) out[k++] = v;
  }
}

void unflatten_params(ReluNetwork& net, std::span<const double> in) {
  size_t k = 0;
  for (auto& layer : net.layers) {
    for (double& v : layer.w) v = in[k++];
    for (double& v : layer.b) v = in[k++];
  }
}

ReluNetwork make_dense_shape(const std::vector<int>& sizes) {
  if (sizes.size() < 2)
    throw std::invalid_argument("shape needs at least input and output sizes");
  ReluNetwork net;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    Layer layer;
    layer.cols = sizes[l];
    layer.rows = sizes[l + 1];
    if (layer.cols < 1 || layer.rows < 1)
      throw std::invalid_argument("shape sizes must be positive");
    layer.w.assign(static_cast<size_t>(layer.rows) * layer.cols, 0.0);
    layer.b.assign(static_cast<size_t>(layer.rows), 0.0);
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

std::string network_to_json(const ReluNetwork& net) {
  nlohmann::json doc;
  doc["layers"] = nlohmann::json::array();
  for (const auto& layer : net.layers) {
    nlohmann::json jl;
    jl["rows"] = layer.rows;
    jl["cols"] = layer.cols;
    jl["weights"] = layer.w;
    jl["bias"] = layer.b;
    doc["layers"].push_back(std::move(jl));
  }
  doc["relu_on_output"] = net.relu_on_output;
  return doc.dump();
}

ReluNetwork network_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  ReluNetwork net;
  for (const auto& jl : doc.at("layers")) {
    Layer layer;
    layer.rows = jl.at("rows").get<int>();
    layer.cols = jl.at("cols").get<int>();
    layer.w = jl.at("weights").get<std::vector<double>>();
    layer.b = jl.at("bias").get<std::vector<double>>();
    net.layers.push_back(std::move(layer));
  }
  net.relu_on_output = doc.at("relu_on_output").get<bool>();
  net.validate();
  return net;
}

ReluNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return network_from_json(buf.str());
}

void save_network_file(const ReluNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file: " + path);
  out << network_to_json(net) << "\n";
}

}  // namespace nsreg
