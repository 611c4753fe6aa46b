#include "geomgan/graph.hpp"

#include <algorithm>
#include <cmath>

namespace geomgan {

const char* partition_name(Partition p) {
  switch (p) {
    case Partition::w: return "w";
    case Partition::b: return "b";
    case Partition::zeta: return "zeta";
    case Partition::theta: return "theta";
  }
  return "?";
}

void ParamSet::add(ParamEntry e) {
  if (index_.count(e.name))
    throw std::invalid_argument("duplicate parameter name: " + e.name);
  index_[e.name] = entries_.size();
  entries_.push_back(std::move(e));
}

const ParamEntry& ParamSet::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown parameter: " + name);
  return entries_[it->second];
}

bool ParamSet::contains(const std::string& name) const { return index_.count(name) > 0; }

std::vector<ParamEntry> ParamSet::in_partition(Partition p) const {
  std::vector<ParamEntry> out;
  for (const auto& e : entries_)
    if (e.partition == p) out.push_back(e);
  return out;
}

// --- node construction ---------------------------------------------------

NodeId Graph::push(Node n) {
  for (NodeId p : n.parents) check_id(p);
  nodes_.push_back(std::move(n));
  required_cache_.clear();
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Graph::check_id(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
    throw std::invalid_argument("node id out of range");
}

NodeId Graph::input(std::string name) {
  if (input_ids_.count(name))
    throw std::invalid_argument("duplicate input name: " + name);
  Node n;
  n.kind = OpKind::input;
  n.name = name;
  NodeId id = push(std::move(n));
  input_ids_[std::move(name)] = id;
  return id;
}

NodeId Graph::constant(Array value) {
  Node n;
  n.kind = OpKind::input;
  n.value = std::move(value);
  n.bound = true;
  return push(std::move(n));
}

NodeId Graph::parameter(std::string name, Partition partition, Array init) {
  Node n;
  n.kind = OpKind::parameter;
  n.name = name;
  n.partition = partition;
  n.value = std::move(init);
  n.bound = true;
  NodeId id = push(std::move(n));
  params_.add({nodes_[id].name, id, partition});
  return id;
}

namespace {
Node unary(OpKind kind, NodeId x) {
  Node n;
  n.kind = kind;
  n.parents = {x};
  return n;
}
}  // namespace

NodeId Graph::linear(NodeId x, NodeId w, NodeId b) {
  Node n;
  n.kind = OpKind::linear;
  n.parents = {x, w, b};
  return push(std::move(n));
}

NodeId Graph::relu(NodeId x) { return push(unary(OpKind::relu, x)); }
NodeId Graph::sigmoid(NodeId x) { return push(unary(OpKind::sigmoid, x)); }
NodeId Graph::tanh(NodeId x) { return push(unary(OpKind::tanh, x)); }
NodeId Graph::log(NodeId x) { return push(unary(OpKind::log, x)); }
NodeId Graph::exp(NodeId x) { return push(unary(OpKind::exp, x)); }
NodeId Graph::hinge_pos_part(NodeId x) { return push(unary(OpKind::hinge_pos_part, x)); }

NodeId Graph::batchnorm(NodeId x, NodeId gamma, NodeId beta, double eps) {
  if (eps <= 0) throw std::invalid_argument("batchnorm: eps must be positive");
  Node n;
  n.kind = OpKind::batchnorm;
  n.parents = {x, gamma, beta};
  n.eps = eps;
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::add;
  n.parents = {a, b};
  return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::mul;
  n.parents = {a, b};
  return push(std::move(n));
}

NodeId Graph::mean(NodeId x) { return push(unary(OpKind::mean, x)); }

NodeId Graph::mean_rows(NodeId x) {
  Node n = unary(OpKind::mean, x);
  n.over_rows = true;
  return push(std::move(n));
}

NodeId Graph::inner_product(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::inner_product;
  n.parents = {a, b};
  return push(std::move(n));
}

NodeId Graph::abs(NodeId x) { return add(hinge_pos_part(x), hinge_pos_part(scale(x, -1.0))); }

NodeId Graph::softplus(NodeId x) {
  NodeId pos = hinge_pos_part(x);
  NodeId neg_abs = scale(abs(x), -1.0);
  NodeId tail = log(add_const(exp(neg_abs), 1.0));
  return add(pos, tail);
}

// --- evaluation ----------------------------------------------------------

const std::vector<char>& Graph::required_mask(NodeId out) {
  auto it = required_cache_.find(out);
  if (it != required_cache_.end()) return it->second;
  std::vector<char> mask(nodes_.size(), 0);
  std::vector<NodeId> stack{out};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (mask[id]) continue;
    mask[id] = 1;
    for (NodeId p : nodes_[id].parents) stack.push_back(p);
  }
  return required_cache_.emplace(out, std::move(mask)).first->second;
}

void Graph::bind(const std::string& input_name, Array value) {
  auto it = input_ids_.find(input_name);
  if (it == input_ids_.end())
    throw std::invalid_argument("unknown input: " + input_name);
  nodes_[it->second].value = std::move(value);
  nodes_[it->second].bound = true;
}

const Array& Graph::forward(NodeId out) {
  check_id(out);
  const auto& mask = required_mask(out);
  for (std::size_t id = 0; id < nodes_.size(); ++id)
    if (mask[id]) eval(static_cast<NodeId>(id));
  last_forward_ = out;
  return nodes_[out].value;
}

namespace {
// Shapes are stable across training steps; keep the buffer when they match.
void reshape(Array& a, const std::vector<std::size_t>& shape) {
  if (a.shape != shape) {
    a.shape = shape;
    a.data.assign(shape_numel(shape), 0.0);
  } else if (a.data.size() != shape_numel(shape)) {
    a.data.assign(shape_numel(shape), 0.0);
  }
}

void copy_into(Array& dst, const Array& src) {
  reshape(dst, src.shape);
  dst.data = src.data;
}
}  // namespace

void Graph::eval(NodeId id) {
  Node& n = nodes_[id];
  auto v = [&]() -> const Array& { return nodes_[n.parents[0]].value; };
  switch (n.kind) {
    case OpKind::input:
      if (!n.bound) throw std::runtime_error("unbound input: " + n.name);
      return;
    case OpKind::parameter:
      return;
    case OpKind::linear: {
      const Array& x = nodes_[n.parents[0]].value;
      const Array& w = nodes_[n.parents[1]].value;
      const Array& b = nodes_[n.parents[2]].value;
      if (w.shape.size() != 2)
        throw std::invalid_argument("linear: weight must be 2-D");
      std::size_t in = w.shape[0], out_dim = w.shape[1];
      if (x.cols() != in)
        throw std::invalid_argument("linear: input width " + std::to_string(x.cols()) +
                                    " does not match weight " + shape_to_string(w.shape));
      if (b.size() != out_dim)
        throw std::invalid_argument("linear: bias width mismatch");
      std::size_t rows = x.rows();
      reshape(n.value, {rows, out_dim});
      const double* __restrict__ xp = x.data.data();
      const double* __restrict__ wp = w.data.data();
      const double* __restrict__ bp = b.data.data();
      double* __restrict__ yp = n.value.data.data();
      for (std::size_t r = 0; r < rows; ++r) {
        double* __restrict__ y = yp + r * out_dim;
        for (std::size_t o = 0; o < out_dim; ++o) y[o] = bp[o];
        const double* xr = xp + r * in;
        for (std::size_t i = 0; i < in; ++i) {
          double xv = xr[i];
          const double* __restrict__ wr = wp + i * out_dim;
          for (std::size_t o = 0; o < out_dim; ++o) y[o] += xv * wr[o];
        }
      }
      return;
    }
    case OpKind::relu:
    case OpKind::hinge_pos_part: {
      const Array& x = v();
      copy_into(n.value, x);
      // NaN passes through so non-finite states reach the loss check.
      for (double& e : n.value.data) e = e <= 0.0 ? 0.0 : e;
      return;
    }
    case OpKind::sigmoid: {
      const Array& x = v();
      copy_into(n.value, x);
      for (double& e : n.value.data) {
        if (e >= 0.0) {
          e = 1.0 / (1.0 + std::exp(-e));
        } else {
          double t = std::exp(e);
          e = t / (1.0 + t);
        }
      }
      return;
    }
    case OpKind::tanh: {
      copy_into(n.value, v());
      for (double& e : n.value.data) e = std::tanh(e);
      return;
    }
    case OpKind::log: {
      copy_into(n.value, v());
      for (double& e : n.value.data) e = std::log(e);
      return;
    }
    case OpKind::exp: {
      copy_into(n.value, v());
      for (double& e : n.value.data) e = std::exp(e);
      return;
    }
    case OpKind::batchnorm: {
      const Array& x = nodes_[n.parents[0]].value;
      const Array& gamma = nodes_[n.parents[1]].value;
      const Array& beta = nodes_[n.parents[2]].value;
      std::size_t rows = x.rows(), cols = x.cols();
      if (rows < 2) throw std::invalid_argument("batchnorm: batch must be >= 2");
      if (gamma.size() != cols || beta.size() != cols)
        throw std::invalid_argument("batchnorm: gamma/beta width mismatch");
      reshape(n.value, {rows, cols});
      for (std::size_t j = 0; j < cols; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < rows; ++i) mu += x.at(i, j);
        mu /= static_cast<double>(rows);
        double var = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          double d = x.at(i, j) - mu;
          var += d * d;
        }
        var /= static_cast<double>(rows);
        double inv = 1.0 / std::sqrt(var + n.eps);
        for (std::size_t i = 0; i < rows; ++i)
          n.value.at(i, j) = gamma.data[j] * ((x.at(i, j) - mu) * inv) + beta.data[j];
      }
      return;
    }
    case OpKind::add:
    case OpKind::mul: {
      const Array& a = nodes_[n.parents[0]].value;
      const Array& b = nodes_[n.parents[1]].value;
      bool is_add = n.kind == OpKind::add;
      if (a.same_shape(b)) {
        reshape(n.value, a.shape);
        for (std::size_t i = 0; i < b.size(); ++i)
          n.value.data[i] = is_add ? a.data[i] + b.data[i] : a.data[i] * b.data[i];
      } else if (b.is_scalar()) {
        copy_into(n.value, a);
        double s = b.data[0];
        for (double& e : n.value.data) e = is_add ? e + s : e * s;
      } else if (a.is_scalar()) {
        copy_into(n.value, b);
        double s = a.data[0];
        for (double& e : n.value.data) e = is_add ? s + e : s * e;
      } else {
        throw std::invalid_argument("add/mul: shape mismatch " + shape_to_string(a.shape) +
                                    " vs " + shape_to_string(b.shape));
      }
      return;
    }
    case OpKind::mean: {
      const Array& x = v();
      if (x.size() == 0) throw std::invalid_argument("mean: empty input");
      if (n.over_rows) {
        std::size_t rows = x.rows(), cols = x.cols();
        reshape(n.value, {cols});
        for (std::size_t j = 0; j < cols; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < rows; ++i) s += x.at(i, j);
          n.value.data[j] = s / static_cast<double>(rows);
        }
      } else {
        double s = 0.0;
        for (double e : x.data) s += e;
        reshape(n.value, {1});
        n.value.data[0] = s / static_cast<double>(x.size());
      }
      return;
    }
    case OpKind::inner_product: {
      const Array& a = nodes_[n.parents[0]].value;
      const Array& b = nodes_[n.parents[1]].value;
      if (!a.same_shape(b))
        throw std::invalid_argument("inner_product: shape mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
      reshape(n.value, {1});
      n.value.data[0] = s;
      return;
    }
  }
  throw std::logic_error("unhandled op kind");
}

void Graph::backward(NodeId out) {
  check_id(out);
  if (last_forward_ != out)
    throw std::runtime_error("backward: forward(out) must run first");
  if (!nodes_[out].value.is_scalar())
    throw std::invalid_argument("backward: output must be scalar");
  const auto& mask = required_mask(out);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    Node& node = nodes_[id];
    if (mask[id] || node.kind == OpKind::parameter) {
      reshape(node.grad, node.value.shape);
      std::fill(node.grad.data.begin(), node.grad.data.end(), 0.0);
    }
  }
  nodes_[out].grad.data[0] = 1.0;
  for (std::size_t id = nodes_.size(); id-- > 0;)
    if (mask[id]) propagate(static_cast<NodeId>(id));
}

namespace {
// Accumulates dOut into a parent that may have been broadcast from a scalar.
void accum_broadcast(Array& parent_grad, const Array& grad, const Array& factor,
                     bool with_factor) {
  if (parent_grad.is_scalar() && grad.size() > 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i)
      s += with_factor ? grad.data[i] * factor.data[i] : grad.data[i];
    parent_grad.data[0] += s;
  } else {
    for (std::size_t i = 0; i < parent_grad.size(); ++i) {
      double f = with_factor ? (factor.is_scalar() ? factor.data[0] : factor.data[i]) : 1.0;
      parent_grad.data[i] += grad.data[i] * f;
    }
  }
}
}  // namespace

void Graph::propagate(NodeId id) {
  Node& n = nodes_[id];
  const Array& g = n.grad;
  switch (n.kind) {
    case OpKind::input:
    case OpKind::parameter:
      return;
    case OpKind::linear: {
      Node& xn = nodes_[n.parents[0]];
      Node& wn = nodes_[n.parents[1]];
      Node& bn = nodes_[n.parents[2]];
      const Array& x = xn.value;
      const Array& w = wn.value;
      std::size_t rows = x.rows(), in = w.shape[0], out_dim = w.shape[1];
      const double* __restrict__ gp = g.data.data();
      const double* __restrict__ xp = x.data.data();
      const double* __restrict__ wp = w.data.data();
      double* __restrict__ dxp = xn.grad.data.data();
      double* __restrict__ dwp = wn.grad.data.data();
      double* __restrict__ dbp = bn.grad.data.data();
      // dX = g W^T as saxpy rows over a transposed scratch, so every inner
      // loop vectorizes without reassociating a reduction.
      thread_local std::vector<double> wt;
      wt.assign(in * out_dim, 0.0);
      for (std::size_t i = 0; i < in; ++i)
        for (std::size_t o = 0; o < out_dim; ++o) wt[o * in + i] = wp[i * out_dim + o];
      for (std::size_t r = 0; r < rows; ++r) {
        const double* __restrict__ gr = gp + r * out_dim;
        double* __restrict__ dxr = dxp + r * in;
        for (std::size_t o = 0; o < out_dim; ++o) {
          double go = gr[o];
          const double* __restrict__ wto = wt.data() + o * in;
          for (std::size_t i = 0; i < in; ++i) dxr[i] += go * wto[i];
        }
        for (std::size_t o = 0; o < out_dim; ++o) dbp[o] += gr[o];
      }
      // dW = X^T g accumulated over row blocks so each dW row stays hot
      // while the block of g is swept.
      constexpr std::size_t kBlock = 64;
      for (std::size_t r0 = 0; r0 < rows; r0 += kBlock) {
        std::size_t r1 = std::min(rows, r0 + kBlock);
        for (std::size_t i = 0; i < in; ++i) {
          double* __restrict__ dwr = dwp + i * out_dim;
          for (std::size_t r = r0; r < r1; ++r) {
            double xv = xp[r * in + i];
            const double* __restrict__ gr = gp + r * out_dim;
            for (std::size_t o = 0; o < out_dim; ++o) dwr[o] += xv * gr[o];
          }
        }
      }
      return;
    }
    case OpKind::relu:
    case OpKind::hinge_pos_part: {
      Node& p = nodes_[n.parents[0]];
      // Subgradient 0 at the kink.
      for (std::size_t i = 0; i < g.size(); ++i)
        if (p.value.data[i] > 0.0) p.grad.data[i] += g.data[i];
      return;
    }
    case OpKind::sigmoid: {
      Node& p = nodes_[n.parents[0]];
      for (std::size_t i = 0; i < g.size(); ++i) {
        double s = n.value.data[i];
        p.grad.data[i] += g.data[i] * s * (1.0 - s);
      }
      return;
    }
    case OpKind::tanh: {
      Node& p = nodes_[n.parents[0]];
      for (std::size_t i = 0; i < g.size(); ++i) {
        double t = n.value.data[i];
        p.grad.data[i] += g.data[i] * (1.0 - t * t);
      }
      return;
    }
    case OpKind::log: {
      Node& p = nodes_[n.parents[0]];
      for (std::size_t i = 0; i < g.size(); ++i)
        p.grad.data[i] += g.data[i] / p.value.data[i];
      return;
    }
    case OpKind::exp: {
      Node& p = nodes_[n.parents[0]];
      for (std::size_t i = 0; i < g.size(); ++i)
        p.grad.data[i] += g.data[i] * n.value.data[i];
      return;
    }
    case OpKind::batchnorm: {
      Node& xn = nodes_[n.parents[0]];
      Node& gn = nodes_[n.parents[1]];
      Node& bn = nodes_[n.parents[2]];
      const Array& x = xn.value;
      std::size_t rows = x.rows(), cols = x.cols();
      double m = static_cast<double>(rows);
      for (std::size_t j = 0; j < cols; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < rows; ++i) mu += x.at(i, j);
        mu /= m;
        double var = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          double d = x.at(i, j) - mu;
          var += d * d;
        }
        var /= m;
        double inv = 1.0 / std::sqrt(var + n.eps);
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          double xh = (x.at(i, j) - mu) * inv;
          sum_g += g.at(i, j);
          sum_gx += g.at(i, j) * xh;
        }
        double gamma = gn.value.data[j];
        for (std::size_t i = 0; i < rows; ++i) {
          double xh = (x.at(i, j) - mu) * inv;
          xn.grad.at(i, j) +=
              gamma * inv / m * (m * g.at(i, j) - sum_g - xh * sum_gx);
        }
        gn.grad.data[j] += sum_gx;
        bn.grad.data[j] += sum_g;
      }
      return;
    }
    case OpKind::add: {
      accum_broadcast(nodes_[n.parents[0]].grad, g, g, false);
      accum_broadcast(nodes_[n.parents[1]].grad, g, g, false);
      return;
    }
    case OpKind::mul: {
      accum_broadcast(nodes_[n.parents[0]].grad, g, nodes_[n.parents[1]].value, true);
      accum_broadcast(nodes_[n.parents[1]].grad, g, nodes_[n.parents[0]].value, true);
      return;
    }
    case OpKind::mean: {
      Node& p = nodes_[n.parents[0]];
      if (n.over_rows) {
        std::size_t rows = p.value.rows(), cols = p.value.cols();
        double inv = 1.0 / static_cast<double>(rows);
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < cols; ++j)
            p.grad.at(i, j) += g.data[j] * inv;
      } else {
        double s = g.data[0] / static_cast<double>(p.value.size());
        for (double& e : p.grad.data) e += s;
      }
      return;
    }
    case OpKind::inner_product: {
      Node& a = nodes_[n.parents[0]];
      Node& b = nodes_[n.parents[1]];
      double s = g.data[0];
      for (std::size_t i = 0; i < a.value.size(); ++i) {
        a.grad.data[i] += s * b.value.data[i];
        b.grad.data[i] += s * a.value.data[i];
      }
      return;
    }
  }
}

Array& Graph::param_value(const std::string& name) {
  return nodes_[params_.find(name).node].value;
}

const Array& Graph::param_value(const std::string& name) const {
  return nodes_[params_.find(name).node].value;
}

const Array& Graph::param_grad(const std::string& name) const {
  return nodes_[params_.find(name).node].grad;
}

std::vector<std::pair<std::string, Array>> Graph::gradients() const {
  std::vector<std::pair<std::string, Array>> out;
  out.reserve(params_.size());
  for (const auto& e : params_.entries())
    out.emplace_back(e.name, nodes_[e.node].grad);
  return out;
}

double grad_check(Graph& graph, NodeId out, double eps) {
  if (eps <= 0) throw std::invalid_argument("grad_check: eps must be positive");
  graph.forward(out);
  graph.backward(out);
  std::vector<std::pair<std::string, Array>> analytic = graph.gradients();
  double worst = 0.0;
  for (const auto& [name, grad] : analytic) {
    Array& p = graph.param_value(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double saved = p.data[i];
      p.data[i] = saved + eps;
      double hi = graph.forward(out).data[0];
      p.data[i] = saved - eps;
      double lo = graph.forward(out).data[0];
      p.data[i] = saved;
      double fd = (hi - lo) / (2.0 * eps);
      double err = std::fabs(grad.data[i] - fd) / (std::fabs(fd) + 1e-12);
      worst = std::max(worst, err);
    }
  }
  graph.forward(out);  // leave values consistent with the unperturbed params
  return worst;
}

// --- MLP construction ----------------------------------------------------

MlpSpec MlpSpec::dense(std::vector<std::size_t> sizes, Activation hidden_act,
                       bool bn_hidden) {
  MlpSpec s;
  s.sizes = std::move(sizes);
  if (s.sizes.size() < 2) throw std::invalid_argument("MlpSpec: need at least one layer");
  std::size_t layers = s.sizes.size() - 1;
  s.activations.assign(layers, hidden_act);
  s.batchnorm.assign(layers, bn_hidden);
  s.activations[layers - 1] = Activation::none;
  s.batchnorm[layers - 1] = false;
  return s;
}

void MlpSpec::validate() const {
  if (sizes.size() < 2) throw std::invalid_argument("MlpSpec: need at least one layer");
  for (std::size_t d : sizes)
    if (d == 0) throw std::invalid_argument("MlpSpec: layer sizes must be positive");
  if (activations.size() != layer_count() || batchnorm.size() != layer_count())
    throw std::invalid_argument("MlpSpec: per-layer tags must match layer count");
}

MlpParams add_mlp_params(Graph& g, const MlpSpec& spec, const std::string& prefix,
                         MlpRole role, RngStream& rng, InitScheme init) {
  spec.validate();
  MlpParams mp;
  mp.spec = spec;
  std::size_t layers = spec.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t fan_in = spec.sizes[l], fan_out = spec.sizes[l + 1];
    Array w({fan_in, fan_out});
    if (init == InitScheme::uniform_glorot) {
      double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (double& e : w.data) e = rng.uniform(-a, a);
    }
    bool final_layer = l + 1 == layers;
    Partition wpart, bpart;
    if (role == MlpRole::generator) {
      wpart = bpart = Partition::theta;
    } else {
      wpart = final_layer ? Partition::w : Partition::zeta;
      bpart = final_layer ? Partition::b : Partition::zeta;
    }
    std::string tag = prefix + "L" + std::to_string(l);
    mp.weights.push_back(g.parameter(tag + ".w", wpart, std::move(w)));
    mp.biases.push_back(g.parameter(tag + ".b", bpart, Array({fan_out}, 0.0)));
    if (spec.batchnorm[l]) {
      Partition p = role == MlpRole::generator ? Partition::theta : Partition::zeta;
      mp.gammas.push_back(g.parameter(tag + ".gamma", p, Array({fan_out}, 1.0)));
      mp.betas.push_back(g.parameter(tag + ".beta", p, Array({fan_out}, 0.0)));
    } else {
      mp.gammas.push_back(-1);
      mp.betas.push_back(-1);
    }
  }
  return mp;
}

MlpApplied apply_mlp(Graph& g, const MlpParams& params, NodeId input) {
  NodeId h = input;
  NodeId features = input;
  std::size_t layers = params.spec.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    if (l + 1 == layers) features = h;
    h = g.linear(h, params.weights[l], params.biases[l]);
    if (params.spec.batchnorm[l])
      h = g.batchnorm(h, params.gammas[l], params.betas[l]);
    switch (params.spec.activations[l]) {
      case Activation::none: break;
      case Activation::relu: h = g.relu(h); break;
      case Activation::sigmoid: h = g.sigmoid(h); break;
      case Activation::tanh: h = g.tanh(h); break;
    }
  }
  return {h, features};
}

BuiltMlp build_mlp(const MlpSpec& spec, std::uint64_t seed, MlpRole role,
                   InitScheme init) {
  BuiltMlp built;
  RngStream rng(seed, role == MlpRole::generator ? rng_streams::kInitGenerator
                                                 : rng_streams::kInitDiscriminator);
  built.input = built.graph.input("x");
  MlpParams params = add_mlp_params(built.graph, spec, "", role, rng, init);
  MlpApplied applied = apply_mlp(built.graph, params, built.input);
  built.output = applied.output;
  built.features = applied.features;
  return built;
}

}  // namespace geomgan
