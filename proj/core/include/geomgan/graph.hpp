#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geomgan/array.hpp"
#include "geomgan/rng.hpp"

namespace geomgan {

// Reverse-mode automatic differentiation over dense real arrays, just enough
// to express feature-map discriminators D(x) = <w, phi(x)> + b and small
// fully-connected generators, with exact gradients for every parameter.

enum class OpKind {
  input,
  parameter,
  linear,
  relu,
  sigmoid,
  tanh,
  log,
  exp,
  batchnorm,
  add,
  mul,
  mean,
  hinge_pos_part,
  inner_product,
};

// Parameter partitions: w/b form the final linear layer of a discriminator,
// zeta the feature-map trunk, theta the generator.
enum class Partition { w, b, zeta, theta };

const char* partition_name(Partition p);

using NodeId = std::int32_t;

struct Node {
  OpKind kind;
  std::vector<NodeId> parents;
  Array value;
  Array grad;
  std::string name;        // inputs and parameters only
  double eps = 0.0;        // batchnorm
  bool over_rows = false;  // mean: reduce the batch axis only
  bool bound = false;      // inputs: value available
  Partition partition = Partition::zeta;
};

struct ParamEntry {
  std::string name;
  NodeId node;
  Partition partition;
};

// Named, partition-labelled registry of trainable arrays. Entries keep
// insertion order so optimizer traversal is deterministic.
class ParamSet {
 public:
  void add(ParamEntry e);
  const ParamEntry& find(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<ParamEntry>& entries() const { return entries_; }
  std::vector<ParamEntry> in_partition(Partition p) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<ParamEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Graph {
 public:
  // Node construction. Nodes are appended in topological order; a node may
  // only reference earlier nodes, so the graph is acyclic by construction.
  NodeId input(std::string name);
  NodeId constant(Array value);
  NodeId parameter(std::string name, Partition partition, Array init);
  NodeId linear(NodeId x, NodeId w, NodeId b);
  NodeId relu(NodeId x);
  NodeId sigmoid(NodeId x);
  NodeId tanh(NodeId x);
  NodeId log(NodeId x);
  NodeId exp(NodeId x);
  NodeId batchnorm(NodeId x, NodeId gamma, NodeId beta, double eps = 1e-5);
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId mean(NodeId x);       // scalar mean over all entries
  NodeId mean_rows(NodeId x);  // per-column mean over the batch axis
  NodeId hinge_pos_part(NodeId x);
  NodeId inner_product(NodeId a, NodeId b);

  // Composites over the primitive ops.
  NodeId scale(NodeId x, double c) { return mul(x, constant(Array::scalar(c))); }
  NodeId add_const(NodeId x, double c) { return add(x, constant(Array::scalar(c))); }
  NodeId sub(NodeId a, NodeId b) { return add(a, scale(b, -1.0)); }
  NodeId abs(NodeId x);       // [x]+ + [-x]+
  NodeId softplus(NodeId x);  // [x]+ + log(1 + exp(-|x|)), stable for large |x|

  // Evaluation. forward() recomputes every ancestor of `out` using the
  // current input bindings and parameter values; backward() then fills
  // gradients by exact reverse-mode accumulation from a scalar output.
  void bind(const std::string& input_name, Array value);
  const Array& forward(NodeId out);
  void backward(NodeId out);

  const Array& value(NodeId id) const { return nodes_[id].value; }
  const Array& grad(NodeId id) const { return nodes_[id].grad; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  std::size_t node_count() const { return nodes_.size(); }

  Array& param_value(const std::string& name);
  const Array& param_value(const std::string& name) const;
  const Array& param_grad(const std::string& name) const;
  const ParamSet& params() const { return params_; }

  // Gradient of the last backward pass for every parameter, in registry order.
  std::vector<std::pair<std::string, Array>> gradients() const;

 private:
  NodeId push(Node n);
  void check_id(NodeId id) const;
  void eval(NodeId id);
  void propagate(NodeId id);
  const std::vector<char>& required_mask(NodeId out);

  std::vector<Node> nodes_;
  ParamSet params_;
  std::unordered_map<std::string, NodeId> input_ids_;
  std::unordered_map<NodeId, std::vector<char>> required_cache_;
  NodeId last_forward_ = -1;
};

// Max over parameters of |autodiff - central difference| / (|central| + 1e-12),
// with the central difference taken at +-eps per parameter entry.
double grad_check(Graph& graph, NodeId out, double eps);

// --- Fully-connected network construction -------------------------------

enum class Activation { none, relu, sigmoid, tanh };

struct MlpSpec {
  std::vector<std::size_t> sizes;        // [in, h1, ..., out]
  std::vector<Activation> activations;   // one per layer
  std::vector<bool> batchnorm;           // one per layer

  // Hidden layers get (hidden_act, bn_hidden); the final layer is affine.
  static MlpSpec dense(std::vector<std::size_t> sizes,
                       Activation hidden_act = Activation::relu,
                       bool bn_hidden = false);
  std::size_t layer_count() const { return sizes.empty() ? 0 : sizes.size() - 1; }
  void validate() const;
};

enum class MlpRole { discriminator, generator };
enum class InitScheme { uniform_glorot, zeros };

// Parameter nodes of one network; apply_mlp wires the computation on any
// input node, so one parameter set can score several minibatches.
struct MlpParams {
  MlpSpec spec;
  std::vector<NodeId> weights;
  std::vector<NodeId> biases;
  std::vector<NodeId> gammas;  // -1 where the layer has no batchnorm
  std::vector<NodeId> betas;
};

struct MlpApplied {
  NodeId output;
  NodeId features;  // input of the final layer (the feature map output)
};

MlpParams add_mlp_params(Graph& g, const MlpSpec& spec, const std::string& prefix,
                         MlpRole role, RngStream& rng,
                         InitScheme init = InitScheme::uniform_glorot);

MlpApplied apply_mlp(Graph& g, const MlpParams& params, NodeId input);

// Convenience for a standalone network with one input named "x".
struct BuiltMlp {
  Graph graph;
  NodeId input;
  NodeId output;
  NodeId features;
};

BuiltMlp build_mlp(const MlpSpec& spec, std::uint64_t seed,
                   MlpRole role = MlpRole::discriminator,
                   InitScheme init = InitScheme::uniform_glorot);

}  // namespace geomgan
