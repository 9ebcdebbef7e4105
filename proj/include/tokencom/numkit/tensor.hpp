#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tokencom::numkit {

namespace detail {

struct Node {
  std::vector<int> shape;
  std::vector<float> value;
  std::vector<float> grad;  // allocated iff requires_grad
  bool requires_grad = false;
  std::uint64_t id = 0;  // creation order; parents always have smaller ids
  std::vector<std::shared_ptr<Node>> parents;
  // Accumulates this node's grad into its parents' grads. Empty for leaves
  // and for nodes created on a no-grad path.
  std::function<void(Node&)> backward;
  // Scalar reductions keep their f64 accumulator alongside the rounded f32
  // value; scalar arithmetic propagates it. Finite-difference checks read
  // this so the check resolution is not limited by f32 loss storage.
  double wide = 0.0;
  bool has_wide = false;
};

std::uint64_t next_node_id();

}  // namespace detail

std::string shape_str(const std::vector<int>& shape);
std::int64_t numel(const std::vector<int>& shape);

// Dense row-major f32 tensor participating in a define-by-run reverse-mode
// graph. Values are immutable once produced by an op; leaves may be mutated
// in place between steps (optimizer updates).
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor constant(std::vector<int> shape, float v, bool requires_grad = false);
  static Tensor from_data(std::vector<int> shape, std::vector<float> data,
                          bool requires_grad = false);
  static Tensor scalar(float v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node().shape; }
  int rank() const { return static_cast<int>(node().shape.size()); }
  int extent(int dim) const { return node().shape.at(static_cast<std::size_t>(dim)); }
  std::int64_t size() const { return static_cast<std::int64_t>(node().value.size()); }

  const std::vector<float>& data() const { return node().value; }
  std::vector<float>& data_mut() { return node().value; }

  bool requires_grad() const { return node().requires_grad; }
  void set_requires_grad(bool rg);
  const std::vector<float>& grad() const;
  void zero_grad();

  float item() const;
  // Scalar value at f64 reduction precision when the node carries one.
  double item_f64() const;
  float at(int r, int c) const;  // rank-2 convenience

  std::uint64_t id() const { return node().id; }

  // Internal: used by ops and the tape.
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }
  static Tensor wrap(std::shared_ptr<detail::Node> n) {
    Tensor t;
    t.node_ = std::move(n);
    return t;
  }

 private:
  detail::Node& node() const;
  std::shared_ptr<detail::Node> node_;
};

// Reverse-mode tape for one backward pass. Built from the root by a
// topological walk of the recorded graph (restricted to grad-requiring
// nodes); backward() seeds the root with 1 and applies each node's rule
// exactly once, in reverse topological order. Rebuilt per forward pass.
class Tape {
 public:
  explicit Tape(const Tensor& root);
  void backward();

  std::size_t num_nodes() const { return order_.size(); }
  // True when every node's parents appear before it in the tape order.
  bool topologically_ordered() const;

 private:
  std::shared_ptr<detail::Node> root_;
  std::vector<detail::Node*> order_;  // inputs first
};

// Convenience: build a tape from `root` and run backward once.
void backward(const Tensor& root);

}  // namespace tokencom::numkit
