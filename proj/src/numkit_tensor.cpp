#include "tokencom/numkit/tensor.hpp"

#include <atomic>
#include <stdexcept>
#include <unordered_set>

namespace tokencom::numkit {

namespace detail {

std::uint64_t next_node_id() {
  static std::atomic<std::uint64_t> counter{0};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace detail

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  s += ")";
  return s;
}

std::int64_t numel(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("negative extent in shape " + shape_str(shape));
    n *= d;
  }
  return n;
}

detail::Node& Tensor::node() const {
  if (!node_) throw std::logic_error("use of undefined Tensor");
  return *node_;
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  return constant(std::move(shape), 0.0f, requires_grad);
}

Tensor Tensor::constant(std::vector<int> shape, float v, bool requires_grad) {
  auto n = std::make_shared<detail::Node>();
  const std::int64_t count = numel(shape);
  n->shape = std::move(shape);
  n->value.assign(static_cast<std::size_t>(count), v);
  n->requires_grad = requires_grad;
  if (requires_grad) n->grad.assign(n->value.size(), 0.0f);
  n->id = detail::next_node_id();
  return wrap(std::move(n));
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<float> data, bool requires_grad) {
  if (numel(shape) != static_cast<std::int64_t>(data.size())) {
    throw std::invalid_argument("data length " + std::to_string(data.size()) +
                                " does not match shape " + shape_str(shape));
  }
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  if (requires_grad) n->grad.assign(n->value.size(), 0.0f);
  n->id = detail::next_node_id();
  return wrap(std::move(n));
}

Tensor Tensor::scalar(float v, bool requires_grad) {
  return from_data({1}, {v}, requires_grad);
}

void Tensor::set_requires_grad(bool rg) {
  auto& n = node();
  n.requires_grad = rg;
  if (rg) {
    n.grad.assign(n.value.size(), 0.0f);
  } else {
    n.grad.clear();
    n.grad.shrink_to_fit();
  }
}

const std::vector<float>& Tensor::grad() const {
  const auto& n = node();
  if (!n.requires_grad) throw std::logic_error("grad() on tensor without requires_grad");
  return n.grad;
}

void Tensor::zero_grad() {
  auto& n = node();
  if (n.requires_grad) n.grad.assign(n.value.size(), 0.0f);
}

float Tensor::item() const {
  const auto& n = node();
  if (n.value.size() != 1) {
    throw std::logic_error("item() on non-scalar tensor " + shape_str(n.shape));
  }
  return n.value[0];
}

double Tensor::item_f64() const {
  const auto& n = node();
  if (n.value.size() != 1) {
    throw std::logic_error("item_f64() on non-scalar tensor " + shape_str(n.shape));
  }
  return n.has_wide ? n.wide : static_cast<double>(n.value[0]);
}

float Tensor::at(int r, int c) const {
  const auto& n = node();
  if (n.shape.size() != 2) throw std::logic_error("at(r,c) on tensor " + shape_str(n.shape));
  return n.value[static_cast<std::size_t>(r) * n.shape[1] + c];
}

Tape::Tape(const Tensor& root) : root_(root.node_ptr()) {
  if (!root_) throw std::logic_error("Tape over undefined tensor");
  if (!root_->requires_grad) return;  // nothing to do

  // Iterative post-order DFS; only grad-requiring nodes enter the tape.
  std::unordered_set<const detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root_.get(), 0);
  visited.insert(root_.get());
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < node->parents.size()) {
      detail::Node* p = node->parents[next_child++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order_.push_back(node);
      stack.pop_back();
    }
  }
}

void Tape::backward() {
  if (order_.empty()) return;
  detail::Node* root = order_.back();
  if (root->value.size() != 1) {
    throw std::logic_error("backward() root must be scalar, got " + shape_str(root->shape));
  }
  root->grad.assign(1, 1.0f);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backward) n->backward(*n);
  }
}

bool Tape::topologically_ordered() const {
  std::unordered_set<const detail::Node*> seen;
  for (const detail::Node* n : order_) {
    for (const auto& p : n->parents) {
      if (p->requires_grad && !seen.count(p.get())) return false;
    }
    seen.insert(n);
  }
  return true;
}

void backward(const Tensor& root) {
  Tape tape(root);
  tape.backward();
}

}  // namespace tokencom::numkit
