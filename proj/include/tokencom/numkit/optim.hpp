#pragma once

#include <unordered_map>
#include <vector>

#include "tokencom/numkit/tensor.hpp"

namespace tokencom::numkit {

// Plain gradient descent with heavy-ball momentum:
//   v <- momentum * v + g;  w <- w - lr * v
class SgdMomentum {
 public:
  explicit SgdMomentum(double lr, double momentum = 0.9) : lr_(lr), momentum_(momentum) {}

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

  void step(const std::vector<Tensor>& params);

 private:
  double lr_;
  double momentum_;
  std::unordered_map<const void*, std::vector<float>> velocity_;
};

// Adam with bias correction; optimizer state lives only in memory, never in
// checkpoints.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

  void step(const std::vector<Tensor>& params);

 private:
  struct State {
    std::vector<float> m;
    std::vector<float> v;
  };
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  std::int64_t t_ = 0;
  std::unordered_map<const void*, State> state_;
};

void zero_grads(const std::vector<Tensor>& params);

}  // namespace tokencom::numkit
