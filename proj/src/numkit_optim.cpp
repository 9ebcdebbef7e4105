#include "tokencom/numkit/optim.hpp"

#include <cmath>

namespace tokencom::numkit {

void SgdMomentum::step(const std::vector<Tensor>& params) {
  for (const Tensor& p : params) {
    Tensor t = p;
    auto& vel = velocity_[t.node_ptr().get()];
    if (vel.empty()) vel.assign(t.data().size(), 0.0f);
    const auto& g = t.grad();
    auto& w = t.data_mut();
    for (std::size_t i = 0; i < w.size(); ++i) {
      vel[i] = static_cast<float>(momentum_ * vel[i] + g[i]);
      w[i] -= static_cast<float>(lr_ * vel[i]);
    }
  }
}

void Adam::step(const std::vector<Tensor>& params) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (const Tensor& p : params) {
    Tensor t = p;
    auto& st = state_[t.node_ptr().get()];
    if (st.m.empty()) {
      st.m.assign(t.data().size(), 0.0f);
      st.v.assign(t.data().size(), 0.0f);
    }
    const auto& g = t.grad();
    auto& w = t.data_mut();
    for (std::size_t i = 0; i < w.size(); ++i) {
      st.m[i] = static_cast<float>(beta1_ * st.m[i] + (1.0 - beta1_) * g[i]);
      st.v[i] = static_cast<float>(beta2_ * st.v[i] + (1.0 - beta2_) * g[i] * g[i]);
      const double mhat = st.m[i] / bc1;
      const double vhat = st.v[i] / bc2;
      w[i] -= static_cast<float>(lr_ * mhat / (std::sqrt(vhat) + eps_));
    }
  }
}

void zero_grads(const std::vector<Tensor>& params) {
  for (const Tensor& p : params) {
    Tensor t = p;
    t.zero_grad();
  }
}

}  // namespace tokencom::numkit
