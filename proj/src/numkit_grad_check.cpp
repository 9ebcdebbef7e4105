#include "tokencom/numkit/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace tokencom::numkit {

double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("grad_check: eps must be positive");

  Tensor xg = Tensor::from_data(x.shape(), x.data(), /*requires_grad=*/true);
  Tensor y = f(xg);
  if (y.size() != 1) {
    throw std::invalid_argument("grad_check: f must be scalar-valued, got " +
                                shape_str(y.shape()));
  }
  if (!y.requires_grad()) {
    throw std::invalid_argument("grad_check: f(x) does not depend on x");
  }
  backward(y);
  const std::vector<float> analytic = xg.grad();

  std::vector<float> probe = x.data();
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const float orig = probe[i];
    const float plus = static_cast<float>(orig + eps);
    const float minus = static_cast<float>(orig - eps);
    probe[i] = plus;
    const double up = f(Tensor::from_data(x.shape(), probe)).item_f64();
    probe[i] = minus;
    const double dn = f(Tensor::from_data(x.shape(), probe)).item_f64();
    probe[i] = orig;
    // Divide by the step as realized after f32 rounding of the probes.
    const double h = static_cast<double>(plus) - static_cast<double>(minus);
    const double cd = (up - dn) / h;
    const double a = analytic[i];
    const double denom = std::max({std::fabs(a), std::fabs(cd), 1e-8});
    worst = std::max(worst, std::fabs(a - cd) / denom);
  }
  return worst;
}

}  // namespace tokencom::numkit
