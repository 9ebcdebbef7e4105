#include "tokencom/numkit/ops.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace tokencom::numkit {

namespace {

using detail::Node;

Tensor make_op(std::vector<int> shape, std::vector<float> value,
               std::vector<std::shared_ptr<Node>> parents,
               std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  bool rg = false;
  for (const auto& p : parents) rg = rg || p->requires_grad;
  n->requires_grad = rg;
  if (rg) {
    n->grad.assign(n->value.size(), 0.0f);
    n->parents = std::move(parents);
    n->backward = std::move(backward);
  }
  n->id = detail::next_node_id();
  return Tensor::wrap(std::move(n));
}

void set_wide(const Tensor& t, double v) {
  t.node_ptr()->wide = v;
  t.node_ptr()->has_wide = true;
}

double wide_of(const std::shared_ptr<Node>& n) {
  return n->has_wide ? n->wide : static_cast<double>(n->value[0]);
}

bool is_scalar(const Tensor& t) { return t.size() == 1; }

void check_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected rank-2 tensor, got " +
                                shape_str(t.shape()));
  }
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  }
}

// C (+)= op(A) . op(B) with f64 accumulation per output element.
// A is (m x k) after transposition flag, B is (k x n).
void gemm(const float* a, const float* b, float* c, int m, int k, int n, bool ta, bool tb,
          bool accumulate) {
  std::vector<double> acc(static_cast<std::size_t>(m) * n, 0.0);
  if (!ta && !tb) {
    for (int i = 0; i < m; ++i) {
      double* arow = acc.data() + static_cast<std::size_t>(i) * n;
      const float* ai = a + static_cast<std::size_t>(i) * k;
      for (int p = 0; p < k; ++p) {
        const double av = ai[p];
        const float* bp = b + static_cast<std::size_t>(p) * n;
        for (int j = 0; j < n; ++j) arow[j] += av * bp[j];
      }
    }
  } else if (!ta && tb) {
    // B stored (n x k): dots of contiguous rows.
    for (int i = 0; i < m; ++i) {
      const float* ai = a + static_cast<std::size_t>(i) * k;
      double* arow = acc.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        const float* bj = b + static_cast<std::size_t>(j) * k;
        double s = 0.0;
        for (int p = 0; p < k; ++p) s += static_cast<double>(ai[p]) * bj[p];
        arow[j] = s;
      }
    }
  } else if (ta && !tb) {
    // A stored (k x m).
    for (int p = 0; p < k; ++p) {
      const float* ap = a + static_cast<std::size_t>(p) * m;
      const float* bp = b + static_cast<std::size_t>(p) * n;
      for (int i = 0; i < m; ++i) {
        const double av = ap[i];
        double* arow = acc.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) arow[j] += av * bp[j];
      }
    }
  } else {
    // A stored (k x m), B stored (n x k).
    for (int i = 0; i < m; ++i) {
      double* arow = acc.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        const float* bj = b + static_cast<std::size_t>(j) * k;
        double s = 0.0;
        for (int p = 0; p < k; ++p) s += static_cast<double>(a[static_cast<std::size_t>(p) * m + i]) * bj[p];
        arow[j] = s;
      }
    }
  }
  const std::size_t total = static_cast<std::size_t>(m) * n;
  if (accumulate) {
    for (std::size_t i = 0; i < total; ++i) c[i] += static_cast<float>(acc[i]);
  } else {
    for (std::size_t i = 0; i < total; ++i) c[i] = static_cast<float>(acc[i]);
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_rank2(a, "matmul");
  check_rank2(b, "matmul");
  const int m = a.extent(0), k = a.extent(1), k2 = b.extent(0), n = b.extent(1);
  if (k != k2) {
    throw std::invalid_argument("matmul: inner dimensions disagree: " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  }
  std::vector<float> out(static_cast<std::size_t>(m) * n);
  gemm(a.data().data(), b.data().data(), out.data(), m, k, n, false, false, false);
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  return make_op({m, n}, std::move(out), {an, bn}, [an, bn, m, k, n](Node& self) {
    // dA = dC . B^T, dB = A^T . dC
    if (an->requires_grad)
      gemm(self.grad.data(), bn->value.data(), an->grad.data(), m, n, k, false, true, true);
    if (bn->requires_grad)
      gemm(an->value.data(), self.grad.data(), bn->grad.data(), k, m, n, true, false, true);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<float> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  Tensor r = make_op(a.shape(), std::move(out), {an, bn}, [an, bn](Node& self) {
    if (an->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
    if (bn->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] += self.grad[i];
  });
  if (is_scalar(r)) set_wide(r, wide_of(an) + wide_of(bn));
  return r;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<float> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  Tensor r = make_op(a.shape(), std::move(out), {an, bn}, [an, bn](Node& self) {
    if (an->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
    if (bn->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] -= self.grad[i];
  });
  if (is_scalar(r)) set_wide(r, wide_of(an) - wide_of(bn));
  return r;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  std::vector<float> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  Tensor r = make_op(a.shape(), std::move(out), {an, bn}, [an, bn](Node& self) {
    if (an->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i] * bn->value[i];
    if (bn->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] += self.grad[i] * an->value[i];
  });
  if (is_scalar(r)) set_wide(r, wide_of(an) * wide_of(bn));
  return r;
}

Tensor relu(const Tensor& a) {
  std::vector<float> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] > 0.0f ? a.data()[i] : 0.0f;
  auto an = a.node_ptr();
  return make_op(a.shape(), std::move(out), {an}, [an](Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (an->value[i] > 0.0f) an->grad[i] += self.grad[i];
  });
}

Tensor tanh(const Tensor& a) {
  std::vector<float> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a.data()[i]);
  auto an = a.node_ptr();
  return make_op(a.shape(), std::move(out), {an}, [an](Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const float y = self.value[i];
      an->grad[i] += self.grad[i] * (1.0f - y * y);
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  std::vector<float> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(a.data()[i] * s);
  auto an = a.node_ptr();
  Tensor r = make_op(a.shape(), std::move(out), {an}, [an, s](Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      an->grad[i] += static_cast<float>(self.grad[i] * s);
  });
  if (is_scalar(r)) set_wide(r, wide_of(an) * s);
  return r;
}

Tensor add_row_vector(const Tensor& x, const Tensor& bias) {
  check_rank2(x, "add_row_vector");
  if (bias.rank() != 1 || bias.extent(0) != x.extent(1)) {
    throw std::invalid_argument("add_row_vector: bias " + shape_str(bias.shape()) +
                                " does not match rows of " + shape_str(x.shape()));
  }
  const int n = x.extent(0), d = x.extent(1);
  std::vector<float> out(x.data().size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      out[static_cast<std::size_t>(i) * d + j] = x.data()[static_cast<std::size_t>(i) * d + j] + bias.data()[j];
  auto xn = x.node_ptr();
  auto bn = bias.node_ptr();
  return make_op(x.shape(), std::move(out), {xn, bn}, [xn, bn, n, d](Node& self) {
    if (xn->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) xn->grad[i] += self.grad[i];
    if (bn->requires_grad) {
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += self.grad[static_cast<std::size_t>(i) * d + j];
        bn->grad[j] += static_cast<float>(s);
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  check_rank2(a, "transpose");
  const int m = a.extent(0), n = a.extent(1);
  std::vector<float> out(a.data().size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j) * m + i] = a.data()[static_cast<std::size_t>(i) * n + j];
  auto an = a.node_ptr();
  return make_op({n, m}, std::move(out), {an}, [an, m, n](Node& self) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        an->grad[static_cast<std::size_t>(i) * n + j] += self.grad[static_cast<std::size_t>(j) * m + i];
  });
}

Tensor slice_rows(const Tensor& a, int r0, int r1) {
  check_rank2(a, "slice_rows");
  const int m = a.extent(0), n = a.extent(1);
  if (r0 < 0 || r1 < r0 || r1 > m) {
    throw std::invalid_argument("slice_rows: range [" + std::to_string(r0) + "," +
                                std::to_string(r1) + ") out of " + shape_str(a.shape()));
  }
  const int rows = r1 - r0;
  std::vector<float> out(static_cast<std::size_t>(rows) * n);
  std::memcpy(out.data(), a.data().data() + static_cast<std::size_t>(r0) * n,
              out.size() * sizeof(float));
  auto an = a.node_ptr();
  return make_op({rows, n}, std::move(out), {an}, [an, r0, n](Node& self) {
    const std::size_t count = self.grad.size();
    float* dst = an->grad.data() + static_cast<std::size_t>(r0) * n;
    for (std::size_t i = 0; i < count; ++i) dst[i] += self.grad[i];
  });
}

Tensor slice_cols(const Tensor& a, int c0, int c1) {
  check_rank2(a, "slice_cols");
  const int m = a.extent(0), n = a.extent(1);
  if (c0 < 0 || c1 < c0 || c1 > n) {
    throw std::invalid_argument("slice_cols: range [" + std::to_string(c0) + "," +
                                std::to_string(c1) + ") out of " + shape_str(a.shape()));
  }
  const int cols = c1 - c0;
  std::vector<float> out(static_cast<std::size_t>(m) * cols);
  for (int i = 0; i < m; ++i)
    std::memcpy(out.data() + static_cast<std::size_t>(i) * cols,
                a.data().data() + static_cast<std::size_t>(i) * n + c0,
                static_cast<std::size_t>(cols) * sizeof(float));
  auto an = a.node_ptr();
  return make_op({m, cols}, std::move(out), {an}, [an, m, n, c0, cols](Node& self) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < cols; ++j)
        an->grad[static_cast<std::size_t>(i) * n + c0 + j] +=
            self.grad[static_cast<std::size_t>(i) * cols + j];
  });
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  check_rank2(a, "concat_rows");
  check_rank2(b, "concat_rows");
  if (a.extent(1) != b.extent(1)) {
    throw std::invalid_argument("concat_rows: column mismatch " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  }
  const int ma = a.extent(0), mb = b.extent(0), n = a.extent(1);
  std::vector<float> out;
  out.reserve(a.data().size() + b.data().size());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  return make_op({ma + mb, n}, std::move(out), {an, bn}, [an, bn, ma, n](Node& self) {
    const std::size_t split = static_cast<std::size_t>(ma) * n;
    if (an->requires_grad)
      for (std::size_t i = 0; i < split; ++i) an->grad[i] += self.grad[i];
    if (bn->requires_grad)
      for (std::size_t i = split; i < self.grad.size(); ++i) bn->grad[i - split] += self.grad[i];
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  const int m = parts[0].extent(0);
  int total = 0;
  for (const auto& p : parts) {
    check_rank2(p, "concat_cols");
    if (p.extent(0) != m) {
      throw std::invalid_argument("concat_cols: row mismatch " + shape_str(parts[0].shape()) +
                                  " vs " + shape_str(p.shape()));
    }
    total += p.extent(1);
  }
  std::vector<float> out(static_cast<std::size_t>(m) * total);
  std::vector<int> offsets;
  std::vector<std::shared_ptr<Node>> parents;
  int off = 0;
  for (const auto& p : parts) {
    const int w = p.extent(1);
    for (int i = 0; i < m; ++i)
      std::memcpy(out.data() + static_cast<std::size_t>(i) * total + off,
                  p.data().data() + static_cast<std::size_t>(i) * w,
                  static_cast<std::size_t>(w) * sizeof(float));
    offsets.push_back(off);
    parents.push_back(p.node_ptr());
    off += w;
  }
  auto parent_copy = parents;
  return make_op({m, total}, std::move(out), std::move(parents),
                 [parent_copy, offsets, m, total](Node& self) {
                   for (std::size_t pi = 0; pi < parent_copy.size(); ++pi) {
                     Node* p = parent_copy[pi].get();
                     if (!p->requires_grad) continue;
                     const int w = p->shape[1];
                     const int o = offsets[pi];
                     for (int i = 0; i < m; ++i)
                       for (int j = 0; j < w; ++j)
                         p->grad[static_cast<std::size_t>(i) * w + j] +=
                             self.grad[static_cast<std::size_t>(i) * total + o + j];
                   }
                 });
}

Tensor gather_rows(const Tensor& table, std::span<const int> ids) {
  check_rank2(table, "gather_rows");
  const int v = table.extent(0), d = table.extent(1);
  std::vector<int> idx(ids.begin(), ids.end());
  for (int id : idx) {
    if (id < 0 || id >= v) {
      throw std::out_of_range("gather_rows: id " + std::to_string(id) + " out of vocabulary " +
                              std::to_string(v));
    }
  }
  std::vector<float> out(idx.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::memcpy(out.data() + i * d, table.data().data() + static_cast<std::size_t>(idx[i]) * d,
                static_cast<std::size_t>(d) * sizeof(float));
  auto tn = table.node_ptr();
  return make_op({static_cast<int>(idx.size()), d}, std::move(out), {tn},
                 [tn, idx, d](Node& self) {
                   for (std::size_t i = 0; i < idx.size(); ++i)
                     for (int j = 0; j < d; ++j)
                       tn->grad[static_cast<std::size_t>(idx[i]) * d + j] +=
                           self.grad[i * static_cast<std::size_t>(d) + j];
                 });
}

Tensor gather_cols(const Tensor& a, std::span<const int> cols) {
  check_rank2(a, "gather_cols");
  const int m = a.extent(0), n = a.extent(1);
  std::vector<int> idx(cols.begin(), cols.end());
  for (int c : idx) {
    if (c < 0 || c >= n) {
      throw std::out_of_range("gather_cols: column " + std::to_string(c) + " out of " +
                              shape_str(a.shape()));
    }
  }
  const int w = static_cast<int>(idx.size());
  std::vector<float> out(static_cast<std::size_t>(m) * w);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < w; ++j)
      out[static_cast<std::size_t>(i) * w + j] = a.data()[static_cast<std::size_t>(i) * n + idx[j]];
  auto an = a.node_ptr();
  return make_op({m, w}, std::move(out), {an}, [an, idx, m, n, w](Node& self) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < w; ++j)
        an->grad[static_cast<std::size_t>(i) * n + idx[j]] +=
            self.grad[static_cast<std::size_t>(i) * w + j];
  });
}

Tensor causal_softmax(const Tensor& scores) {
  check_rank2(scores, "causal_softmax");
  const int s = scores.extent(0);
  if (scores.extent(1) != s) {
    throw std::invalid_argument("causal_softmax: expected square scores, got " +
                                shape_str(scores.shape()));
  }
  std::vector<float> out(scores.data().size(), 0.0f);
  for (int i = 0; i < s; ++i) {
    const float* row = scores.data().data() + static_cast<std::size_t>(i) * s;
    double mx = row[0];
    for (int j = 1; j <= i; ++j) mx = std::max(mx, static_cast<double>(row[j]));
    double se = 0.0;
    for (int j = 0; j <= i; ++j) se += std::exp(static_cast<double>(row[j]) - mx);
    for (int j = 0; j <= i; ++j)
      out[static_cast<std::size_t>(i) * s + j] =
          static_cast<float>(std::exp(static_cast<double>(row[j]) - mx) / se);
  }
  auto an = scores.node_ptr();
  return make_op(scores.shape(), std::move(out), {an}, [an, s](Node& self) {
    for (int i = 0; i < s; ++i) {
      const float* p = self.value.data() + static_cast<std::size_t>(i) * s;
      const float* dp = self.grad.data() + static_cast<std::size_t>(i) * s;
      double dot = 0.0;
      for (int j = 0; j <= i; ++j) dot += static_cast<double>(dp[j]) * p[j];
      float* ds = an->grad.data() + static_cast<std::size_t>(i) * s;
      for (int j = 0; j <= i; ++j)
        ds[j] += static_cast<float>(p[j] * (static_cast<double>(dp[j]) - dot));
    }
  });
}

Tensor rmsnorm_rows(const Tensor& x, double eps) {
  check_rank2(x, "rmsnorm_rows");
  const int n = x.extent(0), d = x.extent(1);
  std::vector<float> out(x.data().size());
  auto rinv = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const float* row = x.data().data() + static_cast<std::size_t>(i) * d;
    double ms = 0.0;
    for (int j = 0; j < d; ++j) ms += static_cast<double>(row[j]) * row[j];
    ms /= d;
    const double r = 1.0 / std::sqrt(ms + eps);
    (*rinv)[i] = r;
    for (int j = 0; j < d; ++j)
      out[static_cast<std::size_t>(i) * d + j] = static_cast<float>(row[j] * r);
  }
  auto xn = x.node_ptr();
  return make_op(x.shape(), std::move(out), {xn}, [xn, rinv, n, d](Node& self) {
    for (int i = 0; i < n; ++i) {
      const float* xr = xn->value.data() + static_cast<std::size_t>(i) * d;
      const float* dy = self.grad.data() + static_cast<std::size_t>(i) * d;
      const double r = (*rinv)[i];
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += static_cast<double>(dy[j]) * xr[j];
      const double coef = r * r * r * dot / d;
      float* dx = xn->grad.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < d; ++j) dx[j] += static_cast<float>(r * dy[j] - coef * xr[j]);
    }
  });
}

Tensor softmax_ce_loss(const Tensor& logits, std::span<const int> targets) {
  check_rank2(logits, "softmax_ce_loss");
  const int n = logits.extent(0), v = logits.extent(1);
  if (static_cast<int>(targets.size()) != n) {
    throw std::invalid_argument("softmax_ce_loss: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(n) + " rows");
  }
  std::vector<int> tgt(targets.begin(), targets.end());
  for (int t : tgt) {
    if (t < 0 || t >= v) {
      throw std::out_of_range("softmax_ce_loss: target " + std::to_string(t) +
                              " out of vocabulary " + std::to_string(v));
    }
  }
  auto probs = std::make_shared<std::vector<float>>(logits.data().size());
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const float* row = logits.data().data() + static_cast<std::size_t>(i) * v;
    double mx = row[0];
    for (int j = 1; j < v; ++j) mx = std::max(mx, static_cast<double>(row[j]));
    double se = 0.0;
    for (int j = 0; j < v; ++j) se += std::exp(static_cast<double>(row[j]) - mx);
    for (int j = 0; j < v; ++j)
      (*probs)[static_cast<std::size_t>(i) * v + j] =
          static_cast<float>(std::exp(static_cast<double>(row[j]) - mx) / se);
    loss += std::log(se) - (static_cast<double>(row[tgt[i]]) - mx);
  }
  loss /= n;
  auto ln = logits.node_ptr();
  Tensor r = make_op({1}, {static_cast<float>(loss)}, {ln}, [ln, probs, tgt, n, v](Node& self) {
    const float g = self.grad[0] / static_cast<float>(n);
    for (int i = 0; i < n; ++i) {
      float* dl = ln->grad.data() + static_cast<std::size_t>(i) * v;
      const float* p = probs->data() + static_cast<std::size_t>(i) * v;
      for (int j = 0; j < v; ++j) dl[j] += g * p[j];
      dl[tgt[i]] -= g;
    }
  });
  set_wide(r, loss);
  return r;
}

Tensor mse_loss(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mse_loss");
  const std::size_t count = a.data().size();
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = static_cast<double>(a.data()[i]) - b.data()[i];
    s += d * d;
  }
  s /= static_cast<double>(count);
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  Tensor r = make_op({1}, {static_cast<float>(s)}, {an, bn}, [an, bn, count](Node& self) {
    const float g = self.grad[0] * 2.0f / static_cast<float>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const float d = an->value[i] - bn->value[i];
      if (an->requires_grad) an->grad[i] += g * d;
      if (bn->requires_grad) bn->grad[i] -= g * d;
    }
  });
  set_wide(r, s);
  return r;
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (float v : a.data()) s += v;
  auto an = a.node_ptr();
  Tensor r = make_op({1}, {static_cast<float>(s)}, {an}, [an](Node& self) {
    const float g = self.grad[0];
    for (std::size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += g;
  });
  set_wide(r, s);
  return r;
}

Tensor replace_values(const Tensor& src, std::span<const float> values) {
  if (static_cast<std::int64_t>(values.size()) != src.size()) {
    throw std::invalid_argument("replace_values: " + std::to_string(values.size()) +
                                " values for tensor " + shape_str(src.shape()));
  }
  std::vector<float> out(values.begin(), values.end());
  auto sn = src.node_ptr();
  return make_op(src.shape(), std::move(out), {sn}, [sn](Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) sn->grad[i] += self.grad[i];
  });
}

int argmax(std::span<const float> v) {
  if (v.empty()) throw std::invalid_argument("argmax: empty span");
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace tokencom::numkit
