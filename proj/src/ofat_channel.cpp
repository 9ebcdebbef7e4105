#include "tokencom/ofat/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tokencom/numkit/ops.hpp"

namespace tokencom::ofat {

using numkit::Tensor;

void ChannelConfig::validate() const {
  if (a_t < 1 || a_r < 1 || k_c < 1) {
    throw std::invalid_argument("channel: antenna/subcarrier extents must be >= 1");
  }
}

double ChannelState::noise_sigma() const {
  return std::sqrt(std::pow(10.0, -snr_db / 10.0));
}

ChannelState ChannelState::random(const ChannelConfig& cfg, numkit::RngStream& rng,
                                  std::uint64_t seed_tag) {
  cfg.validate();
  std::vector<float> gains(static_cast<std::size_t>(cfg.a_t) * cfg.a_r * cfg.k_c);
  for (auto& g : gains) g = static_cast<float>(rng.normal());
  ChannelState ch;
  ch.h = Tensor::from_data({cfg.a_t, cfg.a_r, cfg.k_c}, std::move(gains));
  ch.snr_db = cfg.snr_db;
  ch.seed = seed_tag;
  return ch;
}

ModulateResult modulate(const Tensor& coded, int a_t, int k_c) {
  if (coded.rank() != 2 || coded.size() < 1) {
    throw std::invalid_argument("modulate: expected a non-empty rank-2 token matrix, got " +
                                numkit::shape_str(coded.shape()));
  }
  if (a_t < 1 || k_c < 1) throw std::invalid_argument("modulate: bad grid extents");
  const std::size_t n = coded.data().size();
  double mean_sq = 0.0;
  for (float v : coded.data()) mean_sq += static_cast<double>(v) * v;
  mean_sq /= static_cast<double>(n);
  const double power_scale = mean_sq > 0.0 ? std::sqrt(mean_sq) : 1.0;

  const int per_symbol = k_c * a_t;
  const int symbols = static_cast<int>((n + per_symbol - 1) / per_symbol);
  std::vector<float> grid(static_cast<std::size_t>(symbols) * per_symbol, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = static_cast<float>(coded.data()[i] / power_scale);
  }
  ModulateResult out;
  out.grid.values = Tensor::from_data({symbols, k_c, a_t}, std::move(grid));
  out.grid.pad_len = symbols * per_symbol - static_cast<int>(n);
  out.power_scale = power_scale;
  return out;
}

Tensor transmit(const SymbolGrid& grid, const ChannelState& ch, numkit::RngStream& rng) {
  const auto& gs = grid.values.shape();
  if (gs.size() != 3 || gs[1] != ch.k_c() || gs[2] != ch.a_t()) {
    throw std::invalid_argument("transmit: grid " + numkit::shape_str(gs) +
                                " does not match channel " + numkit::shape_str(ch.h.shape()));
  }
  const int symbols = gs[0], k_c = gs[1], a_t = gs[2], a_r = ch.a_r();
  const double sigma = ch.noise_sigma();
  const float* x = grid.values.data().data();
  const float* h = ch.h.data().data();
  std::vector<float> y(static_cast<std::size_t>(symbols) * k_c * a_r);
  for (int s = 0; s < symbols; ++s) {
    for (int f = 0; f < k_c; ++f) {
      const float* xs = x + (static_cast<std::size_t>(s) * k_c + f) * a_t;
      for (int m = 0; m < a_r; ++m) {
        double acc = 0.0;
        for (int k = 0; k < a_t; ++k) {
          acc += static_cast<double>(h[(static_cast<std::size_t>(k) * a_r + m) * k_c + f]) * xs[k];
        }
        if (sigma > 0.0) acc += sigma * rng.normal();
        y[(static_cast<std::size_t>(s) * k_c + f) * a_r + m] = static_cast<float>(acc);
      }
    }
  }
  return Tensor::from_data({symbols, k_c, a_r}, std::move(y));
}

namespace {

// Solves M x = b for symmetric positive semi-definite M via Cholesky.
// Returns false when M is numerically rank deficient.
bool cholesky_solve(std::vector<double>& m, std::vector<double>& b, int n) {
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += m[static_cast<std::size_t>(i) * n + i];
  const double tol = std::max(trace, 1.0) * 1e-12;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m[static_cast<std::size_t>(i) * n + j];
      for (int p = 0; p < j; ++p)
        s -= m[static_cast<std::size_t>(i) * n + p] * m[static_cast<std::size_t>(j) * n + p];
      if (i == j) {
        if (s <= tol) return false;
        m[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
      } else {
        m[static_cast<std::size_t>(i) * n + j] = s / m[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int p = 0; p < i; ++p) s -= m[static_cast<std::size_t>(i) * n + p] * b[p];
    b[static_cast<std::size_t>(i)] = s / m[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int p = i + 1; p < n; ++p) s -= m[static_cast<std::size_t>(p) * n + i] * b[p];
    b[static_cast<std::size_t>(i)] = s / m[static_cast<std::size_t>(i) * n + i];
  }
  return true;
}

}  // namespace

RecoverResult recover(const Tensor& received, const ChannelState& ch, int k, int l_t,
                      double power_scale) {
  const auto& ys = received.shape();
  if (ys.size() != 3 || ys[1] != ch.k_c() || ys[2] != ch.a_r()) {
    throw std::invalid_argument("recover: received " + numkit::shape_str(ys) +
                                " does not match channel " + numkit::shape_str(ch.h.shape()));
  }
  if (k < 1 || l_t < 1) throw std::invalid_argument("recover: bad token shape");
  const int symbols = ys[0], k_c = ys[1], a_r = ys[2], a_t = ch.a_t();
  const std::size_t n = static_cast<std::size_t>(k) * l_t;
  if (n > static_cast<std::size_t>(symbols) * k_c * a_t) {
    throw std::invalid_argument("recover: grid too small for " + std::to_string(k) + "x" +
                                std::to_string(l_t) + " tokens");
  }
  const float* h = ch.h.data().data();
  const float* y = received.data().data();

  // Per subcarrier: normal equations M = G G^T (a_t x a_t), G[k][m] = H[k,m,f].
  // Rank-deficient or underdetermined subcarriers get a Tikhonov term.
  bool ridge_used = false;
  std::vector<double> m_base(static_cast<std::size_t>(a_t) * a_t);
  std::vector<std::vector<double>> chol_per_f(static_cast<std::size_t>(k_c));
  std::vector<bool> ridge_per_f(static_cast<std::size_t>(k_c), false);
  constexpr double kRidgeLambda = 1e-3;
  for (int f = 0; f < k_c; ++f) {
    for (int i = 0; i < a_t; ++i) {
      for (int j = 0; j < a_t; ++j) {
        double s = 0.0;
        for (int m = 0; m < a_r; ++m) {
          s += static_cast<double>(h[(static_cast<std::size_t>(i) * a_r + m) * k_c + f]) *
               h[(static_cast<std::size_t>(j) * a_r + m) * k_c + f];
        }
        m_base[static_cast<std::size_t>(i) * a_t + j] = s;
      }
    }
    bool needs_ridge = a_r < a_t;
    if (!needs_ridge) {
      std::vector<double> probe = m_base;
      std::vector<double> zero(static_cast<std::size_t>(a_t), 0.0);
      needs_ridge = !cholesky_solve(probe, zero, a_t);
    }
    if (needs_ridge) {
      ridge_used = true;
      ridge_per_f[static_cast<std::size_t>(f)] = true;
      for (int i = 0; i < a_t; ++i) m_base[static_cast<std::size_t>(i) * a_t + i] += kRidgeLambda;
    }
    chol_per_f[static_cast<std::size_t>(f)] = m_base;
  }

  std::vector<float> flat(n);
  std::vector<double> rhs(static_cast<std::size_t>(a_t));
  for (int s = 0; s < symbols; ++s) {
    for (int f = 0; f < k_c; ++f) {
      const std::size_t base = (static_cast<std::size_t>(s) * k_c + f) * a_t;
      if (base >= n) break;
      const float* yr = y + (static_cast<std::size_t>(s) * k_c + f) * a_r;
      for (int i = 0; i < a_t; ++i) {
        double acc = 0.0;
        for (int m = 0; m < a_r; ++m) {
          acc += static_cast<double>(h[(static_cast<std::size_t>(i) * a_r + m) * k_c + f]) * yr[m];
        }
        rhs[static_cast<std::size_t>(i)] = acc;
      }
      std::vector<double> chol = chol_per_f[static_cast<std::size_t>(f)];
      if (!cholesky_solve(chol, rhs, a_t)) {
        // Ridge-augmented matrix is positive definite; this cannot happen.
        throw std::runtime_error("recover: factorization failed");
      }
      for (int i = 0; i < a_t && base + static_cast<std::size_t>(i) < n; ++i) {
        flat[base + static_cast<std::size_t>(i)] =
            static_cast<float>(rhs[static_cast<std::size_t>(i)] * power_scale);
      }
    }
  }
  RecoverResult out;
  out.tokens = Tensor::from_data({k, l_t}, std::move(flat));
  out.ridge_fallback = ridge_used;
  return out;
}

Tensor straight_through(const Tensor& coded, const Tensor& received_tokens) {
  if (coded.shape() != received_tokens.shape()) {
    throw std::invalid_argument("straight_through: shape mismatch " +
                                numkit::shape_str(coded.shape()) + " vs " +
                                numkit::shape_str(received_tokens.shape()));
  }
  return numkit::replace_values(coded, received_tokens.data());
}

}  // namespace tokencom::ofat
