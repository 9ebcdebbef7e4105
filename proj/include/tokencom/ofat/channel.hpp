#pragma once

#include <cstdint>

#include "tokencom/numkit/rng.hpp"
#include "tokencom/numkit/tensor.hpp"

namespace tokencom::ofat {

struct ChannelConfig {
  int a_t = 2;   // transmit antennas
  int a_r = 2;   // receive antennas
  int k_c = 8;   // subcarriers
  double snr_db = 15.0;
  void validate() const;
};

// One transmission episode: real per-subcarrier MIMO gains plus the SNR.
// SNR is referenced to unit transmit power per element (modulate normalizes
// the payload), so noise variance is 10^(-snr_db/10).
struct ChannelState {
  numkit::Tensor h;  // a_t x a_r x k_c, constant
  double snr_db = 15.0;
  std::uint64_t seed = 0;  // stream the gains were drawn from, for bookkeeping

  int a_t() const { return h.extent(0); }
  int a_r() const { return h.extent(1); }
  int k_c() const { return h.extent(2); }
  double noise_sigma() const;

  // Per-subcarrier a_t x a_r slices drawn i.i.d. N(0,1).
  static ChannelState random(const ChannelConfig& cfg, numkit::RngStream& rng,
                             std::uint64_t seed_tag = 0);
};

struct SymbolGrid {
  numkit::Tensor values;  // symbols x k_c x a_t, constant
  int pad_len = 0;

  int symbols() const { return values.extent(0); }
};

struct ModulateResult {
  SymbolGrid grid;
  double power_scale = 1.0;  // sqrt(mean square) of the payload; 1 when all-zero
};

// Flattens the coded tokens row-major, normalizes to unit average power, and
// fills the grid in (symbol, subcarrier, antenna) order with a zero-padded
// tail. Each symbol period carries exactly k_c * a_t payload elements.
ModulateResult modulate(const numkit::Tensor& coded, int a_t, int k_c);

// Y[s,f,m] = sum_k H[k,m,f] * X[s,f,k] + n,  n ~ N(0, sigma^2).
numkit::Tensor transmit(const SymbolGrid& grid, const ChannelState& ch, numkit::RngStream& rng);

struct RecoverResult {
  numkit::Tensor tokens;  // k x l_t
  bool ridge_fallback = false;
};

// Per (symbol, subcarrier) least squares for the a_t transmitted values;
// falls back to a ridge solution (lambda = 1e-3) when a_r < a_t or the
// subcarrier gains are rank deficient, and flags the result.
RecoverResult recover(const numkit::Tensor& received, const ChannelState& ch, int k, int l_t,
                      double power_scale);

// Identity forward on the recovered values; backward copies the gradient
// unchanged onto the transmitted coded tokens, bridging the channel.
numkit::Tensor straight_through(const numkit::Tensor& coded, const numkit::Tensor& received_tokens);

}  // namespace tokencom::ofat
