#pragma once

#include <cstdint>
#include <string_view>

namespace tokencom::numkit {

// Counter-based 64-bit generator (splitmix finalizer over key + counter).
// A stream is (seed, stream id); draws are a pure function of
// (seed, stream, counter), so any stream can be reproduced independently.
// There is no global generator: every stochastic routine takes a stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);
  RngStream(std::uint64_t seed, std::string_view tag);

  std::uint64_t next_u64();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  int uniform_int(int lo, int hi);       // inclusive on both ends
  double normal();                       // standard normal, Box-Muller

  static std::uint64_t tag_id(std::string_view tag);  // FNV-1a

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tokencom::numkit
