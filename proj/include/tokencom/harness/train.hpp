#pragma once

#include <filesystem>

#include "tokencom/harness/config.hpp"
#include "tokencom/jtcc/codec.hpp"
#include "tokencom/pipeline/pipeline.hpp"

namespace tokencom::harness {

// Sensor model, task model, and token codec for one run; the two models are
// independent weight sets sharing one architecture.
struct Agents {
  toylm::Lm sensor;
  toylm::Lm task;
  jtcc::JtccCodec codec;

  Agents(const RunConfig& cfg, std::uint64_t seed);
  void freeze_all();
};

std::filesystem::path base_ckpt_path(const RunConfig& cfg, const Paths& paths, const char* role,
                                     std::uint64_t seed);
std::filesystem::path mode_ckpt_path(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                                     std::uint64_t seed);

// Pre-trains one base model by next-token prediction on verbalized train
// scenes + questions + answers; cached on disk per (role, seed, config).
void ensure_base(const RunConfig& cfg, const Paths& paths, const scenes::Dataset& data,
                 const scenes::Vocab& vocab, const char* role, std::uint64_t seed);

// Trains `mode` with `k` machine tokens at `seed`: base pre-training (cached),
// then communication training of the adapters, scene projection, and codec.
// Saves the mode checkpoint and a per-step loss log; returns the checkpoint
// path. Re-uses an existing checkpoint file.
std::filesystem::path train_mode(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                                 std::uint64_t seed, const scenes::Dataset& data,
                                 const scenes::Vocab& vocab);

// Loads a mode checkpoint into a fresh Agents bundle with all parameters
// frozen (evaluation form). Throws on a missing or mismatched manifest.
Agents load_agents(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                   std::uint64_t seed);

}  // namespace tokencom::harness
