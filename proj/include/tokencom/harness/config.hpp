#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tokencom/ofat/channel.hpp"
#include "tokencom/scenes/dataset.hpp"
#include "tokencom/scenes/vocab.hpp"
#include "tokencom/toylm/model.hpp"

namespace tokencom::harness {

enum class Mode { proposed, bench1, bench3, bench4 };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct TrainConfig {
  std::string optimizer = "adam";  // "adam" or "sgd" (momentum 0.9)
  int steps = 2600;
  int batch = 8;
  double lr = 0.08;
  double momentum = 0.9;
  double lambda = 0.1;  // weight of the token-reconstruction term
  bool freeze_task_model = true;
  int pretrain_steps = 2400;
  int pretrain_batch = 8;
  double pretrain_lr = 0.3;
  // Relative weight of the answer position inside the next-token objective;
  // 1 recovers the plain language-model loss.
  double pretrain_answer_weight = 8.0;
};

// Single source of experiment reproducibility: everything a run needs.
struct RunConfig {
  toylm::LmConfig sensor;
  toylm::LmConfig task;
  int k = 5;     // machine tokens
  int l_t = 16;  // coded width
  int a_t = 2;
  int a_r = 2;
  int k_c = 8;
  double snr_db = 15.0;
  bool allow_ridge_fallback = false;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  Mode mode = Mode::proposed;
  scenes::DataConfig data;
  TrainConfig train;
  std::vector<double> sweep_snr = {-5, 0, 5, 10, 15};
  std::vector<int> sweep_tokens = {1, 2, 3, 4, 5, 6, 7};
  std::vector<Mode> sweep_modes = {Mode::proposed, Mode::bench1, Mode::bench3, Mode::bench4};
  bool dump_traces = false;

  ofat::ChannelConfig channel(double at_snr_db) const;
  // Effective transmitted width per mode (bench4 skips compression).
  int coded_width(Mode m) const { return m == Mode::bench4 ? sensor.l_emb : l_t; }

  // Cross-module constraint validation; throws std::invalid_argument.
  void validate(const scenes::Vocab& vocab) const;

  // Canonical key=value serialization (fixed key order) and its FNV-1a hash.
  std::string canonical() const;
  std::uint64_t config_hash() const;
  // Hash over the fields that shape training (models, channel extents,
  // train block, data block, training SNR range); checkpoint cache key.
  std::uint64_t train_hash() const;
};

RunConfig default_config(const scenes::Vocab& vocab);

// Flat dotted-key file; `#` comments; unknown keys are errors. The literal
// name "default" yields the built-in defaults.
RunConfig load_config(const std::string& path_or_default, const scenes::Vocab& vocab);

// Directory layout under the output root.
struct Paths {
  std::filesystem::path out;
  std::filesystem::path data_dir() const { return out / "data"; }
  std::filesystem::path ckpt_dir() const { return out / "ckpt"; }
  std::filesystem::path results_dir() const { return out / "results"; }
  std::filesystem::path manifest_file() const { return out / "manifest.txt"; }
  void ensure() const;
};

void write_manifest(const Paths& paths, const RunConfig& cfg);

// Longest question, in words, the generator can emit.
int max_question_words();
// Longest scene verbalization, in words, for this generation config.
int max_describe_words(const scenes::GenConfig& gen);

}  // namespace tokencom::harness
