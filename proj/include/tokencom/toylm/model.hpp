#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tokencom/numkit/checkpoint.hpp"
#include "tokencom/numkit/rng.hpp"
#include "tokencom/numkit/tensor.hpp"
#include "tokencom/scenes/scene.hpp"

namespace tokencom::toylm {

struct LmConfig {
  int vocab_size = 0;
  int l_emb = 64;
  int n_blocks = 2;
  int n_heads = 4;
  int max_seq = 64;
  int lora_rank = 2;

  int head_dim() const { return l_emb / n_heads; }
  void validate() const;  // throws std::invalid_argument
};

enum class TokenOrigin { language, modality, machine };

struct TokenEmbeddingSeq {
  numkit::Tensor tokens;  // seq x l_emb
  TokenOrigin origin = TokenOrigin::language;
  int length() const { return tokens.extent(0); }
};

// Low-rank adapter attached to a Key or Value projection. Effective weight
// is base + down*up; up starts at zero so the adapted model equals the base
// model exactly until trained.
struct LoraAdapter {
  numkit::Tensor down;  // l_emb x rank
  numkit::Tensor up;    // rank x l_emb
};

struct Block {
  numkit::Tensor wq, wk, wv, wo;  // l_emb x l_emb
  numkit::Tensor w1;              // l_emb x 4*l_emb
  numkit::Tensor w2;              // 4*l_emb x l_emb
  LoraAdapter key, value;
};

// One grid cell encodes [empty, shape, color, size] one-hots; cell location
// comes from the token's sequence position.
constexpr int kSceneFeatureDim = 1 + scenes::kNumShapes + scenes::kNumColors + scenes::kNumSizes;

// Decoder-only causal transformer with fixed sinusoidal positions, RMS
// pre-norm blocks, a linear LM head, and a trainable scene projection.
class Lm {
 public:
  Lm(const LmConfig& cfg, numkit::RngStream& rng);

  const LmConfig& config() const { return cfg_; }

  TokenEmbeddingSeq embed_text(std::span<const int> ids, int pos_offset = 0) const;
  TokenEmbeddingSeq embed_scene(const scenes::SceneSpec& scene, int pos_offset = 0) const;

  // Final-block output (post final norm), before any LM head.
  numkit::Tensor forward_blocks(const numkit::Tensor& seq) const;
  numkit::Tensor forward_blocks(const TokenEmbeddingSeq& seq) const {
    return forward_blocks(seq.tokens);
  }

  numkit::Tensor lm_head_decode(const numkit::Tensor& block_out) const;

  // Rows seq-k .. seq-1 of the final block output, order preserved.
  static numkit::Tensor extract_machine_tokens(const numkit::Tensor& block_out, int k);

  // Sinusoidal position rows [offset, offset+len), constant (no grad).
  numkit::Tensor positional(int offset, int len) const;

  std::vector<std::pair<std::string, numkit::Tensor>> named_parameters() const;
  std::vector<numkit::Tensor> base_parameters() const;        // embed, blocks, head
  std::vector<numkit::Tensor> adapter_parameters() const;     // lora.*
  std::vector<numkit::Tensor> projection_parameters() const;  // scene_proj.*
  std::int64_t base_parameter_count() const;
  std::int64_t adapter_parameter_count() const;

  void set_base_trainable(bool trainable);
  void set_adapters_trainable(bool trainable);
  void set_projection_trainable(bool trainable);

  void save(numkit::Checkpoint& ck, const std::string& prefix) const;
  void load(const numkit::Checkpoint& ck, const std::string& prefix);

 private:
  LmConfig cfg_;
  numkit::Tensor embed_;        // vocab x l_emb
  numkit::Tensor head_w_;       // l_emb x vocab
  numkit::Tensor head_b_;       // vocab
  numkit::Tensor scene_proj_w_; // kSceneFeatureDim x l_emb
  numkit::Tensor scene_proj_b_; // l_emb
  numkit::Tensor pos_;          // max_seq x l_emb, constant
  std::vector<Block> blocks_;
};

}  // namespace tokencom::toylm
