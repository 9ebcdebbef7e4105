#include "tokencom/toylm/model.hpp"

#include <cmath>
#include <stdexcept>

#include "tokencom/numkit/ops.hpp"

namespace tokencom::toylm {

using numkit::Tensor;

void LmConfig::validate() const {
  if (vocab_size < 2) throw std::invalid_argument("LmConfig: vocab_size must be >= 2");
  if (l_emb < 1 || n_blocks < 1 || n_heads < 1 || max_seq < 1) {
    throw std::invalid_argument("LmConfig: extents must be positive");
  }
  if (l_emb % n_heads != 0) {
    throw std::invalid_argument("LmConfig: l_emb " + std::to_string(l_emb) +
                                " not divisible by n_heads " + std::to_string(n_heads));
  }
  if (lora_rank < 1 || lora_rank > l_emb / 4) {
    throw std::invalid_argument("LmConfig: lora_rank " + std::to_string(lora_rank) +
                                " outside [1, l_emb/4]");
  }
}

namespace {

Tensor init_weight(std::vector<int> shape, int fan_in, numkit::RngStream& rng) {
  const double std_dev = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<float> data(static_cast<std::size_t>(numkit::numel(shape)));
  for (auto& v : data) v = static_cast<float>(rng.normal() * std_dev);
  return Tensor::from_data(std::move(shape), std::move(data), /*requires_grad=*/true);
}

// Fixed sinusoidal table, scaled well below the unit-RMS token content so
// position never drowns token identity.
constexpr double kPosScale = 0.3;

Tensor sinusoidal_table(int max_seq, int l_emb) {
  std::vector<float> data(static_cast<std::size_t>(max_seq) * l_emb);
  for (int p = 0; p < max_seq; ++p) {
    for (int i = 0; i < l_emb / 2; ++i) {
      const double freq = std::pow(10000.0, -2.0 * i / l_emb);
      data[static_cast<std::size_t>(p) * l_emb + 2 * i] =
          static_cast<float>(kPosScale * std::sin(p * freq));
      data[static_cast<std::size_t>(p) * l_emb + 2 * i + 1] =
          static_cast<float>(kPosScale * std::cos(p * freq));
    }
  }
  return Tensor::from_data({max_seq, l_emb}, std::move(data));
}

}  // namespace

Lm::Lm(const LmConfig& cfg, numkit::RngStream& rng) : cfg_(cfg) {
  cfg_.validate();
  const int l = cfg_.l_emb;
  // Unit-RMS embedding rows; projections keep 1/sqrt(fan_in).
  embed_ = init_weight({cfg_.vocab_size, l}, 1, rng);
  for (int b = 0; b < cfg_.n_blocks; ++b) {
    Block blk;
    blk.wq = init_weight({l, l}, l, rng);
    blk.wk = init_weight({l, l}, l, rng);
    blk.wv = init_weight({l, l}, l, rng);
    blk.wo = init_weight({l, l}, l, rng);
    blk.w1 = init_weight({l, 4 * l}, l, rng);
    blk.w2 = init_weight({4 * l, l}, 4 * l, rng);
    blk.key.down = init_weight({l, cfg_.lora_rank}, l, rng);
    blk.key.up = Tensor::zeros({cfg_.lora_rank, l}, true);
    blk.value.down = init_weight({l, cfg_.lora_rank}, l, rng);
    blk.value.up = Tensor::zeros({cfg_.lora_rank, l}, true);
    blocks_.push_back(std::move(blk));
  }
  head_w_ = init_weight({l, cfg_.vocab_size}, l, rng);
  head_b_ = Tensor::zeros({cfg_.vocab_size}, true);
  scene_proj_w_ = init_weight({kSceneFeatureDim, l}, kSceneFeatureDim, rng);
  scene_proj_b_ = Tensor::zeros({l}, true);
  pos_ = sinusoidal_table(cfg_.max_seq, l);
}

Tensor Lm::positional(int offset, int len) const {
  if (offset < 0 || offset + len > cfg_.max_seq) {
    throw std::length_error("positional range [" + std::to_string(offset) + "," +
                            std::to_string(offset + len) + ") exceeds max_seq " +
                            std::to_string(cfg_.max_seq));
  }
  return numkit::slice_rows(pos_, offset, offset + len);
}

TokenEmbeddingSeq Lm::embed_text(std::span<const int> ids, int pos_offset) const {
  Tensor rows = numkit::gather_rows(embed_, ids);
  Tensor out = numkit::add(rows, positional(pos_offset, static_cast<int>(ids.size())));
  return TokenEmbeddingSeq{out, TokenOrigin::language};
}

TokenEmbeddingSeq Lm::embed_scene(const scenes::SceneSpec& scene, int pos_offset) const {
  scene.validate();
  const int cells = scene.grid_w * scene.grid_h;
  std::vector<float> features(static_cast<std::size_t>(cells) * kSceneFeatureDim, 0.0f);
  for (int c = 0; c < cells; ++c) {
    float* f = features.data() + static_cast<std::size_t>(c) * kSceneFeatureDim;
    const scenes::SceneObject* o = scene.at(c % scene.grid_w, c / scene.grid_w);
    if (!o) {
      f[0] = 1.0f;  // reserved "empty" attribute vector
    } else {
      f[1 + static_cast<int>(o->shape)] = 1.0f;
      f[1 + scenes::kNumShapes + static_cast<int>(o->color)] = 1.0f;
      f[1 + scenes::kNumShapes + scenes::kNumColors + static_cast<int>(o->size)] = 1.0f;
    }
  }
  Tensor feat = Tensor::from_data({cells, kSceneFeatureDim}, std::move(features));
  Tensor proj = numkit::add_row_vector(numkit::matmul(feat, scene_proj_w_), scene_proj_b_);
  Tensor out = numkit::add(proj, positional(pos_offset, cells));
  return TokenEmbeddingSeq{out, TokenOrigin::modality};
}

Tensor Lm::forward_blocks(const Tensor& seq) const {
  if (seq.rank() != 2 || seq.extent(1) != cfg_.l_emb) {
    throw std::invalid_argument("forward_blocks: expected (seq," + std::to_string(cfg_.l_emb) +
                                "), got " + numkit::shape_str(seq.shape()));
  }
  const int s = seq.extent(0);
  if (s > cfg_.max_seq) {
    throw std::length_error("forward_blocks: sequence length " + std::to_string(s) +
                            " exceeds max_seq " + std::to_string(cfg_.max_seq));
  }
  const int dh = cfg_.head_dim();
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Tensor x = seq;
  for (const Block& blk : blocks_) {
    Tensor xn = numkit::rmsnorm_rows(x);
    Tensor wk_eff = numkit::add(blk.wk, numkit::matmul(blk.key.down, blk.key.up));
    Tensor wv_eff = numkit::add(blk.wv, numkit::matmul(blk.value.down, blk.value.up));
    Tensor q = numkit::matmul(xn, blk.wq);
    Tensor k = numkit::matmul(xn, wk_eff);
    Tensor v = numkit::matmul(xn, wv_eff);
    std::vector<Tensor> heads;
    heads.reserve(static_cast<std::size_t>(cfg_.n_heads));
    for (int h = 0; h < cfg_.n_heads; ++h) {
      Tensor qh = numkit::slice_cols(q, h * dh, (h + 1) * dh);
      Tensor kh = numkit::slice_cols(k, h * dh, (h + 1) * dh);
      Tensor vh = numkit::slice_cols(v, h * dh, (h + 1) * dh);
      Tensor scores = numkit::scale(numkit::matmul(qh, numkit::transpose(kh)), att_scale);
      Tensor p = numkit::causal_softmax(scores);
      heads.push_back(numkit::matmul(p, vh));
    }
    Tensor ctx = cfg_.n_heads == 1 ? heads[0] : numkit::concat_cols(heads);
    x = numkit::add(x, numkit::matmul(ctx, blk.wo));
    Tensor xm = numkit::rmsnorm_rows(x);
    Tensor hidden = numkit::relu(numkit::matmul(xm, blk.w1));
    x = numkit::add(x, numkit::matmul(hidden, blk.w2));
  }
  return numkit::rmsnorm_rows(x);
}

Tensor Lm::lm_head_decode(const Tensor& block_out) const {
  return numkit::add_row_vector(numkit::matmul(block_out, head_w_), head_b_);
}

Tensor Lm::extract_machine_tokens(const Tensor& block_out, int k) {
  const int s = block_out.extent(0);
  if (k < 0 || k > s) {
    throw std::invalid_argument("extract_machine_tokens: k " + std::to_string(k) +
                                " exceeds sequence length " + std::to_string(s));
  }
  return numkit::slice_rows(block_out, s - k, s);
}

std::vector<std::pair<std::string, Tensor>> Lm::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("embed", embed_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const std::string p = "block." + std::to_string(b) + ".";
    out.emplace_back(p + "wq", blocks_[b].wq);
    out.emplace_back(p + "wk", blocks_[b].wk);
    out.emplace_back(p + "wv", blocks_[b].wv);
    out.emplace_back(p + "wo", blocks_[b].wo);
    out.emplace_back(p + "w1", blocks_[b].w1);
    out.emplace_back(p + "w2", blocks_[b].w2);
    const std::string lp = "lora." + std::to_string(b) + ".";
    out.emplace_back(lp + "key.down", blocks_[b].key.down);
    out.emplace_back(lp + "key.up", blocks_[b].key.up);
    out.emplace_back(lp + "value.down", blocks_[b].value.down);
    out.emplace_back(lp + "value.up", blocks_[b].value.up);
  }
  out.emplace_back("head.w", head_w_);
  out.emplace_back("head.b", head_b_);
  out.emplace_back("scene_proj.w", scene_proj_w_);
  out.emplace_back("scene_proj.b", scene_proj_b_);
  return out;
}

std::vector<Tensor> Lm::base_parameters() const {
  std::vector<Tensor> out{embed_};
  for (const auto& b : blocks_) {
    out.push_back(b.wq);
    out.push_back(b.wk);
    out.push_back(b.wv);
    out.push_back(b.wo);
    out.push_back(b.w1);
    out.push_back(b.w2);
  }
  out.push_back(head_w_);
  out.push_back(head_b_);
  return out;
}

std::vector<Tensor> Lm::adapter_parameters() const {
  std::vector<Tensor> out;
  for (const auto& b : blocks_) {
    out.push_back(b.key.down);
    out.push_back(b.key.up);
    out.push_back(b.value.down);
    out.push_back(b.value.up);
  }
  return out;
}

std::vector<Tensor> Lm::projection_parameters() const { return {scene_proj_w_, scene_proj_b_}; }

std::int64_t Lm::base_parameter_count() const {
  std::int64_t n = 0;
  for (const auto& t : base_parameters()) n += t.size();
  return n;
}

std::int64_t Lm::adapter_parameter_count() const {
  std::int64_t n = 0;
  for (const auto& t : adapter_parameters()) n += t.size();
  return n;
}

void Lm::set_base_trainable(bool trainable) {
  for (auto& t : base_parameters()) t.set_requires_grad(trainable);
}

void Lm::set_adapters_trainable(bool trainable) {
  for (auto& t : adapter_parameters()) t.set_requires_grad(trainable);
}

void Lm::set_projection_trainable(bool trainable) {
  for (auto& t : projection_parameters()) t.set_requires_grad(trainable);
}

void Lm::save(numkit::Checkpoint& ck, const std::string& prefix) const {
  for (const auto& [name, t] : named_parameters()) ck.put(prefix + name, t);
}

void Lm::load(const numkit::Checkpoint& ck, const std::string& prefix) {
  for (auto& [name, t] : named_parameters()) {
    Tensor tt = t;
    ck.load_into(prefix + name, tt);
  }
}

}  // namespace tokencom::toylm
