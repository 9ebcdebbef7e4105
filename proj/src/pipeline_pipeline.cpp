#include "tokencom/pipeline/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "tokencom/numkit/ops.hpp"

namespace tokencom::pipeline {

using numkit::Tensor;

const char* to_string(Stage s) {
  switch (s) {
    case Stage::raw: return "raw";
    case Stage::coded: return "coded";
    case Stage::received: return "received";
    case Stage::decoded: return "decoded";
  }
  return "?";
}

MachineTokens make_tokens(Tensor values, Stage stage) {
  if (values.rank() != 2 || values.extent(0) < 1) {
    throw std::invalid_argument("machine tokens: expected k x width with k >= 1, got " +
                                numkit::shape_str(values.shape()));
  }
  for (float v : values.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("machine tokens: non-finite value");
  }
  return MachineTokens{std::move(values), stage};
}

void require_stage(const MachineTokens& t, Stage expected, const char* op) {
  if (t.stage != expected) {
    throw std::invalid_argument(std::string(op) + ": expected stage " + to_string(expected) +
                                ", got " + to_string(t.stage));
  }
}

std::string obfuscate(const std::string& detailed, scenes::Category category) {
  if (detailed.empty()) throw std::invalid_argument("obfuscate: empty task description");
  return scenes::vague_template(category);
}

Tensor assemble_sensor_sequence(const toylm::TokenEmbeddingSeq& vague,
                                const toylm::TokenEmbeddingSeq& scene) {
  if (vague.origin != toylm::TokenOrigin::language ||
      scene.origin != toylm::TokenOrigin::modality) {
    throw std::invalid_argument("sensor sequence: language tokens must precede modality tokens");
  }
  return numkit::concat_rows(vague.tokens, scene.tokens);
}

Tensor assemble_receiver_sequence(const Tensor& prefix, const toylm::TokenEmbeddingSeq& detailed) {
  if (detailed.origin != toylm::TokenOrigin::language) {
    throw std::invalid_argument("receiver sequence: detailed text must be language tokens");
  }
  return numkit::concat_rows(prefix, detailed.tokens);
}

MachineTokens sensor_encode(const std::vector<int>& vague_ids, const scenes::SceneSpec& scene,
                            const toylm::Lm& sensor, int k) {
  const int cells = scene.grid_w * scene.grid_h;
  const int total = static_cast<int>(vague_ids.size()) + cells;
  if (total > sensor.config().max_seq) {
    throw std::length_error("sensor_encode: sequence length " + std::to_string(total) +
                            " exceeds max_seq " + std::to_string(sensor.config().max_seq));
  }
  auto vague = sensor.embed_text(vague_ids, 0);
  auto modality = sensor.embed_scene(scene, static_cast<int>(vague_ids.size()));
  Tensor seq = assemble_sensor_sequence(vague, modality);
  Tensor out = sensor.forward_blocks(seq);
  return make_tokens(toylm::Lm::extract_machine_tokens(out, k), Stage::raw);
}

namespace {

DecodeResult decode_at_marker(const Tensor& seq, const toylm::Lm& task,
                              const scenes::Vocab& vocab) {
  Tensor out = task.forward_blocks(seq);
  Tensor last = numkit::slice_rows(out, out.extent(0) - 1, out.extent(0));
  Tensor logits = task.lm_head_decode(last);
  Tensor answer_logits = numkit::gather_cols(logits, vocab.answer_ids());
  DecodeResult r;
  r.answer_logits = answer_logits;
  r.answer_index = numkit::argmax(answer_logits.data());
  r.answer = vocab.answer_word(r.answer_index);
  return r;
}

Tensor embed_detailed(const std::vector<int>& detailed_ids, const toylm::Lm& task,
                      const scenes::Vocab& vocab, int offset, toylm::TokenEmbeddingSeq* out) {
  std::vector<int> ids = detailed_ids;
  ids.push_back(vocab.answer_marker());
  *out = task.embed_text(ids, offset);
  return out->tokens;
}

}  // namespace

DecodeResult task_decode(const MachineTokens& decoded, const std::vector<int>& detailed_ids,
                         const toylm::Lm& task, const scenes::Vocab& vocab) {
  require_stage(decoded, Stage::decoded, "task_decode");
  const int k = decoded.k();
  const int total = k + static_cast<int>(detailed_ids.size()) + 1;
  if (total > task.config().max_seq) {
    throw std::length_error("task_decode: sequence length " + std::to_string(total) +
                            " exceeds max_seq " + std::to_string(task.config().max_seq));
  }
  toylm::TokenEmbeddingSeq text;
  embed_detailed(detailed_ids, task, vocab, k, &text);
  Tensor seq = assemble_receiver_sequence(decoded.values, text);
  return decode_at_marker(seq, task, vocab);
}

DecodeResult task_decode_no_prefix(const std::vector<int>& detailed_ids, const toylm::Lm& task,
                                   const scenes::Vocab& vocab) {
  toylm::TokenEmbeddingSeq text;
  Tensor seq = embed_detailed(detailed_ids, task, vocab, 0, &text);
  return decode_at_marker(seq, task, vocab);
}

MachineTokens jtcc_encode(const jtcc::JtccCodec& codec, const MachineTokens& raw) {
  require_stage(raw, Stage::raw, "jtcc_encode");
  return make_tokens(codec.encode(raw.values), Stage::coded);
}

MachineTokens jtcc_decode(const jtcc::JtccCodec& codec, const MachineTokens& received) {
  require_stage(received, Stage::received, "jtcc_decode");
  return make_tokens(codec.decode(received.values), Stage::decoded);
}

MachineTokens channel_transfer(const MachineTokens& coded, const ofat::ChannelState& ch,
                               numkit::RngStream& noise_rng, bool* ridge_flag) {
  require_stage(coded, Stage::coded, "channel_transfer");
  auto mod = ofat::modulate(coded.values, ch.a_t(), ch.k_c());
  Tensor received = ofat::transmit(mod.grid, ch, noise_rng);
  auto rec = ofat::recover(received, ch, coded.k(), coded.width(), mod.power_scale);
  if (ridge_flag) *ridge_flag = rec.ridge_fallback;
  return MachineTokens{ofat::straight_through(coded.values, rec.tokens), Stage::received};
}

EpisodeResult end_to_end(const scenes::SceneQA& qa, const toylm::Lm& sensor,
                         const toylm::Lm& task, const jtcc::JtccCodec* codec,
                         const ofat::ChannelState& ch, const scenes::Vocab& vocab, int k,
                         numkit::RngStream& noise_rng) {
  const std::string vague = obfuscate(qa.detailed, qa.category);
  MachineTokens raw = sensor_encode(vocab.encode(vague), qa.scene, sensor, k);
  MachineTokens coded =
      codec ? jtcc_encode(*codec, raw) : MachineTokens{raw.values, Stage::coded};
  EpisodeResult r;
  MachineTokens received = channel_transfer(coded, ch, noise_rng, &r.ridge_fallback);
  MachineTokens decoded =
      codec ? jtcc_decode(*codec, received) : MachineTokens{received.values, Stage::decoded};
  r.jtcc_mse = numkit::mse_loss(decoded.values, raw.values);

  DecodeResult d = task_decode(decoded, vocab.encode(qa.detailed), task, vocab);
  r.answer = d.answer;
  r.answer_index = d.answer_index;
  r.correct = (d.answer == qa.answer);
  std::vector<int> target{vocab.answer_index(qa.answer)};
  r.task_loss = numkit::softmax_ce_loss(d.answer_logits, target);
  return r;
}

}  // namespace tokencom::pipeline
