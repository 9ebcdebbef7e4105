#pragma once

#include <string>
#include <vector>

#include "tokencom/jtcc/codec.hpp"
#include "tokencom/numkit/rng.hpp"
#include "tokencom/numkit/tensor.hpp"
#include "tokencom/ofat/channel.hpp"
#include "tokencom/scenes/scene.hpp"
#include "tokencom/scenes/vocab.hpp"
#include "tokencom/toylm/model.hpp"

namespace tokencom::pipeline {

// Token payload as it moves through the pipeline; each stage transition
// happens exactly once per episode and the width is fixed per stage.
enum class Stage { raw, coded, received, decoded };

const char* to_string(Stage s);

struct MachineTokens {
  numkit::Tensor values;
  Stage stage = Stage::raw;

  int k() const { return values.extent(0); }
  int width() const { return values.extent(1); }
};

MachineTokens make_tokens(numkit::Tensor values, Stage stage);
void require_stage(const MachineTokens& t, Stage expected, const char* op);

struct TaskDescription {
  std::string detailed;
  std::string vague;
  scenes::Category category = scenes::Category::color;
};

// Rule-based stand-in for the describing model: one fixed template per
// category: names the category, never any attribute value.
std::string obfuscate(const std::string& detailed, scenes::Category category);

// Language-first concatenation: vague text embeddings, then scene tokens.
numkit::Tensor assemble_sensor_sequence(const toylm::TokenEmbeddingSeq& vague,
                                        const toylm::TokenEmbeddingSeq& scene);
// Machine tokens as prefix (rows 0..k-1), detailed text after.
numkit::Tensor assemble_receiver_sequence(const numkit::Tensor& prefix,
                                          const toylm::TokenEmbeddingSeq& detailed);

// vague text + scene through the sensor model; the last k final-block
// embeddings are the payload.
MachineTokens sensor_encode(const std::vector<int>& vague_ids, const scenes::SceneSpec& scene,
                            const toylm::Lm& sensor, int k);

struct DecodeResult {
  int answer_index = 0;           // position within the answer vocabulary
  std::string answer;             // answer word
  numkit::Tensor answer_logits;   // 1 x answer_vocab, still on the tape
};

// Recovered tokens as a trainable prefix before the embedded detailed text;
// the answer is read at a trailing marker position, argmax over the closed
// answer vocabulary (lowest index on ties). Pass k = 0 tokens to answer
// from the detailed text alone.
DecodeResult task_decode(const MachineTokens& decoded, const std::vector<int>& detailed_ids,
                         const toylm::Lm& task, const scenes::Vocab& vocab);
DecodeResult task_decode_no_prefix(const std::vector<int>& detailed_ids, const toylm::Lm& task,
                                   const scenes::Vocab& vocab);

// Stage-checked codec and channel transitions.
MachineTokens jtcc_encode(const jtcc::JtccCodec& codec, const MachineTokens& raw);
MachineTokens jtcc_decode(const jtcc::JtccCodec& codec, const MachineTokens& received);
// modulate -> transmit -> recover -> straight-through gradient bridge.
MachineTokens channel_transfer(const MachineTokens& coded, const ofat::ChannelState& ch,
                               numkit::RngStream& noise_rng, bool* ridge_flag = nullptr);

struct EpisodeResult {
  std::string answer;
  int answer_index = 0;
  bool correct = false;
  numkit::Tensor task_loss;   // CE against the ground-truth answer
  numkit::Tensor jtcc_mse;    // reconstruction error of decoded vs raw tokens
  bool ridge_fallback = false;
};

// Full episode: obfuscate, sensor encode, token coding, analog transmission,
// recovery, token decoding, receiver decode, cross-entropy. A null codec
// transmits the raw token width unchanged (the no-compression variant).
EpisodeResult end_to_end(const scenes::SceneQA& qa, const toylm::Lm& sensor,
                         const toylm::Lm& task, const jtcc::JtccCodec* codec,
                         const ofat::ChannelState& ch, const scenes::Vocab& vocab, int k,
                         numkit::RngStream& noise_rng);

}  // namespace tokencom::pipeline
