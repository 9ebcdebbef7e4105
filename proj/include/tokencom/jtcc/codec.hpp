#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tokencom/numkit/checkpoint.hpp"
#include "tokencom/numkit/optim.hpp"
#include "tokencom/numkit/rng.hpp"
#include "tokencom/numkit/tensor.hpp"

namespace tokencom::jtcc {

struct JtccConfig {
  int l_emb = 64;
  int l_t = 16;
  int hidden() const { return (l_emb + l_t) / 2; }
  void validate() const;  // requires strict compression l_t < l_emb
};

// Symmetric autoencoder applied per token row: encoder l_emb -> hidden ->
// l_t, decoder mirrors it back. Trained with channel noise in the loop.
class JtccCodec {
 public:
  JtccCodec(const JtccConfig& cfg, numkit::RngStream& rng);

  const JtccConfig& config() const { return cfg_; }

  // rows x l_emb -> rows x l_t; rows are coded independently.
  numkit::Tensor encode(const numkit::Tensor& tokens) const;
  // rows x l_t -> rows x l_emb.
  numkit::Tensor decode(const numkit::Tensor& tokens) const;

  std::vector<std::pair<std::string, numkit::Tensor>> named_parameters() const;
  std::vector<numkit::Tensor> parameters() const;
  void set_trainable(bool trainable);

  void save(numkit::Checkpoint& ck, const std::string& prefix = "jtcc.") const;
  void load(const numkit::Checkpoint& ck, const std::string& prefix = "jtcc.");

 private:
  JtccConfig cfg_;
  numkit::Tensor enc_w1_, enc_b1_, enc_w2_, enc_b2_;
  numkit::Tensor dec_w1_, dec_b1_, dec_w2_, dec_b2_;
};

// MSE of decode(encode(tokens) + N(0, sigma^2)) against tokens; the graph
// reaches both encoder and decoder parameters. sigma = 0 is the plain
// autoencoder objective.
numkit::Tensor denoise_reconstruction_loss(const JtccCodec& codec, const numkit::Tensor& tokens,
                                           double noise_sigma, numkit::RngStream& rng);

// One gradient step on the denoising objective; returns the loss value.
float train_step_denoise(JtccCodec& codec, const numkit::Tensor& tokens, double noise_sigma,
                         numkit::RngStream& rng, numkit::SgdMomentum& opt);

}  // namespace tokencom::jtcc
