#include "tokencom/jtcc/codec.hpp"

#include <cmath>
#include <stdexcept>

#include "tokencom/numkit/ops.hpp"

namespace tokencom::jtcc {

using numkit::Tensor;

void JtccConfig::validate() const {
  if (l_t < 1 || l_emb < 2) throw std::invalid_argument("jtcc: widths must be positive");
  if (l_t >= l_emb) {
    throw std::invalid_argument("jtcc: l_t " + std::to_string(l_t) +
                                " must be strictly below l_emb " + std::to_string(l_emb));
  }
}

namespace {

Tensor init_weight(std::vector<int> shape, int fan_in, numkit::RngStream& rng) {
  const double std_dev = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<float> data(static_cast<std::size_t>(numkit::numel(shape)));
  for (auto& v : data) v = static_cast<float>(rng.normal() * std_dev);
  return Tensor::from_data(std::move(shape), std::move(data), /*requires_grad=*/true);
}

}  // namespace

JtccCodec::JtccCodec(const JtccConfig& cfg, numkit::RngStream& rng) : cfg_(cfg) {
  cfg_.validate();
  const int h = cfg_.hidden();
  enc_w1_ = init_weight({cfg_.l_emb, h}, cfg_.l_emb, rng);
  enc_b1_ = Tensor::zeros({h}, true);
  enc_w2_ = init_weight({h, cfg_.l_t}, h, rng);
  enc_b2_ = Tensor::zeros({cfg_.l_t}, true);
  dec_w1_ = init_weight({cfg_.l_t, h}, cfg_.l_t, rng);
  dec_b1_ = Tensor::zeros({h}, true);
  dec_w2_ = init_weight({h, cfg_.l_emb}, h, rng);
  dec_b2_ = Tensor::zeros({cfg_.l_emb}, true);
}

Tensor JtccCodec::encode(const Tensor& tokens) const {
  if (tokens.rank() != 2 || tokens.extent(1) != cfg_.l_emb) {
    throw std::invalid_argument("jtcc encode: expected width " + std::to_string(cfg_.l_emb) +
                                ", got " + numkit::shape_str(tokens.shape()));
  }
  Tensor h = numkit::tanh(numkit::add_row_vector(numkit::matmul(tokens, enc_w1_), enc_b1_));
  return numkit::add_row_vector(numkit::matmul(h, enc_w2_), enc_b2_);
}

Tensor JtccCodec::decode(const Tensor& tokens) const {
  if (tokens.rank() != 2 || tokens.extent(1) != cfg_.l_t) {
    throw std::invalid_argument("jtcc decode: expected width " + std::to_string(cfg_.l_t) +
                                ", got " + numkit::shape_str(tokens.shape()));
  }
  Tensor h = numkit::tanh(numkit::add_row_vector(numkit::matmul(tokens, dec_w1_), dec_b1_));
  return numkit::add_row_vector(numkit::matmul(h, dec_w2_), dec_b2_);
}

std::vector<std::pair<std::string, Tensor>> JtccCodec::named_parameters() const {
  return {
      {"enc.w1", enc_w1_}, {"enc.b1", enc_b1_}, {"enc.w2", enc_w2_}, {"enc.b2", enc_b2_},
      {"dec.w1", dec_w1_}, {"dec.b1", dec_b1_}, {"dec.w2", dec_w2_}, {"dec.b2", dec_b2_},
  };
}

std::vector<Tensor> JtccCodec::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

void JtccCodec::set_trainable(bool trainable) {
  for (auto& t : parameters()) t.set_requires_grad(trainable);
}

void JtccCodec::save(numkit::Checkpoint& ck, const std::string& prefix) const {
  for (const auto& [name, t] : named_parameters()) ck.put(prefix + name, t);
}

void JtccCodec::load(const numkit::Checkpoint& ck, const std::string& prefix) {
  for (auto& [name, t] : named_parameters()) {
    Tensor tt = t;
    ck.load_into(prefix + name, tt);
  }
}

Tensor denoise_reconstruction_loss(const JtccCodec& codec, const Tensor& tokens,
                                   double noise_sigma, numkit::RngStream& rng) {
  if (noise_sigma < 0) throw std::invalid_argument("jtcc: noise_sigma must be >= 0");
  Tensor coded = codec.encode(tokens);
  if (noise_sigma > 0) {
    std::vector<float> noise(coded.data().size());
    for (auto& v : noise) v = static_cast<float>(rng.normal() * noise_sigma);
    coded = numkit::add(coded, Tensor::from_data(coded.shape(), std::move(noise)));
  }
  return numkit::mse_loss(codec.decode(coded), tokens);
}

float train_step_denoise(JtccCodec& codec, const Tensor& tokens, double noise_sigma,
                         numkit::RngStream& rng, numkit::SgdMomentum& opt) {
  auto params = codec.parameters();
  numkit::zero_grads(params);
  Tensor loss = denoise_reconstruction_loss(codec, tokens, noise_sigma, rng);
  numkit::backward(loss);
  opt.step(params);
  return loss.item();
}

}  // namespace tokencom::jtcc
