#include "tokencom/harness/train.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <fstream>
#include <stdexcept>

#include "tokencom/harness/eval.hpp"
#include "tokencom/numkit/ops.hpp"
#include "tokencom/numkit/optim.hpp"

namespace tokencom::harness {

using numkit::RngStream;
using numkit::Tensor;

namespace {

jtcc::JtccConfig codec_config(const RunConfig& cfg) {
  jtcc::JtccConfig jc;
  jc.l_emb = cfg.sensor.l_emb;
  jc.l_t = cfg.l_t;
  return jc;
}

std::string hash8(const RunConfig& cfg) {
  char hex[16];
  std::snprintf(hex, sizeof hex, "%08x",
                static_cast<unsigned>(cfg.train_hash() & 0xFFFFFFFFu));
  return hex;
}

// Small polymorphic wrapper so training loops can run either optimizer.
struct Opt {
  std::optional<numkit::SgdMomentum> sgd;
  std::optional<numkit::Adam> adam;
  Opt(const TrainConfig& tc, double lr) {
    if (tc.optimizer == "sgd") sgd.emplace(lr, tc.momentum);
    else adam.emplace(lr);
  }
  void set_lr(double lr) {
    if (sgd) sgd->set_lr(lr);
    else adam->set_lr(lr);
  }
  void step(const std::vector<Tensor>& params) {
    if (sgd) sgd->step(params);
    else adam->step(params);
  }
};

// Warmup then linear decay.
double schedule_lr(double base, int step, int total, double floor_frac) {
  const int warmup = std::max(1, total / 20);
  if (step < warmup) return base * (step + 1) / warmup;
  const double t = static_cast<double>(step - warmup) / std::max(1, total - warmup);
  return base * (1.0 - (1.0 - floor_frac) * t);
}

std::vector<std::vector<int>> pretrain_sequences(const std::vector<scenes::SceneQA>& data,
                                                 const scenes::Vocab& vocab) {
  std::vector<std::vector<int>> out;
  out.reserve(data.size());
  for (const auto& qa : data) {
    std::vector<int> ids = vocab.encode(scenes::describe_scene_text(qa.scene));
    for (int id : vocab.encode(qa.detailed)) ids.push_back(id);
    ids.push_back(vocab.answer_marker());
    ids.push_back(vocab.id(qa.answer));
    out.push_back(std::move(ids));
  }
  return out;
}

void pretrain_base(toylm::Lm& model, const std::vector<std::vector<int>>& seqs,
                   const RunConfig& cfg, std::uint64_t seed, const char* role,
                   const Paths& paths) {
  model.set_base_trainable(true);
  model.set_adapters_trainable(false);
  model.set_projection_trainable(false);
  auto params = model.base_parameters();
  Opt opt(cfg.train, cfg.train.pretrain_lr);
  RngStream order(seed, std::string("pretrain-order-") + role);

  std::ofstream log(paths.results_dir() /
                    ("pretrain_" + std::string(role) + "_s" + std::to_string(seed) + ".csv"));
  log << "step,loss\n";

  const int steps = cfg.train.pretrain_steps;
  const int batch = cfg.train.pretrain_batch;
  for (int step = 0; step < steps; ++step) {
    opt.set_lr(schedule_lr(cfg.train.pretrain_lr, step, steps, 0.05));
    numkit::zero_grads(params);
    double loss_sum = 0.0;
    for (int b = 0; b < batch; ++b) {
      const auto& ids = seqs[static_cast<std::size_t>(
          order.uniform_int(0, static_cast<int>(seqs.size()) - 1))];
      std::vector<int> input(ids.begin(), ids.end() - 1);
      std::vector<int> target(ids.begin() + 1, ids.end());
      Tensor x = model.embed_text(input, 0).tokens;
      Tensor logits = model.lm_head_decode(model.forward_blocks(x));
      Tensor loss = numkit::softmax_ce_loss(logits, target);
      // Next-token objective with the answer position up-weighted: the
      // answer token is the point of the exercise. Normalized so the total
      // gradient scale does not grow with the weight.
      const double w = cfg.train.pretrain_answer_weight;
      if (w > 1.0) {
        const int rows = logits.extent(0);
        Tensor ans_logits = numkit::slice_rows(logits, rows - 1, rows);
        std::vector<int> ans_target{target.back()};
        Tensor ans_loss = numkit::softmax_ce_loss(ans_logits, ans_target);
        const double denom = rows + w - 1.0;
        loss = numkit::add(numkit::scale(loss, rows / denom),
                           numkit::scale(ans_loss, (w - 1.0) / denom));
      }
      loss_sum += loss.item_f64();
      numkit::backward(numkit::scale(loss, 1.0 / batch));
    }
    const double mean_loss = loss_sum / batch;
    if (!std::isfinite(mean_loss)) {
      throw std::runtime_error("pre-training diverged: loss is not finite at step " +
                               std::to_string(step) + " (" + role + ", seed " +
                               std::to_string(seed) + ")");
    }
    opt.step(params);
    log << step << "," << mean_loss << "\n";
  }
  model.set_base_trainable(false);
}

struct EpisodePick {
  const scenes::SceneQA* qa;
  double snr_db;
};

// Direct scene consumption by the task model (the no-transmission path).
Tensor bench1_loss(const scenes::SceneQA& qa, const toylm::Lm& task, const scenes::Vocab& vocab,
                   bool* correct) {
  auto d = direct_scene_decode(qa.scene, vocab.encode(qa.detailed), task, vocab);
  if (correct) *correct = (d.answer == qa.answer);
  std::vector<int> target{vocab.answer_index(qa.answer)};
  return numkit::softmax_ce_loss(d.answer_logits, target);
}

void comm_train(const RunConfig& cfg, Mode mode, int k, std::uint64_t seed, Agents& ag,
                const scenes::Dataset& data, const scenes::Vocab& vocab, const Paths& paths) {
  ag.sensor.set_base_trainable(false);
  ag.sensor.set_adapters_trainable(mode == Mode::proposed || mode == Mode::bench4);
  ag.sensor.set_projection_trainable(mode == Mode::proposed || mode == Mode::bench4);
  ag.task.set_base_trainable(false);
  ag.task.set_adapters_trainable(!cfg.train.freeze_task_model);
  ag.task.set_projection_trainable(mode == Mode::bench1);
  ag.codec.set_trainable(mode == Mode::proposed);

  std::vector<Tensor> params;
  if (mode == Mode::proposed || mode == Mode::bench4) {
    for (auto& t : ag.sensor.adapter_parameters()) params.push_back(t);
    for (auto& t : ag.sensor.projection_parameters()) params.push_back(t);
  }
  if (mode == Mode::bench1) {
    for (auto& t : ag.task.projection_parameters()) params.push_back(t);
  }
  if (!cfg.train.freeze_task_model) {
    for (auto& t : ag.task.adapter_parameters()) params.push_back(t);
  }
  if (mode == Mode::proposed) {
    for (auto& t : ag.codec.parameters()) params.push_back(t);
  }
  if (params.empty()) {
    throw std::runtime_error("training: nothing to optimize in mode " +
                             std::string(to_string(mode)));
  }

  Opt opt(cfg.train, cfg.train.lr);
  RngStream order(seed, "train-order");
  RngStream chan(seed, "train-chan");
  RngStream snr_rng(seed, "train-snr");
  double snr_lo = cfg.sweep_snr.front(), snr_hi = cfg.sweep_snr.front();
  for (double s : cfg.sweep_snr) {
    snr_lo = std::min(snr_lo, s);
    snr_hi = std::max(snr_hi, s);
  }

  std::ofstream log(paths.results_dir() / ("train_" + std::string(to_string(mode)) + "_k" +
                                           std::to_string(k) + "_s" + std::to_string(seed) +
                                           ".csv"));
  log << "step,loss\n";

  const jtcc::JtccCodec* codec = (mode == Mode::proposed) ? &ag.codec : nullptr;
  for (int step = 0; step < cfg.train.steps; ++step) {
    opt.set_lr(schedule_lr(cfg.train.lr, step, cfg.train.steps, 0.15));
    numkit::zero_grads(params);
    double loss_sum = 0.0;
    for (int b = 0; b < cfg.train.batch; ++b) {
      const auto& qa = data.train[static_cast<std::size_t>(
          order.uniform_int(0, static_cast<int>(data.train.size()) - 1))];
      Tensor total;
      if (mode == Mode::bench1) {
        total = bench1_loss(qa, ag.task, vocab, nullptr);
      } else {
        // Channel noise sampled fresh per step, SNR from the sweep range.
        const double snr = snr_rng.uniform(snr_lo, snr_hi);
        auto ch = ofat::ChannelState::random(cfg.channel(snr), chan);
        auto ep = pipeline::end_to_end(qa, ag.sensor, ag.task, codec, ch, vocab, k, chan);
        total = (codec && cfg.train.lambda > 0)
                    ? numkit::add(ep.task_loss, numkit::scale(ep.jtcc_mse, cfg.train.lambda))
                    : ep.task_loss;
      }
      loss_sum += total.item_f64();
      numkit::backward(numkit::scale(total, 1.0 / cfg.train.batch));
    }
    const double mean_loss = loss_sum / cfg.train.batch;
    if (!std::isfinite(mean_loss)) {
      throw std::runtime_error("training diverged: loss is not finite at step " +
                               std::to_string(step) + " (mode " + to_string(mode) + ", seed " +
                               std::to_string(seed) + ")");
    }
    opt.step(params);
    log << step << "," << mean_loss << "\n";
  }
}

toylm::Lm make_lm(const toylm::LmConfig& cfg, std::uint64_t seed, const char* tag) {
  RngStream rng(seed, tag);
  return toylm::Lm(cfg, rng);
}

jtcc::JtccCodec make_codec(const RunConfig& cfg, std::uint64_t seed) {
  RngStream rng(seed, "init-jtcc");
  return jtcc::JtccCodec(codec_config(cfg), rng);
}

}  // namespace

Agents::Agents(const RunConfig& cfg, std::uint64_t seed)
    : sensor(make_lm(cfg.sensor, seed, "init-sensor")),
      task(make_lm(cfg.task, seed, "init-task")),
      codec(make_codec(cfg, seed)) {}

void Agents::freeze_all() {
  sensor.set_base_trainable(false);
  sensor.set_adapters_trainable(false);
  sensor.set_projection_trainable(false);
  task.set_base_trainable(false);
  task.set_adapters_trainable(false);
  task.set_projection_trainable(false);
  codec.set_trainable(false);
}

std::filesystem::path base_ckpt_path(const RunConfig& cfg, const Paths& paths, const char* role,
                                     std::uint64_t seed) {
  return paths.ckpt_dir() /
         ("base_" + std::string(role) + "_s" + std::to_string(seed) + "_" + hash8(cfg) + ".ckpt");
}

std::filesystem::path mode_ckpt_path(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                                     std::uint64_t seed) {
  return paths.ckpt_dir() / (std::string(to_string(mode)) + "_k" + std::to_string(k) + "_s" +
                             std::to_string(seed) + "_" + hash8(cfg) + ".ckpt");
}

void ensure_base(const RunConfig& cfg, const Paths& paths, const scenes::Dataset& data,
                 const scenes::Vocab& vocab, const char* role, std::uint64_t seed) {
  const auto path = base_ckpt_path(cfg, paths, role, seed);
  if (std::filesystem::exists(path)) return;
  const bool is_sensor = std::string(role) == "sensor";
  RngStream init(seed, is_sensor ? "init-sensor" : "init-task");
  toylm::Lm model(is_sensor ? cfg.sensor : cfg.task, init);
  auto seqs = pretrain_sequences(data.train, vocab);
  pretrain_base(model, seqs, cfg, seed, role, paths);
  numkit::Checkpoint ck;
  model.save(ck, "");
  ck.write(path);
}

std::filesystem::path train_mode(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                                 std::uint64_t seed, const scenes::Dataset& data,
                                 const scenes::Vocab& vocab) {
  const auto path = mode_ckpt_path(cfg, paths, mode, k, seed);
  if (std::filesystem::exists(path)) return path;

  const bool needs_sensor = (mode == Mode::proposed || mode == Mode::bench4);
  if (needs_sensor) ensure_base(cfg, paths, data, vocab, "sensor", seed);
  ensure_base(cfg, paths, data, vocab, "task", seed);

  Agents ag(cfg, seed);
  if (needs_sensor) {
    auto ck = numkit::Checkpoint::read(base_ckpt_path(cfg, paths, "sensor", seed));
    ag.sensor.load(ck, "");
  }
  {
    auto ck = numkit::Checkpoint::read(base_ckpt_path(cfg, paths, "task", seed));
    ag.task.load(ck, "");
  }

  if (mode != Mode::bench3) comm_train(cfg, mode, k, seed, ag, data, vocab, paths);

  numkit::Checkpoint ck;
  if (needs_sensor) ag.sensor.save(ck, "sensor.");
  ag.task.save(ck, "task.");
  if (mode == Mode::proposed) ag.codec.save(ck, "jtcc.");
  ck.write(path);
  return path;
}

Agents load_agents(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                   std::uint64_t seed) {
  const auto path = mode_ckpt_path(cfg, paths, mode, k, seed);
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("checkpoint manifest: missing " + path.string() +
                             " (train this mode first)");
  }
  auto ck = numkit::Checkpoint::read(path);
  Agents ag(cfg, seed);
  if (mode == Mode::proposed || mode == Mode::bench4) ag.sensor.load(ck, "sensor.");
  ag.task.load(ck, "task.");
  if (mode == Mode::proposed) ag.codec.load(ck, "jtcc.");
  ag.freeze_all();
  return ag;
}

}  // namespace tokencom::harness
