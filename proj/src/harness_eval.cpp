#include "tokencom/harness/eval.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tokencom/harness/report.hpp"
#include "tokencom/numkit/ops.hpp"

namespace tokencom::harness {

using numkit::RngStream;
using numkit::Tensor;

std::string run_result_csv_header() {
  return "mode,snr_db,K,L_t,seed,accuracy,mean_loss,bytes_transmitted,wall_time";
}

std::string run_result_csv_row(const RunResult& r) {
  std::ostringstream s;
  s << to_string(r.mode) << "," << fmt_num(r.snr_db) << "," << r.k << "," << r.l_t << ","
    << r.seed << "," << fmt_num(r.accuracy) << "," << fmt_num(r.mean_loss) << ","
    << r.bytes_transmitted << "," << fmt_num(r.wall_time);
  return s.str();
}

std::int64_t episode_bytes(const RunConfig& cfg, Mode mode, int k, const scenes::SceneQA& qa) {
  switch (mode) {
    case Mode::proposed:
      return static_cast<std::int64_t>(k) * cfg.l_t * 4;
    case Mode::bench4:
      return static_cast<std::int64_t>(k) * cfg.sensor.l_emb * 4;
    case Mode::bench3:
      return static_cast<std::int64_t>(scenes::describe_scene_text(qa.scene).size());
    case Mode::bench1:
      return static_cast<std::int64_t>(scenes::serialize_scene(qa.scene).size());
  }
  return 0;
}

pipeline::DecodeResult direct_scene_decode(const scenes::SceneSpec& scene,
                                           const std::vector<int>& detailed_ids,
                                           const toylm::Lm& task, const scenes::Vocab& vocab) {
  const int cells = scene.grid_w * scene.grid_h;
  std::vector<int> ids = detailed_ids;
  ids.push_back(vocab.answer_marker());
  auto scene_tokens = task.embed_scene(scene, 0);
  auto text = task.embed_text(ids, cells);
  Tensor seq = pipeline::assemble_receiver_sequence(scene_tokens.tokens, text);
  Tensor out = task.forward_blocks(seq);
  Tensor last = numkit::slice_rows(out, out.extent(0) - 1, out.extent(0));
  Tensor logits = numkit::gather_cols(task.lm_head_decode(last), vocab.answer_ids());
  pipeline::DecodeResult r;
  r.answer_logits = logits;
  r.answer_index = numkit::argmax(logits.data());
  r.answer = vocab.answer_word(r.answer_index);
  return r;
}

pipeline::DecodeResult text_relay_decode(const scenes::SceneSpec& scene,
                                         const std::vector<int>& detailed_ids,
                                         const toylm::Lm& task, const scenes::Vocab& vocab) {
  std::vector<int> ids = vocab.encode(scenes::describe_scene_text(scene));
  for (int id : detailed_ids) ids.push_back(id);
  ids.push_back(vocab.answer_marker());
  Tensor out = task.forward_blocks(task.embed_text(ids, 0).tokens);
  Tensor last = numkit::slice_rows(out, out.extent(0) - 1, out.extent(0));
  Tensor logits = numkit::gather_cols(task.lm_head_decode(last), vocab.answer_ids());
  pipeline::DecodeResult r;
  r.answer_logits = logits;
  r.answer_index = numkit::argmax(logits.data());
  r.answer = vocab.answer_word(r.answer_index);
  return r;
}

RunResult evaluate_mode(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                        std::uint64_t seed, double snr_db, Agents& agents,
                        const scenes::Dataset& data, const scenes::Vocab& vocab) {
  const auto t0 = std::chrono::steady_clock::now();
  const jtcc::JtccCodec* codec = (mode == Mode::proposed) ? &agents.codec : nullptr;

  std::ofstream traces;
  if (cfg.dump_traces) {
    traces.open(paths.results_dir() / ("traces_" + std::string(to_string(mode)) + "_k" +
                                       std::to_string(k) + "_s" + std::to_string(seed) + ".txt"));
  }

  int correct = 0;
  double loss_sum = 0.0;
  std::int64_t bytes = 0;
  const std::uint64_t ep_tag = RngStream::tag_id("eval-episode");
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    const auto& qa = data.test[i];
    std::string answer;
    double loss = 0.0;
    if (mode == Mode::proposed || mode == Mode::bench4) {
      RngStream ep_rng(seed, ep_tag + i);
      auto ch = ofat::ChannelState::random(cfg.channel(snr_db), ep_rng, ep_tag + i);
      auto ep = pipeline::end_to_end(qa, agents.sensor, agents.task, codec, ch, vocab, k, ep_rng);
      answer = ep.answer;
      loss = ep.task_loss.item_f64();
      correct += ep.correct;
    } else {
      auto d = (mode == Mode::bench1)
                   ? direct_scene_decode(qa.scene, vocab.encode(qa.detailed), agents.task, vocab)
                   : text_relay_decode(qa.scene, vocab.encode(qa.detailed), agents.task, vocab);
      std::vector<int> target{vocab.answer_index(qa.answer)};
      loss = numkit::softmax_ce_loss(d.answer_logits, target).item_f64();
      answer = d.answer;
      correct += (d.answer == qa.answer);
    }
    loss_sum += loss;
    bytes += episode_bytes(cfg, mode, k, qa);
    if (traces.is_open()) {
      traces << scenes::serialize_scene(qa.scene) << "\t" << qa.vague << "\t" << qa.detailed
             << "\t" << k << "\t" << fmt_num(snr_db) << "\t" << answer << "\t" << qa.answer
             << "\t" << fmt_num(loss) << "\n";
    }
  }

  RunResult r;
  r.mode = mode;
  r.snr_db = snr_db;
  r.k = k;
  r.l_t = cfg.coded_width(mode);
  r.seed = seed;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(data.test.size());
  r.mean_loss = loss_sum / static_cast<double>(data.test.size());
  r.bytes_transmitted = bytes;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double majority_baseline(const scenes::Dataset& data) {
  std::map<std::string, int> freq;
  for (const auto& qa : data.train) freq[qa.answer]++;
  std::string best;
  int best_n = -1;
  for (const auto& [ans, n] : freq) {
    if (n > best_n) {
      best = ans;
      best_n = n;
    }
  }
  int correct = 0;
  for (const auto& qa : data.test) correct += (qa.answer == best);
  return static_cast<double>(correct) / static_cast<double>(data.test.size());
}

namespace {

std::string question_subtype(const scenes::Question& q) {
  std::istringstream in(scenes::serialize_question(q));
  std::string kind;
  in >> kind;
  return kind;
}

}  // namespace

double no_information_baseline(const scenes::Dataset& data) {
  std::map<std::string, std::map<std::string, int>> freq;
  for (const auto& qa : data.train) freq[question_subtype(qa.question)][qa.answer]++;
  std::map<std::string, std::string> best;
  for (const auto& [kind, answers] : freq) {
    int best_n = -1;
    for (const auto& [ans, n] : answers) {
      if (n > best_n) {
        best[kind] = ans;
        best_n = n;
      }
    }
  }
  int correct = 0;
  for (const auto& qa : data.test) {
    auto it = best.find(question_subtype(qa.question));
    correct += (it != best.end() && it->second == qa.answer);
  }
  return static_cast<double>(correct) / static_cast<double>(data.test.size());
}

double top_variance_fraction(const toylm::Lm& sensor, const scenes::Vocab& vocab,
                             const std::vector<scenes::SceneQA>& episodes, int k, int l_t,
                             int max_episodes) {
  const int l = sensor.config().l_emb;
  const int n_ep = std::min<int>(max_episodes, static_cast<int>(episodes.size()));
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < n_ep; ++i) {
    const auto& qa = episodes[static_cast<std::size_t>(i)];
    auto tokens = pipeline::sensor_encode(vocab.encode(qa.vague), qa.scene, sensor, k);
    for (int r = 0; r < k; ++r) {
      const float* p = tokens.values.data().data() + static_cast<std::size_t>(r) * l;
      rows.emplace_back(p, p + l);
    }
  }
  const std::size_t n = rows.size();
  std::vector<double> mean(static_cast<std::size_t>(l), 0.0);
  for (const auto& row : rows)
    for (int j = 0; j < l; ++j) mean[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
  for (auto& m : mean) m /= static_cast<double>(n);

  std::vector<double> cov(static_cast<std::size_t>(l) * l, 0.0);
  for (const auto& row : rows) {
    for (int i = 0; i < l; ++i) {
      const double di = row[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
      for (int j = i; j < l; ++j) {
        cov[static_cast<std::size_t>(i) * l + j] +=
            di * (row[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]);
      }
    }
  }
  for (int i = 0; i < l; ++i)
    for (int j = i; j < l; ++j) {
      cov[static_cast<std::size_t>(i) * l + j] /= static_cast<double>(n);
      cov[static_cast<std::size_t>(j) * l + i] = cov[static_cast<std::size_t>(i) * l + j];
    }

  // Cyclic Jacobi eigenvalue iteration; l is small.
  std::vector<double> a = cov;
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < l; ++p)
      for (int q = p + 1; q < l; ++q) off += a[static_cast<std::size_t>(p) * l + q] *
                                             a[static_cast<std::size_t>(p) * l + q];
    if (off < 1e-18) break;
    for (int p = 0; p < l; ++p) {
      for (int q = p + 1; q < l; ++q) {
        const double apq = a[static_cast<std::size_t>(p) * l + q];
        if (std::fabs(apq) < 1e-15) continue;
        const double app = a[static_cast<std::size_t>(p) * l + p];
        const double aqq = a[static_cast<std::size_t>(q) * l + q];
        const double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
        const double c = std::cos(theta), s = std::sin(theta);
        for (int i = 0; i < l; ++i) {
          const double aip = a[static_cast<std::size_t>(i) * l + p];
          const double aiq = a[static_cast<std::size_t>(i) * l + q];
          a[static_cast<std::size_t>(i) * l + p] = c * aip - s * aiq;
          a[static_cast<std::size_t>(i) * l + q] = s * aip + c * aiq;
        }
        for (int i = 0; i < l; ++i) {
          const double api = a[static_cast<std::size_t>(p) * l + i];
          const double aqi = a[static_cast<std::size_t>(q) * l + i];
          a[static_cast<std::size_t>(p) * l + i] = c * api - s * aqi;
          a[static_cast<std::size_t>(q) * l + i] = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> eig(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) eig[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * l + i];
  std::sort(eig.rbegin(), eig.rend());
  double total = 0.0, top = 0.0;
  for (int i = 0; i < l; ++i) {
    total += std::max(0.0, eig[static_cast<std::size_t>(i)]);
    if (i < l_t) top += std::max(0.0, eig[static_cast<std::size_t>(i)]);
  }
  return total > 0.0 ? top / total : 1.0;
}

}  // namespace tokencom::harness
