#pragma once

#include <string>

#include "tokencom/harness/train.hpp"

namespace tokencom::harness {

struct RunResult {
  Mode mode = Mode::proposed;
  double snr_db = 0.0;
  int k = 0;
  int l_t = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::int64_t bytes_transmitted = 0;
  double wall_time = 0.0;  // seconds; excluded from determinism comparisons
};

std::string run_result_csv_header();
std::string run_result_csv_row(const RunResult& r);

// Payload bytes one episode costs in this mode: proposed K*L_t*4, bench4
// K*L_emb*4, bench3 UTF-8 bytes of the scene verbalization, bench1 bytes of
// the canonical scene serialization.
std::int64_t episode_bytes(const RunConfig& cfg, Mode mode, int k, const scenes::SceneQA& qa);

// Exact-match accuracy on the test split; channel gains and noise for
// episode i come from the (seed, episode-i) stream, so different SNRs see
// common random numbers.
RunResult evaluate_mode(const RunConfig& cfg, const Paths& paths, Mode mode, int k,
                        std::uint64_t seed, double snr_db, Agents& agents,
                        const scenes::Dataset& data, const scenes::Vocab& vocab);

// Benchmark decode paths.
pipeline::DecodeResult direct_scene_decode(const scenes::SceneSpec& scene,
                                           const std::vector<int>& detailed_ids,
                                           const toylm::Lm& task, const scenes::Vocab& vocab);
pipeline::DecodeResult text_relay_decode(const scenes::SceneSpec& scene,
                                         const std::vector<int>& detailed_ids,
                                         const toylm::Lm& task, const scenes::Vocab& vocab);

// Most frequent train-split answer scored on the test split.
double majority_baseline(const scenes::Dataset& data);
// Best constant answer per question subtype (fit on train, scored on test):
// what a receiver could do with no scene information at all.
double no_information_baseline(const scenes::Dataset& data);

// Fraction of total variance of the sensor's raw machine tokens captured by
// the top l_t principal components, over the given episodes.
double top_variance_fraction(const toylm::Lm& sensor, const scenes::Vocab& vocab,
                             const std::vector<scenes::SceneQA>& episodes, int k, int l_t,
                             int max_episodes = 200);

}  // namespace tokencom::harness
