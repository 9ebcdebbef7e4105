#pragma once

#include "tokencom/harness/eval.hpp"

namespace tokencom::harness {

// Accuracy vs SNR for every mode in cfg.sweep_modes, averaged over
// cfg.seeds. Trains missing checkpoints. Writes results/sweep_snr.csv and a
// matching SVG; returns the raw rows in write order.
std::vector<RunResult> sweep_snr(const RunConfig& cfg, const Paths& paths,
                                 const scenes::Dataset& data, const scenes::Vocab& vocab);

// Accuracy vs token count K (one training run per K) at 0 dB and 15 dB.
std::vector<RunResult> sweep_tokens(const RunConfig& cfg, const Paths& paths,
                                    const scenes::Dataset& data, const scenes::Vocab& vocab);

}  // namespace tokencom::harness
