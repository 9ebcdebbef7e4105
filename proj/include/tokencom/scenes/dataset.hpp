#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tokencom/scenes/scene.hpp"

namespace tokencom::scenes {

struct DataConfig {
  GenConfig gen;
  int train_size = 5000;
  int test_size = 1000;
};

struct Dataset {
  std::vector<SceneQA> train;
  std::vector<SceneQA> test;
};

// Category-balanced generation with disjoint scene content across splits
// (no scene serialization appears in both). Every record is self-checked
// against the symbolic evaluator.
Dataset generate_dataset(std::uint64_t seed, const DataConfig& cfg);

// Line-delimited records, one SceneQA per line, tab-separated fields in this
// order: scene, category, question, detailed, vague, answer, info_rank.
void write_records(const std::filesystem::path& path, const std::vector<SceneQA>& records);
std::vector<SceneQA> read_records(const std::filesystem::path& path);

}  // namespace tokencom::scenes
