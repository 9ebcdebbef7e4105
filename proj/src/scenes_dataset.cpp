#include "tokencom/scenes/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace tokencom::scenes {

namespace {

std::vector<SceneQA> generate_split(numkit::RngStream& rng, const DataConfig& cfg, int size,
                                    const std::unordered_set<std::string>* exclude,
                                    std::unordered_set<std::string>* seen_out) {
  std::vector<SceneQA> out;
  out.reserve(static_cast<std::size_t>(size));
  const Category cats[4] = {Category::color, Category::count, Category::spatial,
                            Category::existence};
  for (int i = 0; i < size; ++i) {
    const Category cat = cats[i % 4];
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw std::runtime_error("dataset: generation stuck");
      SceneSpec scene = gen_scene(rng, cfg.gen);
      const std::string key = serialize_scene(scene);
      if (exclude && exclude->count(key)) continue;
      auto qa = gen_question(scene, cat, rng, cfg.gen.max_info_rank);
      if (!qa) continue;  // category unanswerable for this scene, redraw
      if (answer_oracle(qa->scene, qa->question) != qa->answer) {
        throw std::logic_error("dataset: self-check failed");
      }
      if (seen_out) seen_out->insert(key);
      out.push_back(std::move(*qa));
      break;
    }
  }
  return out;
}

}  // namespace

Dataset generate_dataset(std::uint64_t seed, const DataConfig& cfg) {
  if (cfg.train_size < 1 || cfg.test_size < 1) {
    throw std::invalid_argument("dataset: split sizes must be positive");
  }
  Dataset ds;
  std::unordered_set<std::string> train_scenes;
  numkit::RngStream rng_train(seed, "data-train");
  ds.train = generate_split(rng_train, cfg, cfg.train_size, nullptr, &train_scenes);
  numkit::RngStream rng_test(seed, "data-test");
  ds.test = generate_split(rng_test, cfg, cfg.test_size, &train_scenes, nullptr);
  return ds;
}

void write_records(const std::filesystem::path& path, const std::vector<SceneQA>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("dataset: cannot open for write: " + path.string());
  for (const auto& qa : records) {
    out << serialize_scene(qa.scene) << "\t" << to_word(qa.category) << "\t"
        << serialize_question(qa.question) << "\t" << qa.detailed << "\t" << qa.vague << "\t"
        << qa.answer << "\t" << qa.info_rank << "\n";
  }
  if (!out) throw std::runtime_error("dataset: write failed: " + path.string());
}

std::vector<SceneQA> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open: " + path.string());
  std::vector<SceneQA> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string scene, category, question, detailed, vague, answer, rank;
    if (!std::getline(ls, scene, '\t') || !std::getline(ls, category, '\t') ||
        !std::getline(ls, question, '\t') || !std::getline(ls, detailed, '\t') ||
        !std::getline(ls, vague, '\t') || !std::getline(ls, answer, '\t') ||
        !std::getline(ls, rank, '\t')) {
      throw std::runtime_error("dataset: malformed record '" + line + "'");
    }
    SceneQA qa;
    qa.scene = parse_scene(scene);
    qa.category = category_from_word(category);
    qa.question = parse_question(question);
    qa.detailed = detailed;
    qa.vague = vague;
    qa.answer = answer;
    qa.info_rank = std::stoi(rank);
    out.push_back(std::move(qa));
  }
  return out;
}

}  // namespace tokencom::scenes
