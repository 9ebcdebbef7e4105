#include "tokencom/scenes/vocab.hpp"

#include <sstream>
#include <stdexcept>

#include "tokencom/scenes/scene.hpp"

namespace tokencom::scenes {

Vocab::Vocab() {
  // Answers first, in a fixed order: colors, digits, yes/no.
  for (int c = 0; c < kNumColors; ++c) words_.push_back(to_word(static_cast<Color>(c)));
  for (int d = 0; d <= 9; ++d) words_.push_back(std::to_string(d));
  words_.push_back("yes");
  words_.push_back("no");
  const int n_answers = static_cast<int>(words_.size());

  const char* rest[] = {
      // shapes and sizes
      "cube", "sphere", "cylinder", "small", "large",
      // question and template words
      "what", "color", "is", "the", "object", "objects", "at", "row", "column", "how", "many",
      "are", "there", "left", "above", "of", "a", "in", "scene", "colors", "counting",
      "positions", "whether", "exist", "question", "about",
      // verbalization extras
      ";", "empty",
      // answer cue
      "<ans>",
  };
  for (const char* w : rest) words_.push_back(w);

  for (int i = 0; i < static_cast<int>(words_.size()); ++i) {
    if (!index_.emplace(words_[static_cast<std::size_t>(i)], i).second) {
      throw std::logic_error("vocab: duplicate word '" + words_[static_cast<std::size_t>(i)] + "'");
    }
  }
  for (int i = 0; i < n_answers; ++i) answer_ids_.push_back(i);
  answer_marker_ = id("<ans>");
}

int Vocab::id(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) throw std::out_of_range("vocab: unknown word '" + word + "'");
  return it->second;
}

const std::string& Vocab::word(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("vocab: id " + std::to_string(id));
  return words_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::encode(const std::string& text) const {
  std::vector<int> ids;
  std::istringstream in(text);
  std::string w;
  while (in >> w) ids.push_back(id(w));
  return ids;
}

std::string Vocab::decode(std::span<const int> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += " ";
    out += word(ids[i]);
  }
  return out;
}

int Vocab::answer_index(const std::string& w) const {
  const int token = id(w);
  for (std::size_t i = 0; i < answer_ids_.size(); ++i)
    if (answer_ids_[i] == token) return static_cast<int>(i);
  throw std::out_of_range("vocab: '" + w + "' is not an answer token");
}

const std::string& Vocab::answer_word(int answer_idx) const {
  if (answer_idx < 0 || answer_idx >= answer_count()) {
    throw std::out_of_range("vocab: answer index " + std::to_string(answer_idx));
  }
  return word(answer_ids_[static_cast<std::size_t>(answer_idx)]);
}

}  // namespace tokencom::scenes
