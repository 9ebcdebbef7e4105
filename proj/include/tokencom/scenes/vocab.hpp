#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tokencom::scenes {

// Word-level vocabulary over the synthetic task's closed language: question
// templates, scene verbalization, answers, and the answer-cue marker. Fixed
// at construction; the same instance serves both agents.
class Vocab {
 public:
  Vocab();

  int size() const { return static_cast<int>(words_.size()); }
  int id(const std::string& word) const;  // throws on unknown word
  const std::string& word(int id) const;

  std::vector<int> encode(const std::string& text) const;  // whitespace-split
  std::string decode(std::span<const int> ids) const;

  // Closed answer vocabulary: 6 colors, digits 0-9, yes, no.
  const std::vector<int>& answer_ids() const { return answer_ids_; }
  int answer_count() const { return static_cast<int>(answer_ids_.size()); }
  // Position of a word within the answer vocabulary; throws when the word is
  // not a legal answer.
  int answer_index(const std::string& word) const;
  const std::string& answer_word(int answer_idx) const;

  // Marker token placed where the answer is queried/predicted.
  int answer_marker() const { return answer_marker_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> answer_ids_;
  int answer_marker_ = 0;
};

}  // namespace tokencom::scenes
