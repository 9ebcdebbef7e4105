#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tokencom/numkit/rng.hpp"

namespace tokencom::scenes {

enum class Shape3 { cube, sphere, cylinder };
enum class Color { red, green, blue, yellow, gray, purple };
enum class ObjSize { small, large };
enum class Category { color, count, spatial, existence };

constexpr int kNumShapes = 3;
constexpr int kNumColors = 6;
constexpr int kNumSizes = 2;

const char* to_word(Shape3 s);
const char* to_word(Color c);
const char* to_word(ObjSize s);
const char* to_word(Category c);
Category category_from_word(const std::string& w);

struct SceneObject {
  int x = 0;  // column
  int y = 0;  // row
  Shape3 shape = Shape3::cube;
  Color color = Color::red;
  ObjSize size = ObjSize::small;
};

struct SceneSpec {
  int grid_w = 4;
  int grid_h = 4;
  std::vector<SceneObject> objects;  // sorted by cell index y*grid_w + x

  const SceneObject* at(int x, int y) const;
  int cell_index(const SceneObject& o) const { return o.y * grid_w + o.x; }
  void validate() const;  // throws std::invalid_argument on broken invariants
};

// Structured question form consumed by the symbolic evaluator.
struct Question {
  enum class Kind {
    color_at_cell,          // color of the object at (x, y)
    color_of_unique_shape,  // color of the single object with this shape
    count_all,
    count_shape,
    count_color,
    spatial_left,   // is referent 1 left of referent 2
    spatial_above,  // is referent 1 above referent 2
    exists_color_shape,
  };
  Kind kind = Kind::count_all;
  int x = 0, y = 0;
  Shape3 shape = Shape3::cube;
  Color color = Color::red;
  Shape3 shape2 = Shape3::cube;
  Color color2 = Color::red;
};

std::string question_text(const Question& q);
std::string serialize_question(const Question& q);
Question parse_question(const std::string& s);

struct SceneQA {
  SceneSpec scene;
  Question question;
  std::string detailed;  // full question text
  std::string vague;     // category-level obfuscation
  Category category = Category::color;
  std::string answer;    // single token from the closed answer vocabulary
  int info_rank = 1;     // distinct scene attributes needed to answer
};

struct GenConfig {
  int grid_w = 4;
  int grid_h = 4;
  int min_objects = 1;
  int max_objects = 5;
  int max_info_rank = 3;
};

// Category-level obfuscation templates; the category is named, attribute
// values never appear.
const char* vague_template(Category c);

SceneSpec gen_scene(numkit::RngStream& rng, const GenConfig& cfg);

// Returns nullopt when the category cannot be asked about this scene
// (e.g. spatial needs two uniquely identifiable objects).
std::optional<SceneQA> gen_question(const SceneSpec& scene, Category category,
                                    numkit::RngStream& rng, int max_info_rank);

// Exact symbolic evaluation; throws std::invalid_argument on a question that
// is malformed for the scene.
std::string answer_oracle(const SceneSpec& scene, const Question& q);

// Deterministic full-scene verbalization for the natural-language baseline.
std::string describe_scene_text(const SceneSpec& scene);

// Canonical textual record (objects sorted by cell index); used for hashing
// and split-disjointness checks.
std::string serialize_scene(const SceneSpec& scene);
SceneSpec parse_scene(const std::string& s);

}  // namespace tokencom::scenes
