#include "tokencom/scenes/scene.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace tokencom::scenes {

namespace {

const char* kShapeWords[kNumShapes] = {"cube", "sphere", "cylinder"};
const char* kColorWords[kNumColors] = {"red", "green", "blue", "yellow", "gray", "purple"};
const char* kSizeWords[kNumSizes] = {"small", "large"};
const char* kCategoryWords[4] = {"color", "count", "spatial", "existence"};

template <typename E>
E from_word(const std::string& w, const char* const* words, int n, const char* what) {
  for (int i = 0; i < n; ++i)
    if (w == words[i]) return static_cast<E>(i);
  throw std::invalid_argument(std::string("unknown ") + what + " '" + w + "'");
}

}  // namespace

const char* to_word(Shape3 s) { return kShapeWords[static_cast<int>(s)]; }
const char* to_word(Color c) { return kColorWords[static_cast<int>(c)]; }
const char* to_word(ObjSize s) { return kSizeWords[static_cast<int>(s)]; }
const char* to_word(Category c) { return kCategoryWords[static_cast<int>(c)]; }

Category category_from_word(const std::string& w) {
  return from_word<Category>(w, kCategoryWords, 4, "category");
}

const SceneObject* SceneSpec::at(int x, int y) const {
  for (const auto& o : objects)
    if (o.x == x && o.y == y) return &o;
  return nullptr;
}

void SceneSpec::validate() const {
  if (grid_w < 1 || grid_h < 1) throw std::invalid_argument("scene: empty grid");
  if (objects.empty() || static_cast<int>(objects.size()) > grid_w * grid_h) {
    throw std::invalid_argument("scene: object count " + std::to_string(objects.size()) +
                                " outside [1, " + std::to_string(grid_w * grid_h) + "]");
  }
  int prev = -1;
  for (const auto& o : objects) {
    if (o.x < 0 || o.x >= grid_w || o.y < 0 || o.y >= grid_h) {
      throw std::invalid_argument("scene: object outside grid");
    }
    const int idx = cell_index(o);
    if (idx <= prev) throw std::invalid_argument("scene: objects not sorted or cell reused");
    prev = idx;
  }
}

const char* vague_template(Category c) {
  switch (c) {
    case Category::color:
      return "a question about the colors of objects in the scene";
    case Category::count:
      return "a question about counting objects in the scene";
    case Category::spatial:
      return "a question about the positions of objects in the scene";
    case Category::existence:
      return "a question about whether objects exist in the scene";
  }
  throw std::invalid_argument("unknown category");
}

SceneSpec gen_scene(numkit::RngStream& rng, const GenConfig& cfg) {
  if (cfg.min_objects < 1 || cfg.max_objects < cfg.min_objects ||
      cfg.max_objects > cfg.grid_w * cfg.grid_h) {
    throw std::invalid_argument("gen_scene: bad object bounds");
  }
  SceneSpec scene;
  scene.grid_w = cfg.grid_w;
  scene.grid_h = cfg.grid_h;
  const int count = rng.uniform_int(cfg.min_objects, cfg.max_objects);
  std::vector<int> cells(static_cast<std::size_t>(cfg.grid_w) * cfg.grid_h);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  // Partial Fisher-Yates: uniform placement without collision.
  for (int i = 0; i < count; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(cells.size()) - 1);
    std::swap(cells[i], cells[j]);
  }
  for (int i = 0; i < count; ++i) {
    SceneObject o;
    o.x = cells[i] % cfg.grid_w;
    o.y = cells[i] / cfg.grid_w;
    o.shape = static_cast<Shape3>(rng.uniform_int(0, kNumShapes - 1));
    o.color = static_cast<Color>(rng.uniform_int(0, kNumColors - 1));
    o.size = static_cast<ObjSize>(rng.uniform_int(0, kNumSizes - 1));
    scene.objects.push_back(o);
  }
  std::sort(scene.objects.begin(), scene.objects.end(),
            [&](const SceneObject& a, const SceneObject& b) {
              return scene.cell_index(a) < scene.cell_index(b);
            });
  scene.validate();
  return scene;
}

std::string question_text(const Question& q) {
  std::ostringstream t;
  switch (q.kind) {
    case Question::Kind::color_at_cell:
      t << "what color is the object at row " << q.y << " column " << q.x;
      break;
    case Question::Kind::color_of_unique_shape:
      t << "what color is the " << to_word(q.shape);
      break;
    case Question::Kind::count_all:
      t << "how many objects are there";
      break;
    case Question::Kind::count_shape:
      t << "how many " << to_word(q.shape) << " objects are there";
      break;
    case Question::Kind::count_color:
      t << "how many " << to_word(q.color) << " objects are there";
      break;
    case Question::Kind::spatial_left:
      t << "is the " << to_word(q.color) << " " << to_word(q.shape) << " left of the "
        << to_word(q.color2) << " " << to_word(q.shape2);
      break;
    case Question::Kind::spatial_above:
      t << "is the " << to_word(q.color) << " " << to_word(q.shape) << " above the "
        << to_word(q.color2) << " " << to_word(q.shape2);
      break;
    case Question::Kind::exists_color_shape:
      t << "is there a " << to_word(q.color) << " " << to_word(q.shape) << " in the scene";
      break;
  }
  return t.str();
}

std::string serialize_question(const Question& q) {
  std::ostringstream t;
  switch (q.kind) {
    case Question::Kind::color_at_cell:
      t << "color_at_cell " << q.x << " " << q.y;
      break;
    case Question::Kind::color_of_unique_shape:
      t << "color_of_unique_shape " << to_word(q.shape);
      break;
    case Question::Kind::count_all:
      t << "count_all";
      break;
    case Question::Kind::count_shape:
      t << "count_shape " << to_word(q.shape);
      break;
    case Question::Kind::count_color:
      t << "count_color " << to_word(q.color);
      break;
    case Question::Kind::spatial_left:
      t << "spatial_left " << to_word(q.color) << " " << to_word(q.shape) << " "
        << to_word(q.color2) << " " << to_word(q.shape2);
      break;
    case Question::Kind::spatial_above:
      t << "spatial_above " << to_word(q.color) << " " << to_word(q.shape) << " "
        << to_word(q.color2) << " " << to_word(q.shape2);
      break;
    case Question::Kind::exists_color_shape:
      t << "exists_color_shape " << to_word(q.color) << " " << to_word(q.shape);
      break;
  }
  return t.str();
}

Question parse_question(const std::string& s) {
  std::istringstream in(s);
  std::string kind;
  in >> kind;
  Question q;
  auto shape_of = [](const std::string& w) {
    return from_word<Shape3>(w, kShapeWords, kNumShapes, "shape");
  };
  auto color_of = [](const std::string& w) {
    return from_word<Color>(w, kColorWords, kNumColors, "color");
  };
  std::string a, b, c, d;
  if (kind == "color_at_cell") {
    q.kind = Question::Kind::color_at_cell;
    in >> q.x >> q.y;
  } else if (kind == "color_of_unique_shape") {
    q.kind = Question::Kind::color_of_unique_shape;
    in >> a;
    q.shape = shape_of(a);
  } else if (kind == "count_all") {
    q.kind = Question::Kind::count_all;
  } else if (kind == "count_shape") {
    q.kind = Question::Kind::count_shape;
    in >> a;
    q.shape = shape_of(a);
  } else if (kind == "count_color") {
    q.kind = Question::Kind::count_color;
    in >> a;
    q.color = color_of(a);
  } else if (kind == "spatial_left" || kind == "spatial_above") {
    q.kind = (kind == "spatial_left") ? Question::Kind::spatial_left : Question::Kind::spatial_above;
    in >> a >> b >> c >> d;
    q.color = color_of(a);
    q.shape = shape_of(b);
    q.color2 = color_of(c);
    q.shape2 = shape_of(d);
  } else if (kind == "exists_color_shape") {
    q.kind = Question::Kind::exists_color_shape;
    in >> a >> b;
    q.color = color_of(a);
    q.shape = shape_of(b);
  } else {
    throw std::invalid_argument("parse_question: unknown kind '" + kind + "'");
  }
  if (in.fail()) throw std::invalid_argument("parse_question: malformed '" + s + "'");
  return q;
}

namespace {

const SceneObject* find_unique(const SceneSpec& scene, Color c, Shape3 s) {
  const SceneObject* found = nullptr;
  for (const auto& o : scene.objects) {
    if (o.color == c && o.shape == s) {
      if (found) return nullptr;
      found = &o;
    }
  }
  return found;
}

}  // namespace

std::string answer_oracle(const SceneSpec& scene, const Question& q) {
  scene.validate();
  switch (q.kind) {
    case Question::Kind::color_at_cell: {
      const SceneObject* o = scene.at(q.x, q.y);
      if (!o) throw std::invalid_argument("answer_oracle: no object at the queried cell");
      return to_word(o->color);
    }
    case Question::Kind::color_of_unique_shape: {
      const SceneObject* found = nullptr;
      for (const auto& o : scene.objects) {
        if (o.shape == q.shape) {
          if (found) throw std::invalid_argument("answer_oracle: shape referent not unique");
          found = &o;
        }
      }
      if (!found) throw std::invalid_argument("answer_oracle: shape absent");
      return to_word(found->color);
    }
    case Question::Kind::count_all:
      return std::to_string(scene.objects.size());
    case Question::Kind::count_shape: {
      int n = 0;
      for (const auto& o : scene.objects) n += (o.shape == q.shape);
      return std::to_string(n);
    }
    case Question::Kind::count_color: {
      int n = 0;
      for (const auto& o : scene.objects) n += (o.color == q.color);
      return std::to_string(n);
    }
    case Question::Kind::spatial_left:
    case Question::Kind::spatial_above: {
      const SceneObject* a = find_unique(scene, q.color, q.shape);
      const SceneObject* b = find_unique(scene, q.color2, q.shape2);
      if (!a || !b) throw std::invalid_argument("answer_oracle: spatial referent not unique");
      const bool yes = (q.kind == Question::Kind::spatial_left) ? (a->x < b->x) : (a->y < b->y);
      return yes ? "yes" : "no";
    }
    case Question::Kind::exists_color_shape: {
      for (const auto& o : scene.objects)
        if (o.color == q.color && o.shape == q.shape) return "yes";
      return "no";
    }
  }
  throw std::invalid_argument("answer_oracle: unknown question kind");
}

std::optional<SceneQA> gen_question(const SceneSpec& scene, Category category,
                                    numkit::RngStream& rng, int max_info_rank) {
  scene.validate();
  Question q;
  int rank = 1;
  switch (category) {
    case Category::color: {
      // Unique-shape referent when one exists, otherwise a cell address.
      std::vector<Shape3> unique_shapes;
      for (int s = 0; s < kNumShapes; ++s) {
        int n = 0;
        for (const auto& o : scene.objects) n += (o.shape == static_cast<Shape3>(s));
        if (n == 1) unique_shapes.push_back(static_cast<Shape3>(s));
      }
      if (!unique_shapes.empty() && rng.uniform() < 0.5) {
        q.kind = Question::Kind::color_of_unique_shape;
        q.shape = unique_shapes[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(unique_shapes.size()) - 1))];
      } else {
        const auto& o = scene.objects[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(scene.objects.size()) - 1))];
        q.kind = Question::Kind::color_at_cell;
        q.x = o.x;
        q.y = o.y;
      }
      rank = 1;
      break;
    }
    case Category::count: {
      // Try subtypes until the touched-object count fits the rank budget.
      bool placed = false;
      for (int attempt = 0; attempt < 16 && !placed; ++attempt) {
        const int pick = rng.uniform_int(0, 2);
        Question cand;
        int touched = 0;
        if (pick == 0) {
          cand.kind = Question::Kind::count_all;
          touched = static_cast<int>(scene.objects.size());
        } else if (pick == 1) {
          cand.kind = Question::Kind::count_shape;
          cand.shape = static_cast<Shape3>(rng.uniform_int(0, kNumShapes - 1));
          for (const auto& o : scene.objects) touched += (o.shape == cand.shape);
        } else {
          cand.kind = Question::Kind::count_color;
          cand.color = static_cast<Color>(rng.uniform_int(0, kNumColors - 1));
          for (const auto& o : scene.objects) touched += (o.color == cand.color);
        }
        if (max_info_rank <= 0 || touched <= max_info_rank) {
          q = cand;
          rank = std::max(1, touched);
          placed = true;
        }
      }
      if (!placed) return std::nullopt;
      break;
    }
    case Category::spatial: {
      std::vector<const SceneObject*> unique;
      for (const auto& o : scene.objects)
        if (find_unique(scene, o.color, o.shape) == &o) unique.push_back(&o);
      if (unique.size() < 2) return std::nullopt;
      const int i = rng.uniform_int(0, static_cast<int>(unique.size()) - 1);
      int j = rng.uniform_int(0, static_cast<int>(unique.size()) - 2);
      if (j >= i) ++j;
      q.kind = rng.uniform() < 0.5 ? Question::Kind::spatial_left : Question::Kind::spatial_above;
      q.color = unique[static_cast<std::size_t>(i)]->color;
      q.shape = unique[static_cast<std::size_t>(i)]->shape;
      q.color2 = unique[static_cast<std::size_t>(j)]->color;
      q.shape2 = unique[static_cast<std::size_t>(j)]->shape;
      rank = 2;
      break;
    }
    case Category::existence: {
      q.kind = Question::Kind::exists_color_shape;
      if (rng.uniform() < 0.5) {
        const auto& o = scene.objects[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(scene.objects.size()) - 1))];
        q.color = o.color;
        q.shape = o.shape;
      } else {
        // Fewer objects than color-shape pairs, so an absent pair exists.
        for (int attempt = 0;; ++attempt) {
          q.color = static_cast<Color>(rng.uniform_int(0, kNumColors - 1));
          q.shape = static_cast<Shape3>(rng.uniform_int(0, kNumShapes - 1));
          bool present = false;
          for (const auto& o : scene.objects)
            present = present || (o.color == q.color && o.shape == q.shape);
          if (!present) break;
          if (attempt > 256) return std::nullopt;
        }
      }
      rank = 1;
      break;
    }
  }
  if (max_info_rank > 0 && rank > max_info_rank) return std::nullopt;

  SceneQA qa;
  qa.scene = scene;
  qa.question = q;
  qa.detailed = question_text(q);
  qa.vague = vague_template(category);
  qa.category = category;
  qa.answer = answer_oracle(scene, q);
  qa.info_rank = rank;
  return qa;
}

std::string describe_scene_text(const SceneSpec& scene) {
  if (scene.objects.empty()) return "the scene is empty";
  std::ostringstream t;
  bool first = true;
  for (const auto& o : scene.objects) {
    if (!first) t << " ; ";
    first = false;
    t << to_word(o.size) << " " << to_word(o.color) << " " << to_word(o.shape) << " at row "
      << o.y << " column " << o.x;
  }
  return t.str();
}

std::string serialize_scene(const SceneSpec& scene) {
  std::ostringstream t;
  t << scene.grid_w << "x" << scene.grid_h;
  for (const auto& o : scene.objects) {
    t << "|" << o.x << "," << o.y << ":" << to_word(o.size) << " " << to_word(o.color) << " "
      << to_word(o.shape);
  }
  return t.str();
}

SceneSpec parse_scene(const std::string& s) {
  SceneSpec scene;
  std::istringstream in(s);
  std::string head;
  if (!std::getline(in, head, '|')) throw std::invalid_argument("parse_scene: empty record");
  if (std::sscanf(head.c_str(), "%dx%d", &scene.grid_w, &scene.grid_h) != 2) {
    throw std::invalid_argument("parse_scene: bad grid '" + head + "'");
  }
  std::string part;
  while (std::getline(in, part, '|')) {
    SceneObject o;
    char size[16], color[16], shape[16];
    if (std::sscanf(part.c_str(), "%d,%d:%15s %15s %15s", &o.x, &o.y, size, color, shape) != 5) {
      throw std::invalid_argument("parse_scene: bad object '" + part + "'");
    }
    o.size = from_word<ObjSize>(size, kSizeWords, kNumSizes, "size");
    o.color = from_word<Color>(color, kColorWords, kNumColors, "color");
    o.shape = from_word<Shape3>(shape, kShapeWords, kNumShapes, "shape");
    scene.objects.push_back(o);
  }
  scene.validate();
  return scene;
}

}  // namespace tokencom::scenes
