#include "tokencom/harness/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tokencom::harness {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::proposed: return "proposed";
    case Mode::bench1: return "bench1";
    case Mode::bench3: return "bench3";
    case Mode::bench4: return "bench4";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "proposed") return Mode::proposed;
  if (s == "bench1") return Mode::bench1;
  if (s == "bench3") return Mode::bench3;
  if (s == "bench4") return Mode::bench4;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

ofat::ChannelConfig RunConfig::channel(double at_snr_db) const {
  ofat::ChannelConfig c;
  c.a_t = a_t;
  c.a_r = a_r;
  c.k_c = k_c;
  c.snr_db = at_snr_db;
  return c;
}

int max_question_words() {
  // "what color is the object at row R column C" is the longest template.
  return 10;
}

int max_describe_words(const scenes::GenConfig& gen) {
  // 8 words per object clause plus one ";" between clauses.
  return gen.max_objects * 8 + (gen.max_objects - 1);
}

void RunConfig::validate(const scenes::Vocab& vocab) const {
  sensor.validate();
  task.validate();
  if (sensor.vocab_size != vocab.size() || task.vocab_size != vocab.size()) {
    throw std::invalid_argument("config: model vocab_size must match the task vocabulary (" +
                                std::to_string(vocab.size()) + ")");
  }
  if (k < 1) throw std::invalid_argument("config: K must be >= 1");
  if (l_t < 1 || l_t >= sensor.l_emb) {
    throw std::invalid_argument("config: L_t must satisfy 1 <= L_t < L_emb");
  }
  if (a_t < 1 || a_r < 1 || k_c < 1) {
    throw std::invalid_argument("config: A_t, A_r, K_c must be >= 1");
  }
  if (a_r < a_t && !allow_ridge_fallback) {
    throw std::invalid_argument(
        "config: A_r < A_t requires allow_ridge_fallback = true (ridge recovery)");
  }
  if (data.train_size < 1 || data.test_size < 1) {
    throw std::invalid_argument("config: split sizes must be positive");
  }
  if (train.steps < 1 || train.batch < 1 || train.pretrain_steps < 0 || train.pretrain_batch < 1) {
    throw std::invalid_argument("config: training extents must be positive");
  }
  if (train.optimizer != "adam" && train.optimizer != "sgd") {
    throw std::invalid_argument("config: train.optimizer must be adam or sgd");
  }
  if (train.lr <= 0 || train.pretrain_lr <= 0) {
    throw std::invalid_argument("config: learning rates must be positive");
  }
  if (train.pretrain_answer_weight < 1) {
    throw std::invalid_argument("config: pretrain_answer_weight must be >= 1");
  }
  if (train.lambda < 0) throw std::invalid_argument("config: lambda must be >= 0");
  if (seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
  if (sweep_snr.empty() || sweep_tokens.empty() || sweep_modes.empty()) {
    throw std::invalid_argument("config: sweep lists must be non-empty");
  }

  // Sequence budgets, checked for the largest swept K as well.
  int max_k = k;
  for (int kk : sweep_tokens) max_k = std::max(max_k, kk);
  if (max_k < 1) throw std::invalid_argument("config: swept K must be >= 1");
  const int vague_words = [&] {
    int worst = 0;
    for (auto c : {scenes::Category::color, scenes::Category::count, scenes::Category::spatial,
                   scenes::Category::existence}) {
      worst = std::max(worst, static_cast<int>(vocab.encode(scenes::vague_template(c)).size()));
    }
    return worst;
  }();
  const int cells = data.gen.grid_w * data.gen.grid_h;
  if (vague_words + cells > sensor.max_seq) {
    throw std::invalid_argument("config: vague text + scene tokens (" +
                                std::to_string(vague_words + cells) + ") exceed sensor max_seq " +
                                std::to_string(sensor.max_seq));
  }
  if (max_k + max_question_words() + 1 > task.max_seq) {
    throw std::invalid_argument("config: K + detailed question + answer slot (" +
                                std::to_string(max_k + max_question_words() + 1) +
                                ") exceed task max_seq " + std::to_string(task.max_seq));
  }
  if (max_describe_words(data.gen) + max_question_words() + 2 > task.max_seq) {
    throw std::invalid_argument("config: verbalized scene + question does not fit max_seq " +
                                std::to_string(task.max_seq));
  }
  if (cells + max_question_words() + 1 > task.max_seq) {
    throw std::invalid_argument("config: scene tokens + question do not fit task max_seq");
  }
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s << ",";
    s << v[i];
  }
  return s.str();
}

template <typename T>
std::string join_ints(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s << ",";
    s << v[i];
  }
  return s.str();
}

std::string join_modes(const std::vector<Mode>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s << ",";
    s << to_string(v[i]);
  }
  return s.str();
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "mode = " << to_string(mode) << "\n";
  s << "seed = " << seed << "\n";
  s << "seeds = " << join_ints(seeds) << "\n";
  s << "K = " << k << "\n";
  s << "L_t = " << l_t << "\n";
  s << "A_t = " << a_t << "\n";
  s << "A_r = " << a_r << "\n";
  s << "K_c = " << k_c << "\n";
  s << "snr_db = " << snr_db << "\n";
  s << "allow_ridge_fallback = " << (allow_ridge_fallback ? 1 : 0) << "\n";
  auto model = [&s](const char* name, const toylm::LmConfig& m) {
    s << "model." << name << ".L_emb = " << m.l_emb << "\n";
    s << "model." << name << ".n_blocks = " << m.n_blocks << "\n";
    s << "model." << name << ".n_heads = " << m.n_heads << "\n";
    s << "model." << name << ".max_seq = " << m.max_seq << "\n";
    s << "model." << name << ".lora_rank = " << m.lora_rank << "\n";
  };
  model("sensor", sensor);
  model("task", task);
  s << "train.optimizer = " << train.optimizer << "\n";
  s << "train.steps = " << train.steps << "\n";
  s << "train.batch = " << train.batch << "\n";
  s << "train.lr = " << train.lr << "\n";
  s << "train.momentum = " << train.momentum << "\n";
  s << "train.lambda = " << train.lambda << "\n";
  s << "train.freeze_task_model = " << (train.freeze_task_model ? 1 : 0) << "\n";
  s << "train.pretrain_steps = " << train.pretrain_steps << "\n";
  s << "train.pretrain_batch = " << train.pretrain_batch << "\n";
  s << "train.pretrain_lr = " << train.pretrain_lr << "\n";
  s << "train.pretrain_answer_weight = " << train.pretrain_answer_weight << "\n";
  s << "data.train_size = " << data.train_size << "\n";
  s << "data.test_size = " << data.test_size << "\n";
  s << "data.grid_w = " << data.gen.grid_w << "\n";
  s << "data.grid_h = " << data.gen.grid_h << "\n";
  s << "data.min_objects = " << data.gen.min_objects << "\n";
  s << "data.max_objects = " << data.gen.max_objects << "\n";
  s << "data.max_info_rank = " << data.gen.max_info_rank << "\n";
  s << "sweep.snr_db = " << join_doubles(sweep_snr) << "\n";
  s << "sweep.tokens = " << join_ints(sweep_tokens) << "\n";
  s << "sweep.modes = " << join_modes(sweep_modes) << "\n";
  s << "eval.dump_traces = " << (dump_traces ? 1 : 0) << "\n";
  return s.str();
}

namespace {

std::uint64_t fnv1a(const std::string& c) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char ch : c) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::uint64_t RunConfig::config_hash() const { return fnv1a(canonical()); }

std::uint64_t RunConfig::train_hash() const {
  std::ostringstream s;
  auto model = [&s](const char* name, const toylm::LmConfig& m) {
    s << name << ":" << m.vocab_size << "," << m.l_emb << "," << m.n_blocks << "," << m.n_heads
      << "," << m.max_seq << "," << m.lora_rank << ";";
  };
  model("sensor", sensor);
  model("task", task);
  s << "lt:" << l_t << ";chan:" << a_t << "," << a_r << "," << k_c << ","
    << allow_ridge_fallback << ";";
  s << "train:" << train.optimizer << "," << train.steps << "," << train.batch << "," << train.lr << "," << train.momentum
    << "," << train.lambda << "," << train.freeze_task_model << "," << train.pretrain_steps << ","
    << train.pretrain_batch << "," << train.pretrain_lr << ","
    << train.pretrain_answer_weight << ";";
  s << "data:" << data.train_size << "," << data.test_size << "," << data.gen.grid_w << ","
    << data.gen.grid_h << "," << data.gen.min_objects << "," << data.gen.max_objects << ","
    << data.gen.max_info_rank << ";";
  double lo = sweep_snr.front(), hi = sweep_snr.front();
  for (double v : sweep_snr) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  s << "snr:" << lo << "," << hi;
  return fnv1a(s.str());
}

RunConfig default_config(const scenes::Vocab& vocab) {
  RunConfig cfg;
  cfg.sensor.vocab_size = vocab.size();
  cfg.task.vocab_size = vocab.size();
  return cfg;
}

namespace {

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(v);
  while (std::getline(in, cur, ',')) {
    // trim
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto model_field = [&](toylm::LmConfig& m, const std::string& field) {
    if (field == "L_emb") m.l_emb = to_int(key, value);
    else if (field == "n_blocks") m.n_blocks = to_int(key, value);
    else if (field == "n_heads") m.n_heads = to_int(key, value);
    else if (field == "max_seq") m.max_seq = to_int(key, value);
    else if (field == "lora_rank") m.lora_rank = to_int(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  };

  if (key == "mode") cfg.mode = mode_from_string(value);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
  else if (key == "seeds") {
    cfg.seeds.clear();
    for (auto& s : split_list(value)) cfg.seeds.push_back(std::stoull(s));
  } else if (key == "K") cfg.k = to_int(key, value);
  else if (key == "L_t") cfg.l_t = to_int(key, value);
  else if (key == "A_t") cfg.a_t = to_int(key, value);
  else if (key == "A_r") cfg.a_r = to_int(key, value);
  else if (key == "K_c") cfg.k_c = to_int(key, value);
  else if (key == "snr_db") cfg.snr_db = to_double(key, value);
  else if (key == "allow_ridge_fallback") cfg.allow_ridge_fallback = to_bool(key, value);
  else if (key.rfind("model.sensor.", 0) == 0) model_field(cfg.sensor, key.substr(13));
  else if (key.rfind("model.task.", 0) == 0) model_field(cfg.task, key.substr(11));
  else if (key == "train.optimizer") cfg.train.optimizer = value;
  else if (key == "train.steps") cfg.train.steps = to_int(key, value);
  else if (key == "train.batch") cfg.train.batch = to_int(key, value);
  else if (key == "train.lr") cfg.train.lr = to_double(key, value);
  else if (key == "train.momentum") cfg.train.momentum = to_double(key, value);
  else if (key == "train.lambda") cfg.train.lambda = to_double(key, value);
  else if (key == "train.freeze_task_model") cfg.train.freeze_task_model = to_bool(key, value);
  else if (key == "train.pretrain_steps") cfg.train.pretrain_steps = to_int(key, value);
  else if (key == "train.pretrain_batch") cfg.train.pretrain_batch = to_int(key, value);
  else if (key == "train.pretrain_lr") cfg.train.pretrain_lr = to_double(key, value);
  else if (key == "train.pretrain_answer_weight")
    cfg.train.pretrain_answer_weight = to_double(key, value);
  else if (key == "data.train_size") cfg.data.train_size = to_int(key, value);
  else if (key == "data.test_size") cfg.data.test_size = to_int(key, value);
  else if (key == "data.grid_w") cfg.data.gen.grid_w = to_int(key, value);
  else if (key == "data.grid_h") cfg.data.gen.grid_h = to_int(key, value);
  else if (key == "data.min_objects") cfg.data.gen.min_objects = to_int(key, value);
  else if (key == "data.max_objects") cfg.data.gen.max_objects = to_int(key, value);
  else if (key == "data.max_info_rank") cfg.data.gen.max_info_rank = to_int(key, value);
  else if (key == "sweep.snr_db") {
    cfg.sweep_snr.clear();
    for (auto& s : split_list(value)) cfg.sweep_snr.push_back(to_double(key, s));
  } else if (key == "sweep.tokens") {
    cfg.sweep_tokens.clear();
    for (auto& s : split_list(value)) cfg.sweep_tokens.push_back(to_int(key, s));
  } else if (key == "sweep.modes") {
    cfg.sweep_modes.clear();
    for (auto& s : split_list(value)) cfg.sweep_modes.push_back(mode_from_string(s));
  } else if (key == "eval.dump_traces") cfg.dump_traces = to_bool(key, value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace

RunConfig load_config(const std::string& path_or_default, const scenes::Vocab& vocab) {
  RunConfig cfg = default_config(vocab);
  if (path_or_default == "default") return cfg;

  std::ifstream in(path_or_default);
  if (!in) throw std::runtime_error("config: cannot open '" + path_or_default + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value");
    }
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      if (x == std::string::npos) return std::string();
      const auto y = s.find_last_not_of(" \t\r");
      return s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " malformed");
    }
    apply_key(cfg, key, value);
  }
  // Vocabulary size is owned by the corpus, never by the file.
  cfg.sensor.vocab_size = vocab.size();
  cfg.task.vocab_size = vocab.size();
  return cfg;
}

void Paths::ensure() const {
  std::filesystem::create_directories(data_dir());
  std::filesystem::create_directories(ckpt_dir());
  std::filesystem::create_directories(results_dir());
}

void write_manifest(const Paths& paths, const RunConfig& cfg) {
  std::ofstream out(paths.manifest_file(), std::ios::trunc);
  if (!out) throw std::runtime_error("manifest: cannot write " + paths.manifest_file().string());
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(cfg.config_hash()));
  out << "config_hash " << hex << "\n";
  out << "seed " << cfg.seed << "\n";
  out << "seeds";
  for (auto s : cfg.seeds) out << " " << s;
  out << "\n";
}

}  // namespace tokencom::harness
