#include "tokencom/numkit/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tokencom::numkit {

namespace {

constexpr const char* kMagic = "tokencom-ckpt v1";

void put_f32_le(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  out.push_back(static_cast<char>(bits & 0xFF));
  out.push_back(static_cast<char>((bits >> 8) & 0xFF));
  out.push_back(static_cast<char>((bits >> 16) & 0xFF));
  out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

void Checkpoint::put(const std::string& name, const Tensor& t) {
  put_raw(name, t.shape(), t.data());
}

void Checkpoint::put_raw(const std::string& name, std::vector<int> shape,
                         std::vector<float> data) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
    throw std::invalid_argument("checkpoint: bad tensor name '" + name + "'");
  }
  if (has(name)) throw std::invalid_argument("checkpoint: duplicate tensor '" + name + "'");
  if (numel(shape) != static_cast<std::int64_t>(data.size())) {
    throw std::invalid_argument("checkpoint: data/shape mismatch for '" + name + "'");
  }
  entries_.push_back(Entry{name, std::move(shape), std::move(data)});
}

bool Checkpoint::has(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return true;
  return false;
}

const Checkpoint::Entry& Checkpoint::get(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw std::runtime_error("checkpoint manifest: missing tensor '" + name + "'");
}

Tensor Checkpoint::tensor(const std::string& name, bool requires_grad) const {
  const Entry& e = get(name);
  return Tensor::from_data(e.shape, e.data, requires_grad);
}

void Checkpoint::load_into(const std::string& name, Tensor& t) const {
  const Entry& e = get(name);
  if (e.shape != t.shape()) {
    throw std::runtime_error("checkpoint manifest: tensor '" + name + "' has shape " +
                             shape_str(e.shape) + ", expected " + shape_str(t.shape()));
  }
  t.data_mut() = e.data;
}

void Checkpoint::write(const std::filesystem::path& path) const {
  std::ostringstream manifest;
  manifest << kMagic << "\n";
  manifest << "tensors " << entries_.size() << "\n";
  for (const auto& e : entries_) {
    manifest << e.name << " f32 " << e.shape.size();
    for (int d : e.shape) manifest << " " << d;
    manifest << "\n";
  }
  manifest << "payload\n";

  std::string payload;
  std::size_t total = 0;
  for (const auto& e : entries_) total += e.data.size();
  payload.reserve(total * 4);
  for (const auto& e : entries_)
    for (float v : e.data) put_f32_le(payload, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open for write: " + path.string());
  const std::string m = manifest.str();
  out.write(m.data(), static_cast<std::streamsize>(m.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path.string());
}

Checkpoint Checkpoint::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open: " + path.string());
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::istringstream lines(contents);
  std::string line;
  if (!std::getline(lines, line) || line != kMagic) {
    throw std::runtime_error("checkpoint manifest: bad magic in " + path.string());
  }
  if (!std::getline(lines, line)) throw std::runtime_error("checkpoint manifest: truncated");
  std::size_t count = 0;
  {
    std::istringstream ls(line);
    std::string word;
    ls >> word >> count;
    if (word != "tensors") throw std::runtime_error("checkpoint manifest: expected tensor count");
  }

  Checkpoint ck;
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(lines, line)) throw std::runtime_error("checkpoint manifest: truncated");
    std::istringstream ls(line);
    std::string name, dtype;
    int rank = 0;
    ls >> name >> dtype >> rank;
    if (dtype != "f32" || rank < 0) {
      throw std::runtime_error("checkpoint manifest: bad record '" + line + "'");
    }
    std::vector<int> shape(static_cast<std::size_t>(rank));
    for (int& d : shape) ls >> d;
    if (!ls) throw std::runtime_error("checkpoint manifest: bad record '" + line + "'");
    const std::size_t n = static_cast<std::size_t>(numel(shape));
    sizes.push_back(n);
    ck.entries_.push_back(Entry{name, std::move(shape), std::vector<float>(n)});
  }
  if (!std::getline(lines, line) || line != "payload") {
    throw std::runtime_error("checkpoint manifest: missing payload marker");
  }

  std::size_t offset = static_cast<std::size_t>(lines.tellg());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t bytes = sizes[i] * 4;
    if (offset + bytes > contents.size()) {
      throw std::runtime_error("checkpoint: payload truncated in " + path.string());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(contents.data()) + offset;
    auto& data = ck.entries_[i].data;
    for (std::size_t j = 0; j < sizes[i]; ++j) data[j] = get_f32_le(p + j * 4);
    offset += bytes;
  }
  return ck;
}

}  // namespace tokencom::numkit
