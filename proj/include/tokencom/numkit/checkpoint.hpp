#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tokencom/numkit/tensor.hpp"

namespace tokencom::numkit {

// Named-tensor container with a single-file on-disk form: a UTF-8 manifest
// (one record per tensor: name, dtype, shape) followed by the concatenated
// little-endian f32 payloads in manifest order. Round-trips bit-exactly.
class Checkpoint {
 public:
  struct Entry {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;
  };

  void put(const std::string& name, const Tensor& t);
  void put_raw(const std::string& name, std::vector<int> shape, std::vector<float> data);

  bool has(const std::string& name) const;
  const Entry& get(const std::string& name) const;  // throws on missing name
  Tensor tensor(const std::string& name, bool requires_grad = false) const;
  // Copies stored values into an existing tensor of identical shape.
  void load_into(const std::string& name, Tensor& t) const;

  const std::vector<Entry>& entries() const { return entries_; }

  void write(const std::filesystem::path& path) const;
  static Checkpoint read(const std::filesystem::path& path);

 private:
  std::vector<Entry> entries_;
};

}  // namespace tokencom::numkit
