#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffsr/numerics/linalg.hpp"

namespace diffsr {

/// Named float64 tensors stored as one flat little-endian blob plus a JSON
/// manifest recording each tensor's name, shape and offset.
///
///   <dir>/manifest.json   {"format": ..., "version": 1, "meta": {...},
///                          "tensors": [{"name", "shape", "offset"}, ...]}
///   <dir>/tensors.bin     concatenated float64 little-endian values
class TensorArchive {
 public:
  static constexpr const char* kFormat = "diffsr-tensors";
  static constexpr int kVersion = 1;

  struct Entry {
    std::vector<std::int64_t> shape;
    std::vector<double> values;
  };

  void put(const std::string& name, std::vector<std::int64_t> shape, std::span<const double> values);
  void put(const std::string& name, const Matrix& m);
  void put(const std::string& name, const Vector& v);

  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  const Entry& get(const std::string& name) const;

  /// Loads into an existing tensor, refusing on any shape difference.
  void read_into(const std::string& name, Matrix& m) const;
  void read_into(const std::string& name, Vector& v) const;
  void read_into(const std::string& name, std::span<double> dst) const;

  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }

  void save(const std::filesystem::path& dir) const;
  static TensorArchive load(const std::filesystem::path& dir);

  /// Manifest and blob as they would be written; used for byte comparisons.
  std::string manifest_text() const;
  std::string blob_bytes() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;
  nlohmann::json meta_ = nlohmann::json::object();
};

}  // namespace diffsr
