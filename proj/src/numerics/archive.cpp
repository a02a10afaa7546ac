#include "diffsr/numerics/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace diffsr {
namespace {

void append_le(std::string& out, double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

std::int64_t element_count(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

std::string shape_text(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

}  // namespace

void TensorArchive::put(const std::string& name, std::vector<std::int64_t> shape, std::span<const double> values) {
  if (element_count(shape) != static_cast<std::int64_t>(values.size()))
    throw DimensionError("TensorArchive::put " + name + ": shape " + shape_text(shape) + " holds " +
                         std::to_string(element_count(shape)) + " values, got " + std::to_string(values.size()));
  if (!entries_.count(name)) order_.push_back(name);
  entries_[name] = Entry{std::move(shape), std::vector<double>(values.begin(), values.end())};
}

void TensorArchive::put(const std::string& name, const Matrix& m) {
  put(name, {m.rows(), m.cols()}, as_span(m));
}

void TensorArchive::put(const std::string& name, const Vector& v) { put(name, {v.size()}, as_span(v)); }

const TensorArchive::Entry& TensorArchive::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("TensorArchive: missing tensor '" + name + "'");
  return it->second;
}

void TensorArchive::read_into(const std::string& name, Matrix& m) const {
  const Entry& e = get(name);
  const std::vector<std::int64_t> want{m.rows(), m.cols()};
  if (e.shape != want)
    throw DimensionError("TensorArchive: '" + name + "' has shape " + shape_text(e.shape) + ", expected " +
                         shape_text(want));
  std::memcpy(m.data(), e.values.data(), e.values.size() * sizeof(double));
}

void TensorArchive::read_into(const std::string& name, Vector& v) const {
  const Entry& e = get(name);
  const std::vector<std::int64_t> want{v.size()};
  if (e.shape != want)
    throw DimensionError("TensorArchive: '" + name + "' has shape " + shape_text(e.shape) + ", expected " +
                         shape_text(want));
  std::memcpy(v.data(), e.values.data(), e.values.size() * sizeof(double));
}

void TensorArchive::read_into(const std::string& name, std::span<double> dst) const {
  const Entry& e = get(name);
  if (e.values.size() != dst.size())
    throw DimensionError("TensorArchive: '" + name + "' holds " + std::to_string(e.values.size()) +
                         " values, expected " + std::to_string(dst.size()));
  std::memcpy(dst.data(), e.values.data(), dst.size() * sizeof(double));
}

std::string TensorArchive::manifest_text() const {
  nlohmann::json manifest;
  manifest["format"] = kFormat;
  manifest["version"] = kVersion;
  manifest["meta"] = meta_;
  nlohmann::json tensors = nlohmann::json::array();
  std::int64_t offset = 0;
  for (const std::string& name : order_) {
    const Entry& e = entries_.at(name);
    tensors.push_back({{"name", name}, {"shape", e.shape}, {"offset", offset}});
    offset += static_cast<std::int64_t>(e.values.size());
  }
  manifest["tensors"] = std::move(tensors);
  return manifest.dump(2) + "\n";
}

std::string TensorArchive::blob_bytes() const {
  std::string blob;
  for (const std::string& name : order_)
    for (double x : entries_.at(name).values) append_le(blob, x);
  return blob;
}

void TensorArchive::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest_text();
    if (!out) throw std::runtime_error("TensorArchive: cannot write " + (dir / "manifest.json").string());
  }
  std::ofstream out(dir / "tensors.bin", std::ios::binary | std::ios::trunc);
  const std::string blob = blob_bytes();
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw std::runtime_error("TensorArchive: cannot write " + (dir / "tensors.bin").string());
}

TensorArchive TensorArchive::load(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw std::runtime_error("TensorArchive: cannot read " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("TensorArchive: malformed manifest: ") + e.what());
  }
  if (manifest.value("format", "") != kFormat || manifest.value("version", 0) != kVersion)
    throw ContractError("TensorArchive: unsupported manifest format/version in " + dir.string());

  std::ifstream bf(dir / "tensors.bin", std::ios::binary);
  if (!bf) throw std::runtime_error("TensorArchive: cannot read " + (dir / "tensors.bin").string());
  std::stringstream buf;
  buf << bf.rdbuf();
  const std::string blob = buf.str();

  TensorArchive archive;
  archive.meta_ = manifest.value("meta", nlohmann::json::object());
  for (const auto& t : manifest.at("tensors")) {
    const std::string name = t.at("name").get<std::string>();
    std::vector<std::int64_t> shape = t.at("shape").get<std::vector<std::int64_t>>();
    const std::int64_t offset = t.at("offset").get<std::int64_t>();
    const std::int64_t count = element_count(shape);
    if (offset < 0 || static_cast<std::size_t>((offset + count) * 8) > blob.size())
      throw ContractError("TensorArchive: tensor '" + name + "' overruns tensors.bin");
    std::vector<double> values(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) values[i] = read_le(blob.data() + (offset + i) * 8);
    archive.order_.push_back(name);
    archive.entries_[name] = Entry{std::move(shape), std::move(values)};
  }
  return archive;
}

}  // namespace diffsr
