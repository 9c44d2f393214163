#include "nino/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "nino/error.hpp"

namespace nino {

namespace {

constexpr std::array<char, 4> kMagic{'N', 'I', 'N', 'O'};

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_integral_v<T>);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <class T>
bool get_le(std::istream& in, T& v) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) return false;
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) x |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  v = static_cast<T>(x);
  return true;
}

void put_f64(std::ostream& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }

}  // namespace

void save_checkpoint(const ParameterSet& params, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  for (const auto& p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rank()));
    for (auto e : p.value.shape()) put_le<std::uint64_t>(out, e);
    for (double d : p.value.data()) put_f64(out, d);
  }
}

void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  save_checkpoint(params, out);
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

ParameterSet read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) fail(ErrorKind::FormatError, "not a NINO checkpoint");
  std::uint32_t version = 0;
  if (!get_le(in, version) || version != kCheckpointVersion) {
    fail(ErrorKind::FormatError, "unsupported checkpoint version " + std::to_string(version));
  }
  ParameterSet params;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::uint32_t name_len = 0;
    std::uint32_t rank = 0;
    if (!get_le(in, name_len) || name_len > 4096) fail(ErrorKind::FormatError, "truncated tensor header");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len) || !get_le(in, rank) || rank == 0 || rank > 8) {
      fail(ErrorKind::FormatError, "truncated tensor header");
    }
    Shape shape(rank);
    for (auto& e : shape) {
      std::uint64_t x = 0;
      if (!get_le(in, x) || x == 0) fail(ErrorKind::FormatError, "bad extent in tensor " + name);
      e = static_cast<std::size_t>(x);
    }
    std::vector<double> data(element_count(shape));
    for (auto& d : data) {
      std::uint64_t bits = 0;
      if (!get_le(in, bits)) fail(ErrorKind::FormatError, "truncated data in tensor " + name);
      d = std::bit_cast<double>(bits);
    }
    params.add(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  return params;
}

ParameterSet read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) fail(ErrorKind::FileNotFound, path.string());
    fail(ErrorKind::IoError, "cannot open " + path.string());
  }
  return read_checkpoint(in);
}

void load_checkpoint(ParameterSet& params, const std::filesystem::path& path) {
  ParameterSet loaded = read_checkpoint(path);
  if (loaded.size() != params.size()) {
    fail(ErrorKind::ShapeMismatch, path.string() + " holds " + std::to_string(loaded.size()) + " tensors, model has " +
                                       std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (loaded[i].name != params[i].name || loaded[i].value.shape() != params[i].value.shape()) {
      fail(ErrorKind::ShapeMismatch, "checkpoint tensor " + loaded[i].name + shape_str(loaded[i].value.shape()) +
                                         " does not match model tensor " + params[i].name +
                                         shape_str(params[i].value.shape()));
    }
    params[i].value = std::move(loaded[i].value);
  }
}

void write_manifest(const ParameterSet& params, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "NINO";
  j["version"] = kCheckpointVersion;
  j["tensors"] = nlohmann::json::array();
  for (const auto& p : params) j["tensors"].push_back({{"name", p.name}, {"shape", p.value.shape()}});
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace nino
