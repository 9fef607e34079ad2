#include "egodoa/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace egodoa {

namespace {

constexpr std::uint32_t kMagic = 0x45474443;  // "EGDC"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
  const auto len = read_pod<std::uint32_t>(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error("checkpoint: truncated string");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ParameterStore& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string());

  write_pod(os, kMagic);
  write_pod(os, kVersion);
  write_pod<std::int32_t>(os, cfg.depth);
  write_pod<std::int32_t>(os, cfg.heads);
  write_pod<std::int32_t>(os, cfg.hidden);
  write_pod<std::int32_t>(os, cfg.ff);
  write_pod<std::int32_t>(os, cfg.audio_len);
  write_pod<std::int32_t>(os, cfg.visual_len);
  write_pod<std::int32_t>(os, cfg.audio_dim);
  write_pod<std::int32_t>(os, cfg.visual_dim);
  write_pod<std::int32_t>(os, cfg.bins);
  write_pod<std::uint8_t>(os, cfg.pre_ln ? 1 : 0);
  write_pod<std::uint64_t>(os, cfg.seed);

  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, tensor] : params) {
    write_string(os, name);
    write_pod<std::int64_t>(os, tensor.rows());
    write_pod<std::int64_t>(os, tensor.cols());
    os.write(reinterpret_cast<const char*>(tensor.value().data()),
             static_cast<std::streamsize>(tensor.value().size() *
                                          sizeof(double)));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " +
                                    path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());

  if (read_pod<std::uint32_t>(is) != kMagic) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  if (read_pod<std::uint32_t>(is) != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version in " +
                             path.string());
  }

  Checkpoint ckpt;
  ckpt.config.depth = read_pod<std::int32_t>(is);
  ckpt.config.heads = read_pod<std::int32_t>(is);
  ckpt.config.hidden = read_pod<std::int32_t>(is);
  ckpt.config.ff = read_pod<std::int32_t>(is);
  ckpt.config.audio_len = read_pod<std::int32_t>(is);
  ckpt.config.visual_len = read_pod<std::int32_t>(is);
  ckpt.config.audio_dim = read_pod<std::int32_t>(is);
  ckpt.config.visual_dim = read_pod<std::int32_t>(is);
  ckpt.config.bins = read_pod<std::int32_t>(is);
  ckpt.config.pre_ln = read_pod<std::uint8_t>(is) != 0;
  ckpt.config.seed = read_pod<std::uint64_t>(is);

  const auto count = read_pod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = read_string(is);
    const auto rows = read_pod<std::int64_t>(is);
    const auto cols = read_pod<std::int64_t>(is);
    Eigen::MatrixXd m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint: truncated tensor " + name);
    ckpt.params.insert(name, ad::parameter(std::move(m)));
  }
  return ckpt;
}

}  // namespace egodoa
