#include "egodoa/feature_cache.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace egodoa {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'E', 'G', 'F', 'T'};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string feature_config_hash(const FeaturizeConfig& cfg) {
  std::ostringstream ss;
  ss << cfg.window << '|' << cfg.hop << '|' << cfg.n_lags << '|' << cfg.patch
     << '|' << cfg.sample_rate;
  std::ostringstream hex;
  hex << std::hex << fnv1a(ss.str());
  return hex.str();
}

Eigen::MatrixXd ChunkFeatures::patches() const {
  Eigen::MatrixXd m(patch_rows, patch_cols);
  for (int i = 0; i < patch_rows; ++i) {
    for (int j = 0; j < patch_cols; ++j) {
      m(i, j) =
          patches_u8[static_cast<size_t>(i) * patch_cols + j] / 255.0;
    }
  }
  return m;
}

void write_chunk_features(const std::filesystem::path& path,
                          const ChunkFeatures& feat,
                          const std::string& config_hash) {
  const json header{
      {"config_hash", config_hash},
      {"gcc_shape", {feat.gcc.rows(), feat.gcc.cols()}},
      {"gcc_dtype", "float32"},
      {"patch_shape", {feat.patch_rows, feat.patch_cols}},
      {"patch_dtype", "uint8"},
      {"lag_convention", "positive lag = channel 1 leads; column Z/2 = lag 0"},
  };
  const std::string head = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw std::runtime_error("features: cannot open " + path.string());
  }
  os.write(kMagic, 4);
  const std::uint32_t head_len = static_cast<std::uint32_t>(head.size());
  os.write(reinterpret_cast<const char*>(&head_len), 4);
  os.write(head.data(), head_len);

  std::vector<float> gcc32(static_cast<size_t>(feat.gcc.size()));
  for (int i = 0; i < feat.gcc.rows(); ++i) {
    for (int j = 0; j < feat.gcc.cols(); ++j) {
      gcc32[static_cast<size_t>(i) * feat.gcc.cols() + j] =
          static_cast<float>(feat.gcc(i, j));
    }
  }
  os.write(reinterpret_cast<const char*>(gcc32.data()),
           static_cast<std::streamsize>(gcc32.size() * 4));
  os.write(reinterpret_cast<const char*>(feat.patches_u8.data()),
           static_cast<std::streamsize>(feat.patches_u8.size()));
  if (!os) {
    throw std::runtime_error("features: write failed for " + path.string());
  }
}

namespace {

json read_header(std::ifstream& is, const std::filesystem::path& path) {
  char magic[4];
  std::uint32_t head_len = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&head_len), 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0 || head_len > (1u << 20)) {
    throw std::runtime_error("features: malformed cache file " + path.string());
  }
  std::string head(head_len, '\0');
  is.read(head.data(), head_len);
  if (!is) {
    throw std::runtime_error("features: truncated header in " + path.string());
  }
  return json::parse(head);
}

}  // namespace

ChunkFeatures read_chunk_features(const std::filesystem::path& path,
                                  const std::string& expected_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("features: cannot open " + path.string());
  }
  const json header = read_header(is, path);
  if (header.at("config_hash").get<std::string>() != expected_hash) {
    throw std::runtime_error("features: config hash mismatch in " +
                             path.string());
  }

  ChunkFeatures feat;
  const auto gshape = header.at("gcc_shape");
  const int gr = gshape.at(0).get<int>(), gc = gshape.at(1).get<int>();
  const auto pshape = header.at("patch_shape");
  feat.patch_rows = pshape.at(0).get<int>();
  feat.patch_cols = pshape.at(1).get<int>();

  std::vector<float> gcc32(static_cast<size_t>(gr) * gc);
  is.read(reinterpret_cast<char*>(gcc32.data()),
          static_cast<std::streamsize>(gcc32.size() * 4));
  feat.gcc.resize(gr, gc);
  for (int i = 0; i < gr; ++i) {
    for (int j = 0; j < gc; ++j) {
      feat.gcc(i, j) = gcc32[static_cast<size_t>(i) * gc + j];
    }
  }
  feat.patches_u8.resize(static_cast<size_t>(feat.patch_rows) *
                         feat.patch_cols);
  is.read(reinterpret_cast<char*>(feat.patches_u8.data()),
          static_cast<std::streamsize>(feat.patches_u8.size()));
  if (!is) {
    throw std::runtime_error("features: truncated data in " + path.string());
  }
  return feat;
}

bool chunk_features_valid(const std::filesystem::path& path,
                          const std::string& expected_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  try {
    const json header = read_header(is, path);
    return header.at("config_hash").get<std::string>() == expected_hash;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace egodoa
