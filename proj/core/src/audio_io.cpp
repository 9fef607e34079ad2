#include "egodoa/audio_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace egodoa {

namespace {

template <typename T>
void put(std::vector<char>& buf, T v) {
  const char* p = reinterpret_cast<const char*>(&v);
  buf.insert(buf.end(), p, p + sizeof(T));
}

template <typename T>
T get(const std::vector<char>& buf, size_t& at) {
  if (at + sizeof(T) > buf.size()) {
    throw std::runtime_error("wav: truncated file");
  }
  T v;
  std::memcpy(&v, buf.data() + at, sizeof(T));
  at += sizeof(T);
  return v;
}

}  // namespace

void write_wav(const std::filesystem::path& path, const StereoBuffer& audio) {
  const std::uint32_t n = static_cast<std::uint32_t>(audio.samples());
  const std::uint32_t data_bytes = n * 2 * 4;

  std::vector<char> buf;
  buf.reserve(44 + data_bytes);
  buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
  put<std::uint32_t>(buf, 36 + data_bytes);
  buf.insert(buf.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put<std::uint32_t>(buf, 16);
  put<std::uint16_t>(buf, 3);  // IEEE float
  put<std::uint16_t>(buf, 2);  // stereo
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(audio.sample_rate));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(audio.sample_rate) * 8);
  put<std::uint16_t>(buf, 8);   // block align
  put<std::uint16_t>(buf, 32);  // bits per sample
  buf.insert(buf.end(), {'d', 'a', 't', 'a'});
  put<std::uint32_t>(buf, data_bytes);
  for (std::uint32_t i = 0; i < n; ++i) {
    put<float>(buf, static_cast<float>(audio.left[i]));
    put<float>(buf, static_cast<float>(audio.right[i]));
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("wav: cannot open " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw std::runtime_error("wav: write failed for " + path.string());
}

StereoBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("wav: cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(is)),
                        std::istreambuf_iterator<char>());

  size_t at = 0;
  auto expect = [&](const char* tag) {
    if (at + 4 > buf.size() || std::memcmp(buf.data() + at, tag, 4) != 0) {
      throw std::runtime_error("wav: malformed file " + path.string());
    }
    at += 4;
  };
  expect("RIFF");
  get<std::uint32_t>(buf, at);
  expect("WAVE");
  expect("fmt ");
  const auto fmt_size = get<std::uint32_t>(buf, at);
  const auto format = get<std::uint16_t>(buf, at);
  const auto channels = get<std::uint16_t>(buf, at);
  const auto rate = get<std::uint32_t>(buf, at);
  at += fmt_size - 8;  // skip byte rate, block align, bits
  if (format != 3 || channels != 2) {
    throw std::runtime_error("wav: expected 2-channel float PCM in " +
                             path.string());
  }
  expect("data");
  const auto data_bytes = get<std::uint32_t>(buf, at);
  const std::uint32_t n = data_bytes / 8;

  StereoBuffer out;
  out.sample_rate = rate;
  out.left.resize(n);
  out.right.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    out.left[i] = get<float>(buf, at);
    out.right[i] = get<float>(buf, at);
  }
  return out;
}

}  // namespace egodoa
