// Copyright (c) 2026 The voicetype authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vtc/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace vtc {

namespace {

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

double decode_sample(const unsigned char* p, uint16_t bits, uint16_t format) {
  if (format == 3) {  // IEEE float
    if (bits == 32) {
      float f;
      std::memcpy(&f, p, 4);
      return static_cast<double>(f);
    }
    double d;
    std::memcpy(&d, p, 8);
    return d;
  }
  switch (bits) {
    case 8:  // unsigned
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      const int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xffffff;
      return v / 8388608.0;
    }
    case 32: {
      int32_t v;
      std::memcpy(&v, p, 4);
      return v / 2147483648.0;
    }
    default:
      throw std::runtime_error("unsupported PCM bit depth: " +
                               std::to_string(bits));
  }
}

// FNV-1a, for cache keys.
uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open audio file " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::strncmp(tag, "RIFF", 4) != 0)
    throw std::runtime_error(path + ": not a RIFF file");
  read_u32(in);  // riff size
  in.read(tag, 4);
  if (!in || std::strncmp(tag, "WAVE", 4) != 0)
    throw std::runtime_error(path + ": not a WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  std::vector<unsigned char> data;
  bool have_fmt = false, have_data = false;

  while (in.read(tag, 4)) {
    const uint32_t chunk_size = read_u32(in);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::strncmp(tag, "data", 4) == 0) {
      data.resize(chunk_size);
      in.read(reinterpret_cast<char*>(data.data()), chunk_size);
      if (!in) throw std::runtime_error(path + ": truncated data chunk");
      have_data = true;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
    if (have_fmt && have_data) break;
  }
  if (!have_fmt || !have_data)
    throw std::runtime_error(path + ": missing fmt or data chunk");
  if (format != 1 && format != 3)
    throw std::runtime_error(path + ": unsupported WAV format code " +
                             std::to_string(format));
  if (channels == 0 || rate == 0)
    throw std::runtime_error(path + ": malformed fmt chunk");
  if (format == 3 && bits != 32 && bits != 64)
    throw std::runtime_error(path + ": unsupported float bit depth");

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t n_frames = data.size() / frame_bytes;

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(n_frames);
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (uint16_t c = 0; c < channels; ++c) {
      acc += decode_sample(&data[i * frame_bytes + c * bytes_per_sample], bits,
                           format);
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write audio file " + path);
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<uint32_t>(w.sample_rate));
  write_u32(out, static_cast<uint32_t>(w.sample_rate * 2));
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_bytes);
  for (double s : w.samples) {
    const double clipped = std::clamp(s, -1.0, 1.0);
    const int v = static_cast<int>(std::lround(clipped * 32767.0));
    write_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

double wav_duration(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open audio file " + path);
  char tag[4];
  in.read(tag, 4);
  if (!in || std::strncmp(tag, "RIFF", 4) != 0)
    throw std::runtime_error(path + ": not a RIFF file");
  read_u32(in);
  in.read(tag, 4);
  if (!in || std::strncmp(tag, "WAVE", 4) != 0)
    throw std::runtime_error(path + ": not a WAVE file");

  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0, data_bytes = 0;
  bool have_fmt = false, have_data = false;
  while (in.read(tag, 4)) {
    const uint32_t chunk_size = read_u32(in);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      read_u16(in);  // format
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);
      read_u16(in);
      bits = read_u16(in);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::strncmp(tag, "data", 4) == 0) {
      data_bytes = chunk_size;
      have_data = true;
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
    if (have_fmt && have_data) break;
  }
  if (!have_fmt || !have_data)
    throw std::runtime_error(path + ": missing fmt or data chunk");
  if (channels == 0 || rate == 0 || bits == 0)
    throw std::runtime_error(path + ": malformed fmt chunk");
  const uint32_t frame_bytes = (bits / 8) * channels;
  return static_cast<double>(data_bytes / frame_bytes) / rate;
}

std::vector<double> resample_sinc(const std::vector<double>& in, int in_rate,
                                  int out_rate, int zero_crossings) {
  if (in_rate <= 0 || out_rate <= 0)
    throw std::invalid_argument("sample rates must be positive");
  if (in_rate == out_rate) return in;

  const double ratio = static_cast<double>(out_rate) / in_rate;
  // Cutoff at the lower of the two Nyquist frequencies, normalized to the
  // input rate.
  const double fc = std::min(1.0, ratio);
  const double half_width = zero_crossings / fc;  // in input samples
  const size_t n_out = static_cast<size_t>(
      std::llround(static_cast<double>(in.size()) * ratio));

  std::vector<double> out(n_out, 0.0);
  for (size_t n = 0; n < n_out; ++n) {
    const double center = static_cast<double>(n) / ratio;
    const auto first =
        static_cast<int64_t>(std::ceil(center - half_width));
    const auto last = static_cast<int64_t>(std::floor(center + half_width));
    double acc = 0.0;
    for (int64_t m = std::max<int64_t>(first, 0);
         m <= std::min<int64_t>(last, static_cast<int64_t>(in.size()) - 1);
         ++m) {
      const double t = (m - center) * fc;
      double kernel;
      if (std::fabs(t) < 1e-12) {
        kernel = 1.0;
      } else {
        kernel = std::sin(M_PI * t) / (M_PI * t);
      }
      const double window =
          0.5 + 0.5 * std::cos(M_PI * (m - center) / half_width);
      acc += in[m] * kernel * window * fc;
    }
    out[n] = acc;
  }
  return out;
}

std::string audio_cache_dir_from_env() {
  const char* dir = std::getenv("VOICETYPE_CACHE");
  return dir ? dir : "";
}

Waveform load_audio(const std::string& path, int target_rate,
                    const std::string& cache_dir, const ResampleSpec& spec) {
  namespace fs = std::filesystem;

  std::string cache_path;
  if (!cache_dir.empty()) {
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    const auto mtime = fs::last_write_time(path, ec);
    const std::string key =
        fs::absolute(path).string() + "|" + std::to_string(size) + "|" +
        std::to_string(mtime.time_since_epoch().count()) + "|" +
        std::to_string(target_rate) + "|" +
        std::to_string(spec.zero_crossings) + "|" + spec.window;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(key)));
    fs::create_directories(cache_dir, ec);
    cache_path = (fs::path(cache_dir) / (std::string(hex) + ".raw")).string();
    std::ifstream cached(cache_path, std::ios::binary);
    if (cached) {
      uint64_t count = 0;
      cached.read(reinterpret_cast<char*>(&count), sizeof(count));
      Waveform w;
      w.sample_rate = target_rate;
      w.samples.resize(count);
      cached.read(reinterpret_cast<char*>(w.samples.data()),
                  static_cast<std::streamsize>(count * sizeof(double)));
      if (cached) return w;
    }
  }

  Waveform w = read_wav(path);
  if (w.sample_rate != target_rate) {
    w.samples =
        resample_sinc(w.samples, w.sample_rate, target_rate,
                      spec.zero_crossings);
    w.sample_rate = target_rate;
  }

  if (!cache_path.empty()) {
    const std::string tmp = cache_path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      const uint64_t count = w.samples.size();
      out.write(reinterpret_cast<const char*>(&count), sizeof(count));
      out.write(reinterpret_cast<const char*>(w.samples.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
    }
    std::error_code ec;
    fs::rename(tmp, cache_path, ec);
  }
  return w;
}

}  // namespace vtc
