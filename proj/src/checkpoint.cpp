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

#include "vtc/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace vtc {

namespace {

constexpr char kMagic[8] = {'V', 'T', 'C', 'K', 'P', 'T', '0', '1'};
constexpr uint32_t kVersion = 1;

void write_u64(std::ostream& out, uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint64_t read_u64(std::istream& in) {
  uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, FrameClassifier& model,
                     const CheckpointMeta& meta) {
  nlohmann::json header;
  header["model"] = model.config().to_json();
  header["epoch"] = meta.epoch;
  header["global_step"] = meta.global_step;
  if (std::isfinite(meta.mean_loss)) {
    header["mean_loss"] = meta.mean_loss;
  }
  header["rng_state"] = meta.rng_state;
  header["resampler"] = {{"zero_crossings", meta.resampler.zero_crossings},
                         {"window", meta.resampler.window}};
  const std::string header_text = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out.write(kMagic, sizeof(kMagic));
    const uint32_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    write_u64(out, header_text.size());
    out.write(header_text.data(),
              static_cast<std::streamsize>(header_text.size()));

    const std::vector<nn::ParamRef> params = model.params();
    write_u64(out, params.size());
    for (const nn::ParamRef& p : params) {
      write_u64(out, p.name.size());
      out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
      write_u64(out, p.shape.size());
      for (const int64_t dim : p.shape) {
        write_u64(out, static_cast<uint64_t>(dim));
      }
      out.write(reinterpret_cast<const char*>(p.value),
                static_cast<std::streamsize>(p.size * sizeof(double)));
    }
    if (!out) throw std::runtime_error("short write to checkpoint " + path);
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path + ": not a checkpoint file");
  }
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version " +
                             std::to_string(version));
  }
  const uint64_t header_len = read_u64(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error(path + ": truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad checkpoint header: " + e.what());
  }

  LoadedCheckpoint result;
  const ModelConfig config = ModelConfig::from_json(header.at("model"));
  result.meta.epoch = header.value("epoch", 0);
  result.meta.global_step = header.value("global_step", int64_t{0});
  result.meta.mean_loss =
      header.value("mean_loss", std::numeric_limits<double>::quiet_NaN());
  result.meta.rng_state = header.value("rng_state", std::string{});
  if (header.contains("resampler")) {
    const auto& r = header.at("resampler");
    result.meta.resampler.zero_crossings =
        r.value("zero_crossings", result.meta.resampler.zero_crossings);
    result.meta.resampler.window =
        r.value("window", result.meta.resampler.window);
  }

  result.model = std::make_unique<FrameClassifier>(config, /*seed=*/0);

  std::map<std::string, std::pair<std::vector<uint64_t>, std::vector<double>>>
      tensors;
  const uint64_t n_tensors = read_u64(in);
  for (uint64_t i = 0; i < n_tensors; ++i) {
    const uint64_t name_len = read_u64(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const uint64_t ndim = read_u64(in);
    std::vector<uint64_t> dims(ndim);
    uint64_t count = 1;
    for (uint64_t d = 0; d < ndim; ++d) {
      dims[d] = read_u64(in);
      count *= dims[d];
    }
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated tensor " + name);
    tensors.emplace(name, std::make_pair(std::move(dims), std::move(data)));
  }

  std::vector<nn::ParamRef> params = result.model->params();
  if (params.size() != tensors.size()) {
    throw std::runtime_error(path + ": tensor count does not match model (" +
                             std::to_string(tensors.size()) + " vs " +
                             std::to_string(params.size()) + ")");
  }
  for (nn::ParamRef& p : params) {
    const auto it = tensors.find(p.name);
    if (it == tensors.end()) {
      throw std::runtime_error(path + ": missing tensor " + p.name);
    }
    const auto& [dims, data] = it->second;
    if (static_cast<int64_t>(data.size()) != p.size) {
      throw std::runtime_error(path + ": tensor " + p.name + " has " +
                               std::to_string(data.size()) +
                               " values, expected " + std::to_string(p.size));
    }
    std::memcpy(p.value, data.data(), data.size() * sizeof(double));
  }
  return result;
}

}  // namespace vtc
