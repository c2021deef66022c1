// src/transducer/checkpoint.cc

// Copyright 2026  The pcasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pcasr/transducer/checkpoint.h"

#include <fstream>
#include <map>

#include "pcasr/error.h"

namespace pcasr::transducer {

nlohmann::json CheckpointToJson(const TransducerModel& model,
                                const CharVocabulary& vocabulary) {
  nlohmann::json params = nlohmann::json::array();
  ForEachParameter(model.weights(), [&](const std::string& name, const auto& t) {
    if (t.size() == 0) return;
    params.push_back({{"name", name},
                      {"rows", t.rows()},
                      {"cols", t.cols()},
                      {"data", std::vector<double>(t.data(), t.data() + t.size())}});
  });
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"config", model.config().ToJson()},
          {"vocabulary", vocabulary.symbols()},
          {"parameters", params}};
}

Checkpoint CheckpointFromJson(const nlohmann::json& j) {
  try {
    if (!j.contains("format") || j["format"] != kCheckpointFormat) {
      throw ConfigError("not a pcasr transducer checkpoint");
    }
    if (!j.contains("version") || j["version"] != kCheckpointVersion) {
      throw ConfigError("unsupported checkpoint version");
    }
    const ModelConfig config = ModelConfig::FromJson(j.at("config"));
    CharVocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());
    if (vocab.size() != config.vocab_size) {
      throw ConfigError("checkpoint vocabulary size disagrees with config");
    }
    std::map<std::string, const nlohmann::json*> by_name;
    for (const auto& p : j.at("parameters")) {
      by_name[p.at("name").get<std::string>()] = &p;
    }
    // Start from a correctly shaped zero model and fill every tensor.
    ModelWeights weights = TransducerModel::Zeros(config).weights();
    size_t used = 0;
    ForEachParameter(weights, [&](const std::string& name, auto& t) {
      if (t.size() == 0) return;
      auto it = by_name.find(name);
      if (it == by_name.end()) throw ConfigError("checkpoint lacks " + name);
      const nlohmann::json& p = *it->second;
      const auto data = p.at("data").get<std::vector<double>>();
      if (p.at("rows").get<Eigen::Index>() != t.rows() ||
          p.at("cols").get<Eigen::Index>() != t.cols() ||
          static_cast<Eigen::Index>(data.size()) != t.size()) {
        throw ConfigError("checkpoint tensor " + name + " has the wrong shape");
      }
      std::copy(data.begin(), data.end(), t.data());
      ++used;
    });
    if (used != by_name.size()) {
      throw ConfigError("checkpoint has unexpected tensors");
    }
    return {TransducerModel(config, std::move(weights)), std::move(vocab)};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const std::string& path, const TransducerModel& model,
                    const CharVocabulary& vocabulary) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  out << CheckpointToJson(model, vocabulary).dump() << "\n";
  if (!out) throw Error("cannot write checkpoint " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed checkpoint " + path + ": " + e.what());
  }
  return CheckpointFromJson(j);
}

}  // namespace pcasr::transducer
