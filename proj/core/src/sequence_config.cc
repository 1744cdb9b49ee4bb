/* Copyright 2026 The semocc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "semocc/sequence_config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json_util.h"
#include "semocc/error.h"
#include "semocc/io.h"

namespace semocc {
namespace {

namespace fs = std::filesystem;
using internal::Get;
using internal::GetMatrix;
using internal::GetVector3;
using internal::json;
using internal::MatrixJson;
using internal::VectorJson;

fs::path Resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string Relative(const fs::path& base, const fs::path& p) {
  const fs::path rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

void RequireFile(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw ValidationError("missing input file " + p.string());
}

// Reads only the LPC1 header.
int PeekCloudFrame(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char head[24];
  in.read(head, sizeof(head));
  const auto got = static_cast<std::uint64_t>(in.gcount());
  if (got < sizeof(head)) {
    throw FormatError(path.string(), got,
                      "truncated header: expected 24 bytes, file has " + std::to_string(got));
  }
  if (std::string_view(head, 4) != "LPC1") throw FormatError(path.string(), 0, "bad magic");
  auto u32 = [&](int at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(head[at + i])) << (8 * i);
    }
    return v;
  };
  if (u32(4) != kPointCloudVersion) {
    throw FormatError(path.string(), 4, "unsupported version " + std::to_string(u32(4)));
  }
  return static_cast<int>(u32(8));
}

std::size_t CountLabels(const fs::path& path) {
  return ReadVocabulary(path).size();
}

}  // namespace

std::string_view VocabModeName(VocabMode mode) {
  return mode == VocabMode::kSingleFrame ? "single" : "consecutive";
}

VocabMode ParseVocabMode(std::string_view name) {
  if (name == "single") return VocabMode::kSingleFrame;
  if (name == "consecutive") return VocabMode::kConsecutive;
  throw ValidationError("unknown vocabulary scope '" + std::string(name) +
                        "' (expected single or consecutive)");
}

PipelineConfig ParsePipelineConfig(std::string_view json_text, const fs::path& base_dir) {
  const json root = internal::ParseJson(json_text, "config");
  if (!root.is_object()) throw ValidationError("config root must be an object");
  const std::string top = "config";

  PipelineConfig cfg;
  if (root.contains("grid")) {
    const json& g = root.at("grid");
    const auto dims = Get<std::vector<int>>(g, "dims", "grid");
    if (dims.size() != 3) throw ValidationError("grid.dims: expected 3 values");
    cfg.grid = GridSpec(GetVector3(g, "origin", "grid"), Get<double>(g, "voxel_size", "grid"),
                        {dims[0], dims[1], dims[2]});
  }
  if (root.contains("strategy")) {
    cfg.strategy = ParseStrategy(Get<std::string>(root, "strategy", top));
  }
  if (root.contains("vocab_scope")) {
    cfg.vocab_scope = ParseVocabMode(Get<std::string>(root, "vocab_scope", top));
  }
  if (root.contains("window") && !root.at("window").is_null()) {
    cfg.window = Get<int>(root, "window", top);
  }
  if (root.contains("workers")) cfg.workers = Get<int>(root, "workers", top);
  cfg.output_dir = Resolve(base_dir, root.value("output", std::string("out")));

  for (const json& c : Get<json>(root, "cameras", top)) {
    const std::string where = "cameras[" + std::to_string(cfg.rig.size()) + "]";
    cfg.camera_names.push_back(c.value("name", "cam" + std::to_string(cfg.rig.size())));
    cfg.rig.emplace_back(GetMatrix<3, 3>(c, "intrinsics", where),
                         RigidTransform::FromMatrix4(GetMatrix<4, 4>(c, "cam_from_ego", where)),
                         Get<int>(c, "width", where), Get<int>(c, "height", where));
  }
  if (cfg.rig.empty()) throw ValidationError("config lists no cameras");

  std::set<int> seen;
  for (const json& f : Get<json>(root, "frames", top)) {
    const std::string where = "frames[" + std::to_string(cfg.frames.size()) + "]";
    FrameEntry e;
    e.index = Get<int>(f, "index", where);
    if (e.index < 0 || !seen.insert(e.index).second) {
      throw ValidationError(where + ": frame index must be unique and non-negative");
    }
    e.world_from_ego = RigidTransform::FromMatrix4(GetMatrix<4, 4>(f, "world_from_ego", where));
    e.cloud = Resolve(base_dir, Get<std::string>(f, "cloud", where));
    for (const auto& m : Get<std::vector<std::string>>(f, "maps", where)) {
      e.maps.push_back(Resolve(base_dir, m));
    }
    if (e.maps.size() != cfg.rig.size()) {
      throw ValidationError(where + ".maps: expected one map per camera (" +
                            std::to_string(cfg.rig.size()) + ")");
    }
    e.vocab = Resolve(base_dir, Get<std::string>(f, "vocab", where));
    if (f.contains("embeddings")) {
      e.embeddings = Resolve(base_dir, Get<std::string>(f, "embeddings", where));
    }
    cfg.frames.push_back(std::move(e));
  }
  if (cfg.frames.empty()) throw ValidationError("config lists no frames");
  cfg.target_frame = root.contains("target_frame") ? Get<int>(root, "target_frame", top)
                                                    : cfg.frames.front().index;
  if (!seen.count(cfg.target_frame)) {
    throw ValidationError("target_frame " + std::to_string(cfg.target_frame) +
                          " is not a listed frame");
  }

  if (root.contains("boxes")) {
    for (const json& b : root.at("boxes")) {
      const std::string where = "boxes[" + std::to_string(cfg.boxes.size()) + "]";
      BoundingBox3D box;
      box.track_id = Get<std::string>(b, "track_id", where);
      box.frame_index = Get<int>(b, "frame", where);
      box.center = GetVector3(b, "center", where);
      box.size = GetVector3(b, "size", where);
      box.yaw = Get<double>(b, "yaw", where);
      box.is_moving = Get<bool>(b, "moving", where);
      box.Validate();
      cfg.boxes.push_back(std::move(box));
    }
  }

  if (root.contains("evaluation")) {
    const json& ev = root.at("evaluation");
    EvaluationEntry e;
    e.classes = Resolve(base_dir, Get<std::string>(ev, "classes", "evaluation"));
    e.ground_truth = Resolve(base_dir, Get<std::string>(ev, "ground_truth", "evaluation"));
    if (ev.contains("class_embeddings")) {
      e.class_embeddings =
          Resolve(base_dir, Get<std::string>(ev, "class_embeddings", "evaluation"));
    }
    if (ev.contains("overrides")) {
      e.overrides = Resolve(base_dir, Get<std::string>(ev, "overrides", "evaluation"));
    }
    cfg.evaluation = std::move(e);
  }
  return cfg;
}

PipelineConfig LoadPipelineConfig(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return ParsePipelineConfig(std::string_view(bytes.data(), bytes.size()),
                               fs::absolute(path).parent_path());
  } catch (const FormatError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void WritePipelineConfig(const fs::path& path, const PipelineConfig& cfg) {
  const fs::path base = fs::absolute(path).parent_path();
  json root;
  root["grid"] = {{"origin", VectorJson(cfg.grid.origin())},
                  {"voxel_size", cfg.grid.voxel_size()},
                  {"dims", cfg.grid.dims()}};
  root["strategy"] = std::string(StrategyName(cfg.strategy));
  root["vocab_scope"] = std::string(VocabModeName(cfg.vocab_scope));
  root["target_frame"] = cfg.target_frame;
  root["window"] = cfg.window ? json(*cfg.window) : json(nullptr);
  if (cfg.workers) root["workers"] = *cfg.workers;
  root["output"] = Relative(base, cfg.output_dir);
  root["cameras"] = json::array();
  for (std::size_t i = 0; i < cfg.rig.size(); ++i) {
    const CameraModel& cam = cfg.rig[i];
    root["cameras"].push_back({{"name", cfg.camera_names.at(i)},
                               {"width", cam.width},
                               {"height", cam.height},
                               {"intrinsics", MatrixJson(cam.intrinsics)},
                               {"cam_from_ego", MatrixJson(cam.cam_from_ego.Matrix4())}});
  }
  root["frames"] = json::array();
  for (const auto& f : cfg.frames) {
    json maps = json::array();
    for (const auto& m : f.maps) maps.push_back(Relative(base, m));
    json entry = {{"index", f.index},
                  {"world_from_ego", MatrixJson(f.world_from_ego.Matrix4())},
                  {"cloud", Relative(base, f.cloud)},
                  {"maps", maps},
                  {"vocab", Relative(base, f.vocab)}};
    if (f.embeddings) entry["embeddings"] = Relative(base, *f.embeddings);
    root["frames"].push_back(entry);
  }
  root["boxes"] = json::array();
  for (const auto& b : cfg.boxes) {
    root["boxes"].push_back({{"track_id", b.track_id},
                             {"frame", b.frame_index},
                             {"center", VectorJson(b.center)},
                             {"size", VectorJson(b.size)},
                             {"yaw", b.yaw},
                             {"moving", b.is_moving}});
  }
  if (cfg.evaluation) {
    json ev = {{"classes", Relative(base, cfg.evaluation->classes)},
               {"ground_truth", Relative(base, cfg.evaluation->ground_truth)}};
    if (cfg.evaluation->class_embeddings) {
      ev["class_embeddings"] = Relative(base, *cfg.evaluation->class_embeddings);
    }
    if (cfg.evaluation->overrides) {
      ev["overrides"] = Relative(base, *cfg.evaluation->overrides);
    }
    root["evaluation"] = ev;
  }
  const std::string text = root.dump(2) + "\n";
  WriteFileBytes(path, std::vector<char>(text.begin(), text.end()));
}

void ValidateInputs(const PipelineConfig& cfg) {
  std::optional<Eigen::Index> dim;
  for (const auto& f : cfg.frames) {
    RequireFile(f.cloud);
    const int frame = PeekCloudFrame(f.cloud);
    if (frame != f.index) {
      throw FormatError(f.cloud.string(), 8,
                        "frame index " + std::to_string(frame) + " does not match config index " +
                            std::to_string(f.index));
    }
    RequireFile(f.vocab);
    const std::size_t labels = CountLabels(f.vocab);
    bool features = false;
    for (std::size_t c = 0; c < f.maps.size(); ++c) {
      RequireFile(f.maps[c]);
      const MapHeader h = ReadMapHeader(f.maps[c]);
      const CameraModel& cam = cfg.rig[c];
      if (static_cast<int>(h.width) != cam.width || static_cast<int>(h.height) != cam.height) {
        throw FormatError(f.maps[c].string(), 4,
                          "map is " + std::to_string(h.width) + "x" + std::to_string(h.height) +
                              " but camera " + cfg.camera_names[c] + " is " +
                              std::to_string(cam.width) + "x" + std::to_string(cam.height));
      }
      features = features || h.channels > 1;
    }
    if (features && !f.embeddings) {
      throw ValidationError("frame " + std::to_string(f.index) +
                            " has feature maps but no embeddings");
    }
    if (f.embeddings) {
      RequireFile(*f.embeddings);
      const Eigen::MatrixXd emb = ReadEmbeddings(*f.embeddings);
      if (static_cast<std::size_t>(emb.rows()) != labels) {
        throw FormatError(f.embeddings->string(), 4,
                          std::to_string(emb.rows()) + " embedding rows for " +
                              std::to_string(labels) + " labels in " + f.vocab.string());
      }
      if (dim && *dim != emb.cols()) {
        throw FormatError(f.embeddings->string(), 8, "embedding dimension differs across frames");
      }
      dim = emb.cols();
    }
  }
  if (cfg.evaluation) {
    RequireFile(cfg.evaluation->classes);
    RequireFile(cfg.evaluation->ground_truth);
    if (cfg.evaluation->class_embeddings) RequireFile(*cfg.evaluation->class_embeddings);
    if (cfg.evaluation->overrides) RequireFile(*cfg.evaluation->overrides);
  }
}

SequenceInput LoadSequence(const PipelineConfig& cfg, int workers) {
  ValidateInputs(cfg);
  SequenceInput input;
  input.rig = cfg.rig;
  input.boxes = cfg.boxes;

  std::vector<VocabularySet> vocabs;
  std::vector<EmbeddingMatrix> embs;
  bool all_emb = true;
  for (const auto& f : cfg.frames) {
    vocabs.push_back(ReadVocabulary(f.vocab));
    if (f.embeddings) {
      embs.emplace_back(ReadEmbeddings(*f.embeddings));
    } else {
      all_emb = false;
    }
  }
  const VocabularySet merged = MergeSequenceVocab(vocabs);
  std::optional<EmbeddingMatrix> merged_emb;
  if (all_emb) merged_emb = MergeEmbeddings(vocabs, embs, merged);

  for (std::size_t i = 0; i < cfg.frames.size(); ++i) {
    const FrameEntry& f = cfg.frames[i];
    input.poses.push_back(EgoPose{f.world_from_ego, f.index});
    FrameInput frame;
    frame.cloud = ReadPointCloud(f.cloud);
    frame.cloud.labels.reset();
    frame.vocab = cfg.vocab_scope == VocabMode::kConsecutive ? merged : vocabs[i];
    for (const auto& m : f.maps) {
      if (ReadMapHeader(m).channels == 1) {
        frame.maps.push_back(ReadSegmentationMap(m));
        frame.maps.back().ValidateIds(frame.vocab.size());
      } else {
        const EmbeddingMatrix& emb =
            cfg.vocab_scope == VocabMode::kConsecutive ? *merged_emb : embs.at(i);
        frame.maps.push_back(SegmentFromFeatures(ReadFeatureMap(m), emb, workers));
      }
    }
    input.frames.push_back(std::move(frame));
  }
  return input;
}

PipelineOptions MakePipelineOptions(const PipelineConfig& cfg, int workers) {
  PipelineOptions opt;
  opt.strategy = cfg.strategy;
  opt.target_frame = cfg.target_frame;
  opt.window = cfg.window;
  opt.grid = cfg.grid;
  opt.workers = workers;
  return opt;
}

VoxelGrid PredictionInClassSpace(const PipelineConfig& cfg, const PipelineOutput& output,
                                 const ClassSet& classes) {
  if (!cfg.evaluation) throw ValidationError("config has no evaluation section");
  std::map<std::string, std::string> overrides;
  if (cfg.evaluation->overrides) overrides = ReadClassOverrides(*cfg.evaluation->overrides);
  std::vector<LabelId> mapping;
  if (cfg.evaluation->class_embeddings) {
    std::vector<VocabularySet> vocabs;
    std::vector<EmbeddingMatrix> embs;
    for (const auto& f : cfg.frames) {
      if (!f.embeddings) {
        throw ValidationError("class embeddings need per-frame embeddings for frame " +
                              std::to_string(f.index));
      }
      vocabs.push_back(ReadVocabulary(f.vocab));
      embs.emplace_back(ReadEmbeddings(*f.embeddings));
    }
    mapping = CanonicalMap(output.vocab, MergeEmbeddings(vocabs, embs, output.vocab), classes,
                           EmbeddingMatrix(ReadEmbeddings(*cfg.evaluation->class_embeddings)),
                           overrides);
  } else {
    mapping = MapByName(output.vocab, classes, overrides);
  }
  return ApplyClassMap(output.grid, mapping, classes);
}

}  // namespace semocc
