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
#include "semocc/evaluation.h"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "semocc/error.h"

namespace semocc {

ClassSet ClassSet::Occ3dNuScenes() {
  ClassSet set;
  set.semantic = {"others",       "barrier",     "bicycle",
                  "bus",          "car",         "construction vehicle",
                  "motorcycle",   "pedestrian",  "traffic cone",
                  "trailer",      "truck",       "driveable surface",
                  "other flat",   "sidewalk",    "terrain",
                  "manmade",      "vegetation"};
  return set;
}

std::vector<bool> ClassSet::Occ3dBaseMask() {
  const ClassSet set = Occ3dNuScenes();
  std::vector<bool> mask(set.semantic.size(), false);
  for (const char* name : {"bicycle", "motorcycle", "traffic cone", "sidewalk"}) {
    mask[*set.Find(name)] = true;
  }
  return mask;
}

std::vector<std::string> ClassSet::AllNames() const {
  std::vector<std::string> names = semantic;
  names.push_back(free_name);
  return names;
}

std::optional<LabelId> ClassSet::Find(const std::string& name) const {
  const std::string key = CanonicalizeLabel(name);
  for (std::size_t i = 0; i < semantic.size(); ++i) {
    if (CanonicalizeLabel(semantic[i]) == key) return static_cast<LabelId>(i);
  }
  if (CanonicalizeLabel(free_name) == key) return free_index();
  return std::nullopt;
}

void ClassSet::Validate() const {
  if (semantic.empty()) throw ValidationError("class set has no semantic classes");
  if (semantic.size() >= kMaxVocabularySize) {
    throw ValidationError("too many classes");
  }
  if (!base_mask.empty() && base_mask.size() != semantic.size()) {
    throw ValidationError("base mask length differs from class count");
  }
}

std::vector<LabelId> CanonicalMap(
    const VocabularySet& vocab, const EmbeddingMatrix& emb,
    const ClassSet& classes, const EmbeddingMatrix& class_emb,
    const std::map<std::string, std::string>& overrides) {
  classes.Validate();
  if (emb.dim() != class_emb.dim()) {
    throw ValidationError("vocabulary and class embeddings differ in dimension");
  }
  if (static_cast<std::size_t>(emb.size()) != vocab.size()) {
    throw ValidationError("vocabulary has " + std::to_string(vocab.size()) +
                          " labels but " + std::to_string(emb.size()) +
                          " embedding rows");
  }
  if (static_cast<std::size_t>(class_emb.size()) != classes.semantic_count() + 1) {
    throw ValidationError("class embeddings need one row per class including free");
  }
  std::map<std::string, LabelId> forced;
  for (const auto& [label, class_name] : overrides) {
    const auto cls = classes.Find(class_name);
    if (!cls) throw ValidationError("override names unknown class '" + class_name + "'");
    forced[CanonicalizeLabel(label)] = *cls;
  }
  std::vector<LabelId> mapping(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    auto it = forced.find(vocab.labels()[i]);
    mapping[i] = it != forced.end()
                     ? it->second
                     : Classify(emb.row(static_cast<Eigen::Index>(i)).transpose(),
                                class_emb)
                           .label;
  }
  return mapping;
}

std::vector<LabelId> MapByName(
    const VocabularySet& vocab, const ClassSet& classes,
    const std::map<std::string, std::string>& overrides) {
  classes.Validate();
  std::vector<LabelId> mapping(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    std::string name = vocab.labels()[i];
    if (auto it = overrides.find(name); it != overrides.end()) {
      name = CanonicalizeLabel(it->second);
    }
    const auto cls = classes.Find(name);
    if (!cls) {
      throw ValidationError("vocabulary label '" + vocab.labels()[i] +
                            "' matches no evaluation class");
    }
    mapping[i] = *cls;
  }
  return mapping;
}

VoxelGrid ApplyClassMap(const VoxelGrid& grid, std::span<const LabelId> mapping,
                        const ClassSet& classes) {
  VoxelGrid out(grid.spec);
  for (std::size_t v = 0; v < grid.labels.size(); ++v) {
    const LabelId id = grid.labels[v];
    if (IsSentinel(id)) {
      out.labels[v] = id;
      continue;
    }
    if (id >= mapping.size()) {
      throw ValidationError("voxel label " + std::to_string(id) +
                            " outside the class mapping");
    }
    const LabelId cls = mapping[id];
    out.labels[v] = cls == classes.free_index() ? kUnlabeled : cls;
  }
  return out;
}

VoxelGrid InferSemantics(const PredictionVolume& pred,
                         const EmbeddingMatrix& class_emb) {
  pred.Validate();
  if (pred.language.cols() != class_emb.dim()) {
    throw ValidationError("language dimension does not match class embeddings");
  }
  VoxelGrid grid(pred.spec);
  for (Eigen::Index v = 0; v < pred.geometry.rows(); ++v) {
    if (!(pred.geometry(v, 1) > pred.geometry(v, 0))) continue;
    const Eigen::VectorXd feature = pred.language.row(v).transpose();
    if (feature.squaredNorm() == 0.0) {
      throw ProcessingError("zero language vector at occupied voxel " +
                            std::to_string(v));
    }
    grid.labels[static_cast<std::size_t>(v)] = Classify(feature, class_emb).label;
  }
  return grid;
}

MetricReport Score(const VoxelGrid& pred, const VoxelGrid& gt,
                   const ClassSet& classes, const ScoreOptions& options) {
  classes.Validate();
  if (!pred.spec.SameLattice(gt.spec) || pred.labels.size() != gt.labels.size()) {
    throw ValidationError("prediction and ground-truth grids differ in lattice");
  }
  if (options.mask && options.mask->size() != gt.labels.size()) {
    throw ValidationError("evaluation mask size differs from grid");
  }
  if (options.subset != ClassSubset::kAll && classes.base_mask.empty()) {
    throw ValidationError("base/novel reporting needs a base mask");
  }
  const std::size_t n = classes.semantic_count();
  auto check = [n](LabelId id, const char* which) {
    if (!IsSentinel(id) && id >= n) {
      throw ValidationError(std::string(which) + " grid label " +
                            std::to_string(id) + " outside class set");
    }
  };

  MetricReport report;
  report.class_names = classes.semantic;
  report.tallies.assign(n, ClassTally{});
  for (std::size_t v = 0; v < gt.labels.size(); ++v) {
    if (options.mask && (*options.mask)[v] == 0) continue;
    const LabelId p = pred.labels[v];
    const LabelId g = gt.labels[v];
    check(p, "predicted");
    check(g, "ground-truth");
    ++report.evaluated_voxels;
    const bool p_occ = p != kFree;
    const bool g_occ = g != kFree;
    if (p_occ && g_occ) ++report.occupancy.true_positive;
    else if (p_occ) ++report.occupancy.false_positive;
    else if (g_occ) ++report.occupancy.false_negative;

    const bool p_sem = !IsSentinel(p);
    const bool g_sem = !IsSentinel(g);
    if (p_sem && g_sem && p == g) {
      ++report.tallies[p].true_positive;
      continue;
    }
    if (p_sem) ++report.tallies[p].false_positive;
    if (g_sem) ++report.tallies[g].false_negative;
  }

  report.per_class_iou.resize(n);
  report.in_mean.assign(n, false);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const auto& t = report.tallies[c];
    if (t.union_count() > 0) {
      report.per_class_iou[c] =
          static_cast<double>(t.true_positive) / static_cast<double>(t.union_count());
    }
    bool selected = true;
    if (options.subset == ClassSubset::kBase) selected = classes.base_mask[c];
    if (options.subset == ClassSubset::kNovel) selected = !classes.base_mask[c];
    if (!selected) continue;
    if (report.per_class_iou[c]) {
      sum += *report.per_class_iou[c];
    } else if (!options.absent_as_zero) {
      continue;
    }
    report.in_mean[c] = true;
    ++count;
  }
  report.miou = count == 0 ? 1.0 : sum / static_cast<double>(count);
  const auto occ_union = report.occupancy.union_count();
  report.occupancy_iou =
      occ_union == 0 ? 1.0
                     : static_cast<double>(report.occupancy.true_positive) /
                           static_cast<double>(occ_union);
  return report;
}

void MetricReport::PrintTable(std::ostream& os) const {
  std::size_t width = 10;
  for (const auto& name : class_names) width = std::max(width, name.size());
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::fixed << std::setprecision(4);
  if (!tag.empty()) os << "[" << tag << "]\n";
  os << std::left << std::setw(static_cast<int>(width)) << "class"
     << "  " << std::right << std::setw(8) << "IoU" << std::setw(10) << "gt"
     << std::setw(10) << "pred" << "\n";
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    os << std::left << std::setw(static_cast<int>(width)) << class_names[c]
       << "  " << std::right << std::setw(8);
    if (per_class_iou[c]) {
      os << *per_class_iou[c];
    } else {
      os << "-";
    }
    os << std::setw(10) << tallies[c].gt_count() << std::setw(10)
       << tallies[c].pred_count() << (in_mean[c] ? "" : "  (excluded)") << "\n";
  }
  os << "mIoU: " << miou << "\n";
  os << "occupancy IoU: " << occupancy_iou << "\n";
  os.flags(flags);
  os.precision(precision);
}

void MetricReport::WriteKeyValue(std::ostream& os) const {
  std::ostringstream body;
  body << std::setprecision(17);
  if (!tag.empty()) body << "tag=" << tag << "\n";
  body << "miou=" << miou << "\n";
  body << "occupancy_iou=" << occupancy_iou << "\n";
  body << "evaluated_voxels=" << evaluated_voxels << "\n";
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::string key = class_names[c];
    std::replace(key.begin(), key.end(), ' ', '_');
    body << "iou." << key << "=";
    if (per_class_iou[c]) {
      body << *per_class_iou[c];
    } else {
      body << "nan";
    }
    body << "\n";
  }
  os << body.str();
}

}  // namespace semocc
