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
#ifndef SEMOCC_EVALUATION_H_
#define SEMOCC_EVALUATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "semocc/label.h"
#include "semocc/losses.h"
#include "semocc/reconstruction.h"
#include "semocc/vocab.h"

namespace semocc {

// Evaluation classes: semantic classes with ids 0..N-1 plus one free class,
// which in grids is the kFree sentinel.
struct ClassSet {
  std::vector<std::string> semantic;
  std::string free_name = "free";
  // Optional, one flag per semantic class: true for base (seen) classes.
  std::vector<bool> base_mask;

  // The 17 semantic classes (including "others") + free of the occupancy
  // benchmark.
  static ClassSet Occ3dNuScenes();
  // Base classes of the open-vocabulary split: bicycle, motorcycle,
  // traffic cone, sidewalk.
  static std::vector<bool> Occ3dBaseMask();

  std::size_t semantic_count() const { return semantic.size(); }
  LabelId free_index() const { return static_cast<LabelId>(semantic.size()); }
  // Semantic names followed by the free name.
  std::vector<std::string> AllNames() const;
  std::optional<LabelId> Find(const std::string& name) const;
  void Validate() const;
};

// Maps every vocabulary label to the canonical class (semantic classes or the
// free class, indexed as in ClassSet::AllNames) whose embedding is most
// cosine-similar. `overrides` (vocabulary label -> class name) take
// precedence. Throws ValidationError on a dimension or row-count mismatch or
// an override naming an unknown class.
std::vector<LabelId> CanonicalMap(
    const VocabularySet& vocab, const EmbeddingMatrix& emb,
    const ClassSet& classes, const EmbeddingMatrix& class_emb,
    const std::map<std::string, std::string>& overrides = {});

// Maps vocabulary labels to classes by exact (canonicalized) name, with
// `overrides` taking precedence. Throws ValidationError for a label matching
// no class.
std::vector<LabelId> MapByName(
    const VocabularySet& vocab, const ClassSet& classes,
    const std::map<std::string, std::string>& overrides = {});

// Relabels a vocabulary-space grid into class space. Labels mapped to the free
// class become kUnlabeled (they still mark occupied space); sentinels pass
// through.
VoxelGrid ApplyClassMap(const VoxelGrid& grid, std::span<const LabelId> mapping,
                        const ClassSet& classes);

// Occupied where the occupied logit exceeds the free logit; occupied voxels
// take the argmax-cosine row of class_emb. Throws ProcessingError for a
// zero language vector at an occupied voxel.
VoxelGrid InferSemantics(const PredictionVolume& pred,
                         const EmbeddingMatrix& class_emb);

enum class ClassSubset { kAll, kBase, kNovel };

struct ScoreOptions {
  ClassSubset subset = ClassSubset::kAll;
  // Count classes absent from both grids as IoU 0 instead of skipping them.
  bool absent_as_zero = false;
  // Optional per-voxel evaluation mask (non-zero = evaluated).
  std::optional<std::span<const std::uint8_t>> mask;
};

struct ClassTally {
  std::uint64_t true_positive = 0;
  std::uint64_t false_positive = 0;
  std::uint64_t false_negative = 0;
  std::uint64_t gt_count() const { return true_positive + false_negative; }
  std::uint64_t pred_count() const { return true_positive + false_positive; }
  std::uint64_t union_count() const {
    return true_positive + false_positive + false_negative;
  }
};

struct MetricReport {
  std::vector<std::string> class_names;           // semantic classes
  std::vector<std::optional<double>> per_class_iou;  // absent: undefined
  std::vector<ClassTally> tallies;
  std::vector<bool> in_mean;                      // classes averaged into miou
  double miou = 0.0;
  double occupancy_iou = 0.0;
  ClassTally occupancy;
  std::uint64_t evaluated_voxels = 0;
  std::string tag;

  // Aligned plain-text table.
  void PrintTable(std::ostream& os) const;
  // key=value lines for machine consumption.
  void WriteKeyValue(std::ostream& os) const;
};

// Per-class IoU = |pred=c & gt=c| / |pred=c | gt=c|. kUnlabeled counts as
// occupied but matches no semantic class. miou averages defined IoUs of the
// selected subset; with no defined class it is 1. Occupancy IoU compares
// label != kFree and is 1 when both grids are empty. Throws ValidationError on
// a lattice mismatch or a label outside the class set.
MetricReport Score(const VoxelGrid& pred, const VoxelGrid& gt,
                   const ClassSet& classes, const ScoreOptions& options = {});

}  // namespace semocc

#endif  // SEMOCC_EVALUATION_H_
