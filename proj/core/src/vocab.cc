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
#include "semocc/vocab.h"

#include <algorithm>
#include <cctype>
#include <string>

#include "semocc/error.h"

namespace semocc {

std::string CanonicalizeLabel(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  auto begin = std::find_if_not(text.begin(), text.end(), is_space);
  auto end = std::find_if_not(text.rbegin(), std::make_reverse_iterator(begin),
                              is_space)
                 .base();
  std::string out(begin, end);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

VocabularySet::VocabularySet(const std::vector<std::string>& labels,
                             VocabScope scope)
    : scope_(scope) {
  if (labels.size() > kMaxVocabularySize) {
    throw ValidationError("vocabulary exceeds " +
                          std::to_string(kMaxVocabularySize) + " labels");
  }
  labels_.reserve(labels.size());
  for (const auto& raw : labels) {
    std::string label = CanonicalizeLabel(raw);
    if (label.empty()) throw ValidationError("vocabulary contains an empty label");
    const auto id = static_cast<LabelId>(labels_.size());
    if (!index_.emplace(label, id).second) {
      throw ValidationError("duplicate vocabulary label '" + label + "'");
    }
    labels_.push_back(std::move(label));
  }
}

std::optional<LabelId> VocabularySet::Find(std::string_view text) const {
  auto it = index_.find(CanonicalizeLabel(text));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VocabularySet MergeSequenceVocab(std::span<const VocabularySet> frames) {
  if (frames.empty()) throw ValidationError("no vocabulary to merge");
  std::vector<std::string> merged;
  std::unordered_map<std::string, bool> seen;
  for (const auto& frame : frames) {
    for (const auto& label : frame.labels()) {
      if (seen.emplace(label, true).second) merged.push_back(label);
    }
  }
  return VocabularySet(merged, VocabScope::kPerSequence);
}

std::vector<LabelId> RemapTable(const VocabularySet& frame,
                                const VocabularySet& merged) {
  std::vector<LabelId> table(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    auto id = merged.Find(frame.labels()[i]);
    if (!id) {
      throw ValidationError("label '" + frame.labels()[i] +
                            "' missing from merged vocabulary");
    }
    table[i] = *id;
  }
  return table;
}

EmbeddingMatrix::EmbeddingMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() > static_cast<Eigen::Index>(kMaxVocabularySize)) {
    throw ValidationError("embedding matrix has too many rows");
  }
  if (!rows_.allFinite()) throw ValidationError("embedding matrix is not finite");
  norms_ = rows_.rowwise().norm();
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    if (norms_[i] == 0.0) {
      throw ValidationError("embedding row " + std::to_string(i) +
                            " has zero norm");
    }
  }
}

Classification Classify(const Eigen::Ref<const Eigen::VectorXd>& feature,
                        const EmbeddingMatrix& emb) {
  if (feature.size() != emb.dim()) {
    throw ValidationError("feature dimension " + std::to_string(feature.size()) +
                          " does not match embedding dimension " +
                          std::to_string(emb.dim()));
  }
  if (emb.size() == 0) throw ValidationError("empty embedding matrix");
  if (!feature.allFinite()) throw ValidationError("feature is not finite");
  const double norm = feature.norm();
  if (norm == 0.0) throw ProcessingError("cosine undefined for zero feature");
  Classification best{0, -2.0};
  for (Eigen::Index j = 0; j < emb.size(); ++j) {
    const double cos = emb.row(j).dot(feature) / (norm * emb.row_norms()[j]);
    if (cos > best.score) best = {static_cast<LabelId>(j), cos};
  }
  best.score = std::clamp(best.score, -1.0, 1.0);
  return best;
}

Eigen::MatrixXd NormalizeRows(const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out = rows;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n == 0.0) {
      throw ValidationError("cannot normalize zero embedding row " +
                            std::to_string(i));
    }
    out.row(i) /= n;
  }
  return out;
}

EmbeddingMatrix NormalizeRows(const EmbeddingMatrix& emb) {
  return EmbeddingMatrix(NormalizeRows(emb.rows()));
}

EmbeddingMatrix MergeEmbeddings(std::span<const VocabularySet> frames,
                                std::span<const EmbeddingMatrix> embeddings,
                                const VocabularySet& merged) {
  if (frames.size() != embeddings.size()) {
    throw ValidationError("need one embedding matrix per frame vocabulary");
  }
  if (frames.empty()) throw ValidationError("no frame vocabularies to merge");
  const Eigen::Index dim = embeddings.front().dim();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(merged.size()), dim);
  std::vector<bool> filled(merged.size(), false);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (embeddings[f].dim() != dim) {
      throw ValidationError("frame embeddings differ in dimension");
    }
    if (static_cast<std::size_t>(embeddings[f].size()) != frames[f].size()) {
      throw ValidationError("frame " + std::to_string(f) + " has " +
                            std::to_string(frames[f].size()) + " labels but " +
                            std::to_string(embeddings[f].size()) + " embedding rows");
    }
    for (std::size_t i = 0; i < frames[f].size(); ++i) {
      const auto id = merged.Find(frames[f].labels()[i]);
      if (!id || filled[*id]) continue;
      rows.row(*id) = embeddings[f].row(static_cast<Eigen::Index>(i));
      filled[*id] = true;
    }
  }
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i]) {
      throw ValidationError("no embedding for merged label '" + merged.labels()[i] + "'");
    }
  }
  return EmbeddingMatrix(std::move(rows));
}

}  // namespace semocc
