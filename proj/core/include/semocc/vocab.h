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
#ifndef SEMOCC_VOCAB_H_
#define SEMOCC_VOCAB_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "semocc/label.h"

namespace semocc {

enum class VocabScope { kPerFrame, kPerSequence, kDataset };

// Lowercase + trim ASCII whitespace. No lemmatization.
std::string CanonicalizeLabel(std::string_view text);

// Ordered list of distinct canonical labels; the label id is the position.
class VocabularySet {
 public:
  VocabularySet() = default;

  // Canonicalizes every entry. Throws ValidationError on empty labels,
  // duplicates after canonicalization, or more than kMaxVocabularySize labels.
  explicit VocabularySet(const std::vector<std::string>& labels,
                         VocabScope scope = VocabScope::kPerFrame);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  VocabScope scope() const { return scope_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(LabelId id) const { return labels_.at(id); }

  // Lookup by (canonicalized) text.
  std::optional<LabelId> Find(std::string_view text) const;

  friend bool operator==(const VocabularySet& a, const VocabularySet& b) {
    return a.labels_ == b.labels_ && a.scope_ == b.scope_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, LabelId> index_;
  VocabScope scope_ = VocabScope::kPerFrame;
};

// Union of per-frame vocabularies ordered by first appearance (frame order,
// then within-frame order). Duplicates collapse. Throws ValidationError on an
// empty list.
VocabularySet MergeSequenceVocab(std::span<const VocabularySet> frames);

// Id translation from a frame vocabulary into a merged vocabulary. Every frame
// label must be present in `merged`.
std::vector<LabelId> RemapTable(const VocabularySet& frame,
                                const VocabularySet& merged);

// N_t x D text embeddings. Rows are indexed by label id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws ValidationError if any row has zero norm or is non-finite.
  explicit EmbeddingMatrix(Eigen::MatrixXd rows);

  Eigen::Index size() const { return rows_.rows(); }
  Eigen::Index dim() const { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const { return rows_; }
  auto row(Eigen::Index i) const { return rows_.row(i); }
  const Eigen::VectorXd& row_norms() const { return norms_; }

 private:
  Eigen::MatrixXd rows_;
  Eigen::VectorXd norms_;
};

struct Classification {
  LabelId label;
  double score;  // cosine similarity in [-1, 1]
};

// argmax_j cos(feature, row_j); ties resolve to the smallest id. Throws
// ValidationError on a dimension mismatch and ProcessingError on a zero-norm
// feature.
Classification Classify(const Eigen::Ref<const Eigen::VectorXd>& feature,
                        const EmbeddingMatrix& emb);

// Unit-normalizes every row. A zero row throws ValidationError naming it.
EmbeddingMatrix NormalizeRows(const EmbeddingMatrix& emb);
// Same check applied to a raw matrix, for callers that have not yet built an
// EmbeddingMatrix.
Eigen::MatrixXd NormalizeRows(const Eigen::MatrixXd& rows);

// Embeddings for a merged vocabulary, taking each label's row from the first
// frame that lists it. Throws ValidationError on count or dimension mismatches
// or a merged label no frame provides.
EmbeddingMatrix MergeEmbeddings(std::span<const VocabularySet> frames,
                                std::span<const EmbeddingMatrix> embeddings,
                                const VocabularySet& merged);

}  // namespace semocc

#endif  // SEMOCC_VOCAB_H_
