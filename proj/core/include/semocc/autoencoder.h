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
#ifndef SEMOCC_AUTOENCODER_H_
#define SEMOCC_AUTOENCODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "semocc/vocab.h"

namespace semocc {

enum class Activation : std::uint32_t {
  kLinear = 0,
  kSoftplus = 1,  // softplus(z) - ln 2: a smooth ramp through the origin
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::kLinear;

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

// Encoder maps D -> D'; decoder maps D' -> D.
struct AutoencoderParams {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;

  Eigen::Index input_dim() const { return encoder.front().in_dim(); }
  Eigen::Index latent_dim() const { return encoder.back().out_dim(); }
  // Throws ValidationError unless layer shapes chain D -> D' -> D.
  void Validate() const;

  friend bool operator==(const AutoencoderParams& a, const AutoencoderParams& b);
};

// Symmetric bottleneck for `sizes` = {D, h1, ..., D'}: softplus between
// layers, linear encoder and decoder outputs. Weights are drawn uniform in
// +-sqrt(3 / fan_in) from a generator seeded with `seed`; biases start at 0.
AutoencoderParams MakeAutoencoder(std::span<const int> sizes, std::uint64_t seed);

// Columns are samples.
Eigen::MatrixXd Encode(const AutoencoderParams& params, const Eigen::MatrixXd& e);
Eigen::MatrixXd Decode(const AutoencoderParams& params, const Eigen::MatrixXd& z);
Eigen::VectorXd Encode(const AutoencoderParams& params, const Eigen::VectorXd& e);
Eigen::VectorXd Decode(const AutoencoderParams& params, const Eigen::VectorXd& z);

// ||e - e_hat||_2 + (1 - cos(e, e_hat)). Throws ProcessingError when either
// vector has zero norm.
double AeLoss(const Eigen::VectorXd& e, const Eigen::VectorXd& e_hat);
// d AeLoss / d e_hat. The norm term contributes nothing at e_hat == e.
Eigen::VectorXd AeLossGradient(const Eigen::VectorXd& e,
                               const Eigen::VectorXd& e_hat);

// Mean AeLoss over the columns of `batch` and, if `grad` is non-null, its
// gradient with respect to every weight and bias (same layout as params).
double BatchLoss(const AutoencoderParams& params, const Eigen::MatrixXd& batch,
                 AutoencoderParams* grad = nullptr);

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 0.5;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.2;

  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;    // of the accepted parameters
  double holdout_loss = 0.0;  // 0 when there is no holdout set
  double learning_rate = 0.0;
  bool backtracked = false;   // epoch rejected, learning rate halved
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> holdout_rows;
};

struct TrainResult {
  AutoencoderParams params;
  TrainReport report;
};

// Mini-batch gradient descent on the mean AeLoss. After every epoch the full
// training loss is re-evaluated; if it went up, the epoch is undone and the
// learning rate halved, so accepted train losses never increase. Throws
// ValidationError for fewer than 2 embeddings or latent >= input dimension,
// and DivergenceError if a loss turns non-finite.
TrainResult Train(const EmbeddingMatrix& embeddings, const TrainConfig& cfg,
                  std::span<const int> sizes);

// Mean cosine between each column and its reconstruction.
double MeanReconstructionCosine(const AutoencoderParams& params,
                                const Eigen::MatrixXd& columns);

// Fraction of columns whose nearest latent code (by cosine, among all encoded
// columns) is their own.
double LatentSelfMatchRate(const AutoencoderParams& params,
                           const Eigen::MatrixXd& columns);

}  // namespace semocc

#endif  // SEMOCC_AUTOENCODER_H_
