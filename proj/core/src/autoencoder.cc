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
#include "semocc/autoencoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "semocc/error.h"

namespace semocc {
namespace {

Eigen::MatrixXd Activate(Activation act, const Eigen::MatrixXd& z) {
  if (act == Activation::kLinear) return z;
  // softplus(z) - ln 2, with softplus(z) = max(z, 0) + log1p(exp(-|z|))
  return z.unaryExpr([](double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))) - std::numbers::ln2;
  });
}

Eigen::MatrixXd ActivationSlope(Activation act, const Eigen::MatrixXd& z) {
  if (act == Activation::kLinear) return Eigen::MatrixXd::Ones(z.rows(), z.cols());
  return z.unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
}

Eigen::MatrixXd Run(std::span<const DenseLayer> layers, Eigen::MatrixXd x) {
  for (const auto& layer : layers) {
    if (layer.in_dim() != x.rows()) {
      throw ValidationError("layer expects input dimension " +
                            std::to_string(layer.in_dim()) + ", got " +
                            std::to_string(x.rows()));
    }
    x = Activate(layer.activation,
                 (layer.weight * x).colwise() + layer.bias);
  }
  return x;
}

std::vector<const DenseLayer*> AllLayers(const AutoencoderParams& p) {
  std::vector<const DenseLayer*> out;
  for (const auto& l : p.encoder) out.push_back(&l);
  for (const auto& l : p.decoder) out.push_back(&l);
  return out;
}

std::vector<DenseLayer*> AllLayers(AutoencoderParams& p) {
  std::vector<DenseLayer*> out;
  for (auto& l : p.encoder) out.push_back(&l);
  for (auto& l : p.decoder) out.push_back(&l);
  return out;
}

// params += scale * delta
void AddScaled(AutoencoderParams& params, const AutoencoderParams& delta,
               double scale) {
  auto dst = AllLayers(params);
  auto src = AllLayers(delta);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i]->weight += scale * src[i]->weight;
    dst[i]->bias += scale * src[i]->bias;
  }
}

Eigen::MatrixXd Columns(const Eigen::MatrixXd& source,
                        std::span<const Eigen::Index> idx) {
  Eigen::MatrixXd out(source.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = source.col(idx[i]);
  }
  return out;
}

double CosineOrThrow(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw ProcessingError("cosine undefined for a zero-norm embedding");
  }
  return a.dot(b) / (na * nb);
}

}  // namespace

void AutoencoderParams::Validate() const {
  if (encoder.empty() || decoder.empty()) {
    throw ValidationError("autoencoder needs encoder and decoder layers");
  }
  Eigen::Index dim = encoder.front().in_dim();
  const Eigen::Index input = dim;
  for (const auto* layer : AllLayers(*this)) {
    if (layer->in_dim() != dim || layer->bias.size() != layer->out_dim()) {
      throw ValidationError("autoencoder layer shapes do not chain");
    }
    dim = layer->out_dim();
  }
  if (dim != input) {
    throw ValidationError("decoder output dimension differs from encoder input");
  }
  if (latent_dim() != decoder.front().in_dim()) {
    throw ValidationError("decoder input dimension differs from latent size");
  }
}

bool operator==(const AutoencoderParams& a, const AutoencoderParams& b) {
  auto la = AllLayers(a);
  auto lb = AllLayers(b);
  if (la.size() != lb.size() || a.encoder.size() != b.encoder.size()) return false;
  for (std::size_t i = 0; i < la.size(); ++i) {
    if (la[i]->activation != lb[i]->activation ||
        la[i]->weight.rows() != lb[i]->weight.rows() ||
        la[i]->weight.cols() != lb[i]->weight.cols() ||
        la[i]->weight != lb[i]->weight || la[i]->bias != lb[i]->bias) {
      return false;
    }
  }
  return true;
}

AutoencoderParams MakeAutoencoder(std::span<const int> sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw ValidationError("autoencoder needs >= 2 sizes");
  for (int s : sizes) {
    if (s <= 0) throw ValidationError("layer sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  auto make = [&rng](int in, int out, Activation act) {
    const double limit = std::sqrt(3.0 / in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weight.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = dist(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(out);
    layer.activation = act;
    return layer;
  };
  AutoencoderParams params;
  const std::size_t n = sizes.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    params.encoder.push_back(make(sizes[i], sizes[i + 1],
                                  i + 2 == n ? Activation::kLinear
                                             : Activation::kSoftplus));
  }
  for (std::size_t i = n - 1; i > 0; --i) {
    params.decoder.push_back(make(sizes[i], sizes[i - 1],
                                  i == 1 ? Activation::kLinear
                                         : Activation::kSoftplus));
  }
  return params;
}

Eigen::MatrixXd Encode(const AutoencoderParams& params, const Eigen::MatrixXd& e) {
  return Run(params.encoder, e);
}

Eigen::MatrixXd Decode(const AutoencoderParams& params, const Eigen::MatrixXd& z) {
  return Run(params.decoder, z);
}

Eigen::VectorXd Encode(const AutoencoderParams& params, const Eigen::VectorXd& e) {
  return Run(params.encoder, Eigen::MatrixXd(e)).col(0);
}

Eigen::VectorXd Decode(const AutoencoderParams& params, const Eigen::VectorXd& z) {
  return Run(params.decoder, Eigen::MatrixXd(z)).col(0);
}

double AeLoss(const Eigen::VectorXd& e, const Eigen::VectorXd& e_hat) {
  if (e.size() != e_hat.size()) {
    throw ValidationError("embedding and reconstruction differ in dimension");
  }
  return (e - e_hat).norm() + (1.0 - CosineOrThrow(e, e_hat));
}

Eigen::VectorXd AeLossGradient(const Eigen::VectorXd& e,
                               const Eigen::VectorXd& e_hat) {
  if (e.size() != e_hat.size()) {
    throw ValidationError("embedding and reconstruction differ in dimension");
  }
  const double cos = CosineOrThrow(e, e_hat);
  const double ne = e.norm();
  const double nh = e_hat.norm();
  Eigen::VectorXd grad = -(e / (ne * nh) - cos * e_hat / (nh * nh));
  const Eigen::VectorXd diff = e_hat - e;
  const double dn = diff.norm();
  if (dn > 0.0) grad += diff / dn;
  return grad;
}

double BatchLoss(const AutoencoderParams& params, const Eigen::MatrixXd& batch,
                 AutoencoderParams* grad) {
  const auto layers = AllLayers(params);
  const Eigen::Index n = batch.cols();
  if (n == 0) throw ValidationError("empty batch");

  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
  inputs.reserve(layers.size());
  pre.reserve(layers.size());
  Eigen::MatrixXd x = batch;
  for (const auto* layer : layers) {
    if (layer->in_dim() != x.rows()) {
      throw ValidationError("batch dimension does not match autoencoder input");
    }
    inputs.push_back(x);
    pre.push_back((layer->weight * x).colwise() + layer->bias);
    x = Activate(layer->activation, pre.back());
  }

  double total = 0.0;
  Eigen::MatrixXd upstream(x.rows(), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::VectorXd e = batch.col(c);
    const Eigen::VectorXd e_hat = x.col(c);
    total += AeLoss(e, e_hat);
    if (grad) upstream.col(c) = AeLossGradient(e, e_hat) / static_cast<double>(n);
  }
  if (!grad) return total / static_cast<double>(n);

  *grad = params;
  auto out = AllLayers(*grad);
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Eigen::MatrixXd dz =
        upstream.cwiseProduct(ActivationSlope(layers[i]->activation, pre[i]));
    out[i]->weight.noalias() = dz * inputs[i].transpose();
    out[i]->bias = dz.rowwise().sum();
    if (i > 0) upstream.noalias() = layers[i]->weight.transpose() * dz;
  }
  return total / static_cast<double>(n);
}

void TrainConfig::Validate() const {
  if (epochs <= 0) throw ValidationError("epochs must be positive");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (batch_size <= 0) throw ValidationError("batch size must be positive");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ValidationError("holdout fraction must lie in [0, 1)");
  }
}

TrainResult Train(const EmbeddingMatrix& embeddings, const TrainConfig& cfg,
                  std::span<const int> sizes) {
  cfg.Validate();
  const Eigen::Index n = embeddings.size();
  if (n < 2) throw ValidationError("training needs at least 2 embeddings");
  if (sizes.size() < 2 || sizes.front() != embeddings.dim()) {
    throw ValidationError("architecture input size must equal embedding dimension " +
                          std::to_string(embeddings.dim()));
  }
  if (sizes.back() >= sizes.front()) {
    throw ValidationError("latent dimension must be smaller than the input");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  auto holdout = static_cast<Eigen::Index>(std::floor(cfg.holdout_fraction * n));
  holdout = std::min(holdout, n - 1);

  TrainResult result;
  auto& report = result.report;
  report.holdout_rows.assign(order.begin(), order.begin() + holdout);
  report.train_rows.assign(order.begin() + holdout, order.end());
  std::sort(report.holdout_rows.begin(), report.holdout_rows.end());
  std::sort(report.train_rows.begin(), report.train_rows.end());

  const Eigen::MatrixXd all = embeddings.rows().transpose();
  const Eigen::MatrixXd train_set = Columns(all, report.train_rows);
  const Eigen::MatrixXd holdout_set = Columns(all, report.holdout_rows);

  AutoencoderParams& params = result.params;
  params = MakeAutoencoder(sizes, rng());
  double lr = cfg.learning_rate;
  double accepted = BatchLoss(params, train_set);
  if (!std::isfinite(accepted)) throw DivergenceError(0, "initial loss is not finite");

  std::vector<Eigen::Index> shuffled(report.train_rows.size());
  std::iota(shuffled.begin(), shuffled.end(), Eigen::Index{0});
  AutoencoderParams grad;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const AutoencoderParams snapshot = params;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t start = 0; start < shuffled.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(shuffled.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const Eigen::MatrixXd batch = Columns(
          train_set, std::span<const Eigen::Index>(shuffled).subspan(start, stop - start));
      BatchLoss(params, batch, &grad);
      AddScaled(params, grad, -lr);
    }
    double loss = BatchLoss(params, train_set);
    if (!std::isfinite(loss)) {
      throw DivergenceError(epoch, "training loss became non-finite at epoch " +
                                       std::to_string(epoch));
    }
    EpochRecord record;
    record.epoch = epoch;
    record.learning_rate = lr;
    if (loss > accepted) {
      params = snapshot;
      lr *= 0.5;
      record.backtracked = true;
      loss = accepted;
    }
    accepted = loss;
    record.train_loss = loss;
    record.holdout_loss = holdout > 0 ? BatchLoss(params, holdout_set) : 0.0;
    report.epochs.push_back(record);
  }
  return result;
}

double MeanReconstructionCosine(const AutoencoderParams& params,
                                const Eigen::MatrixXd& columns) {
  if (columns.cols() == 0) return 0.0;
  const Eigen::MatrixXd recon = Decode(params, Encode(params, columns));
  double sum = 0.0;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    sum += CosineOrThrow(columns.col(c), recon.col(c));
  }
  return sum / static_cast<double>(columns.cols());
}

double LatentSelfMatchRate(const AutoencoderParams& params,
                           const Eigen::MatrixXd& columns) {
  if (columns.cols() == 0) return 0.0;
  const EmbeddingMatrix latent(Encode(params, columns).transpose());
  Eigen::Index hits = 0;
  for (Eigen::Index c = 0; c < latent.size(); ++c) {
    if (Classify(latent.row(c).transpose(), latent).label == c) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(latent.size());
}

}  // namespace semocc
