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
// Command-line front end: synthetic scene generation, label transfer,
// reconstruction, voxelization, scoring, autoencoder training and the
// pipeline ablation.
//
// Exit codes: 0 success, 1 validation error (bad input, flag or file header),
// 2 processing error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "semocc/autoencoder.h"
#include "semocc/error.h"
#include "semocc/evaluation.h"
#include "semocc/io.h"
#include "semocc/parallel.h"
#include "semocc/pipeline.h"
#include "semocc/reconstruction.h"
#include "semocc/sequence_config.h"
#include "semocc/synthetic.h"

namespace semocc {
namespace {

namespace fs = std::filesystem;

std::string FrameFile(int frame, const char* ext) {
  std::ostringstream name;
  name << "frame_" << std::setw(3) << std::setfill('0') << frame << ext;
  return name.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  WriteFileBytes(path, std::vector<char>(text.begin(), text.end()));
}

PointCloud AggregateAsCloud(const SceneAggregate& agg) {
  PointCloud cloud;
  cloud.frame_index = agg.target_frame;
  cloud.points = agg.points;
  cloud.labels = agg.labels;
  return cloud;
}

SceneAggregate CloudAsAggregate(const PointCloud& cloud) {
  if (!cloud.labels) throw ValidationError("voxelization needs a labeled point cloud");
  SceneAggregate agg;
  agg.target_frame = cloud.frame_index;
  agg.points = cloud.points;
  agg.labels = *cloud.labels;
  agg.source_frames.assign(cloud.size(), cloud.frame_index);
  return agg;
}

GridSpec ParseGridFlag(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("--grid: '" + item + "' is not a number");
    }
  }
  if (v.size() != 7) {
    throw ValidationError("--grid expects x0,y0,z0,voxel,X,Y,Z");
  }
  return GridSpec(Eigen::Vector3d(v[0], v[1], v[2]), v[3],
                  {static_cast<int>(v[4]), static_cast<int>(v[5]), static_cast<int>(v[6])});
}

ClassSet LoadClasses(const std::string& path) {
  return path.empty() ? ClassSet::Occ3dNuScenes() : ReadClassSet(path);
}

ClassSubset ParseSubset(const std::string& name) {
  if (name == "all") return ClassSubset::kAll;
  if (name == "base") return ClassSubset::kBase;
  if (name == "novel") return ClassSubset::kNovel;
  throw ValidationError("--subset expects all, base or novel");
}

struct Common {
  int workers = 0;
};

// --- gen -------------------------------------------------------------------

struct GenArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int RunGen(const GenArgs& a, const Common& c) {
  SceneConfig cfg = LoadSceneConfig(a.config);
  if (a.seed) cfg.seed = *a.seed;
  const SyntheticScene scene = Generate(cfg, ResolveWorkers(c.workers));
  const fs::path seq = WriteSyntheticScene(scene, a.out);
  std::cout << "sequence=" << seq.string() << "\n";
  std::size_t points = 0;
  for (const auto& f : scene.frames) points += f.cloud.size();
  std::cout << "frames=" << scene.frames.size() << " cameras=" << scene.rig.size()
            << " points=" << points << " labels=" << scene.labels.size() << "\n";
  return 0;
}

// --- label / reconstruct ----------------------------------------------------

struct SequenceArgs {
  std::string config;
  std::string out;
  std::optional<int> target;
};

int RunLabel(const SequenceArgs& a, const Common& c) {
  const PipelineConfig cfg = LoadPipelineConfig(a.config);
  const int workers = ResolveWorkers(c.workers ? c.workers : cfg.workers.value_or(0));
  const SequenceInput input = LoadSequence(cfg, workers);
  std::vector<VocabularySet> vocabs;
  for (const auto& f : input.frames) vocabs.push_back(f.vocab);
  const VocabularySet merged = MergeSequenceVocab(vocabs);
  const fs::path out(a.out);
  std::size_t labeled = 0;
  std::size_t total = 0;
  for (const auto& cloud : LabelSequence(input, merged, workers)) {
    WritePointCloud(out / FrameFile(cloud.frame_index, ".lpc"), cloud);
    for (LabelId id : *cloud.labels) labeled += IsSentinel(id) ? 0 : 1;
    total += cloud.size();
  }
  WriteVocabulary(out / "vocab.txt", merged);
  std::cout << "labeled_points=" << labeled << " total_points=" << total << "\n";
  return 0;
}

int RunReconstruct(const SequenceArgs& a, const Common& c) {
  const PipelineConfig cfg = LoadPipelineConfig(a.config);
  const int workers = ResolveWorkers(c.workers ? c.workers : cfg.workers.value_or(0));
  const SequenceInput input = LoadSequence(cfg, workers);
  std::vector<VocabularySet> vocabs;
  for (const auto& f : input.frames) vocabs.push_back(f.vocab);
  const VocabularySet merged = MergeSequenceVocab(vocabs);
  const auto labeled = LabelSequence(input, merged, workers);
  const int target = a.target.value_or(cfg.target_frame);
  std::vector<PointCloud> window;
  for (const auto& cloud : labeled) {
    if (!cfg.window || std::abs(cloud.frame_index - target) <= *cfg.window) {
      window.push_back(cloud);
    }
  }
  const SceneAggregate agg = Aggregate(window, input.poses, input.boxes, target, workers);
  const fs::path out(a.out);
  WritePointCloud(out / "aggregate.lpc", AggregateAsCloud(agg));
  WriteVocabulary(out / "vocab.txt", merged);
  std::cout << "aggregate_points=" << agg.size() << " target_frame=" << target << "\n";
  return 0;
}

// --- voxelize ---------------------------------------------------------------

struct VoxelizeArgs {
  std::string cloud;
  std::string config;
  std::string grid;
  std::string strategy = "majority";
  std::string out;
};

int RunVoxelize(const VoxelizeArgs& a, const Common& c) {
  const Strategy strategy = ParseStrategy(a.strategy);
  std::optional<PipelineConfig> cfg;
  if (!a.config.empty()) cfg = LoadPipelineConfig(a.config);
  GridSpec spec = cfg ? cfg->grid : GridSpec();
  if (!a.grid.empty()) spec = ParseGridFlag(a.grid);
  const int workers = ResolveWorkers(c.workers);
  const SceneAggregate agg = CloudAsAggregate(ReadPointCloud(a.cloud));
  VoxelGrid grid;
  switch (strategy) {
    case Strategy::kMajority:
      grid = VoxelizeMajority(agg, spec, workers);
      break;
    case Strategy::kNearest:
      grid = VoxelizeNearest(agg, spec, workers);
      break;
    case Strategy::kModelView: {
      if (!cfg) throw ValidationError("modelview voxelization needs --config for cameras and maps");
      const SequenceInput input = LoadSequence(*cfg, workers);
      const FrameInput* target = nullptr;
      for (const auto& f : input.frames) {
        if (f.cloud.frame_index == agg.target_frame) target = &f;
      }
      if (!target) {
        throw ValidationError("cloud frame " + std::to_string(agg.target_frame) +
                              " is not in the sequence");
      }
      grid = VoxelModelviewLabels(BinaryOccupancy(VoxelizeMajority(agg, spec, workers)),
                                  input.rig, target->maps, workers);
      if (cfg->vocab_scope == VocabMode::kSingleFrame) {
        std::vector<VocabularySet> vocabs;
        for (const auto& f : input.frames) vocabs.push_back(f.vocab);
        const auto table = RemapTable(target->vocab, MergeSequenceVocab(vocabs));
        for (auto& id : grid.labels) {
          if (!IsSentinel(id)) id = table.at(id);
        }
      }
      break;
    }
  }
  WriteVoxelGrid(a.out, grid);
  std::cout << "occupied_voxels=" << BinaryOccupancy(grid).count() << "\n";
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string classes;
  std::string subset = "all";
  std::string mask;
  bool absent_as_zero = false;
  bool key_value = false;
};

int RunEval(const EvalArgs& a, const Common&) {
  const ClassSet classes = LoadClasses(a.classes);
  const VoxelGrid pred = ReadVoxelGrid(a.pred);
  const VoxelGrid gt = ReadVoxelGrid(a.gt);
  ScoreOptions options;
  options.subset = ParseSubset(a.subset);
  options.absent_as_zero = a.absent_as_zero;
  std::vector<std::uint8_t> mask;
  if (!a.mask.empty()) {
    mask = BinaryOccupancy(ReadVoxelGrid(a.mask)).occupied;
    options.mask = std::span<const std::uint8_t>(mask);
  }
  MetricReport report = Score(pred, gt, classes, options);
  report.tag = a.subset;
  if (a.key_value) {
    report.WriteKeyValue(std::cout);
  } else {
    report.PrintTable(std::cout);
  }
  return 0;
}

// --- ae-train / ae-encode ---------------------------------------------------

struct AeTrainArgs {
  std::string embeddings;
  std::string out;
  std::vector<int> hidden{256};
  int latent = 128;
  TrainConfig train;
  bool verbose = false;
};

int RunAeTrain(const AeTrainArgs& a, const Common&) {
  const EmbeddingMatrix emb(NormalizeRows(ReadEmbeddings(a.embeddings)));
  std::vector<int> sizes{static_cast<int>(emb.dim())};
  sizes.insert(sizes.end(), a.hidden.begin(), a.hidden.end());
  sizes.push_back(a.latent);
  const TrainResult result = Train(emb, a.train, sizes);
  WriteCheckpoint(a.out, result.params);
  if (a.verbose) {
    for (const auto& e : result.report.epochs) {
      std::cerr << "epoch " << e.epoch << " train " << e.train_loss << " holdout "
                << e.holdout_loss << " lr " << e.learning_rate
                << (e.backtracked ? " (backtracked)" : "") << "\n";
    }
  }
  auto columns = [&](const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd m(emb.dim(), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      m.col(static_cast<Eigen::Index>(i)) = emb.row(rows[i]).transpose();
    }
    return m;
  };
  const auto& rep = result.report;
  std::cout << std::fixed << std::setprecision(6);
  std::cout << "train_rows=" << rep.train_rows.size() << " holdout_rows=" << rep.holdout_rows.size()
            << "\n";
  if (!rep.epochs.empty()) std::cout << "final_train_loss=" << rep.epochs.back().train_loss << "\n";
  if (!rep.holdout_rows.empty()) {
    const Eigen::MatrixXd hold = columns(rep.holdout_rows);
    std::cout << "holdout_cosine=" << MeanReconstructionCosine(result.params, hold) << "\n";
    std::cout << "holdout_latent_self_match=" << LatentSelfMatchRate(result.params, hold) << "\n";
  }
  return 0;
}

struct AeEncodeArgs {
  std::string checkpoint;
  std::string embeddings;
  std::string out;
  bool decode = false;
};

int RunAeEncode(const AeEncodeArgs& a, const Common&) {
  const AutoencoderParams params = ReadCheckpoint(a.checkpoint);
  const Eigen::MatrixXd rows = ReadEmbeddings(a.embeddings);
  const Eigen::Index expected = a.decode ? params.latent_dim() : params.input_dim();
  if (rows.cols() != expected) {
    throw ValidationError(a.embeddings + ": dimension " + std::to_string(rows.cols()) +
                          " does not match the checkpoint (" + std::to_string(expected) + ")");
  }
  const Eigen::MatrixXd out_cols = a.decode ? Decode(params, Eigen::MatrixXd(rows.transpose()))
                                            : Encode(params, Eigen::MatrixXd(rows.transpose()));
  WriteEmbeddings(a.out, out_cols.transpose());
  std::cout << "rows=" << out_cols.cols() << " dim=" << out_cols.rows() << "\n";
  return 0;
}

// --- pipeline ---------------------------------------------------------------

struct PipelineArgs {
  std::string config;
  std::string out;
  std::string strategy;
  std::optional<int> target;
  bool key_value = false;
};

int RunPipelineCommand(const PipelineArgs& a, const Common& c) {
  PipelineConfig cfg = LoadPipelineConfig(a.config);
  if (!a.strategy.empty()) cfg.strategy = ParseStrategy(a.strategy);
  if (a.target) cfg.target_frame = *a.target;
  if (!a.out.empty()) cfg.output_dir = fs::absolute(a.out);
  const int workers = ResolveWorkers(c.workers ? c.workers : cfg.workers.value_or(0));

  const SequenceInput input = LoadSequence(cfg, workers);
  const PipelineOutput out = RunPipeline(input, MakePipelineOptions(cfg, workers));

  const fs::path dir = cfg.output_dir;
  WriteVocabulary(dir / "vocab.txt", out.vocab);
  WriteVoxelGrid(dir / "grid.lvx", out.grid);
  WritePointCloud(dir / "aggregate.lpc", AggregateAsCloud(out.aggregate));
  for (const auto& cloud : out.labeled) {
    WritePointCloud(dir / "labeled" / FrameFile(cloud.frame_index, ".lpc"), cloud);
  }
  std::cout << "strategy=" << StrategyName(cfg.strategy)
            << " vocab_scope=" << VocabModeName(cfg.vocab_scope)
            << " aggregate_points=" << out.aggregate.size()
            << " occupied_voxels=" << out.observed.count() << "\n";

  if (cfg.evaluation) {
    const ClassSet classes = ReadClassSet(cfg.evaluation->classes);
    const VoxelGrid pred = PredictionInClassSpace(cfg, out, classes);
    WriteVoxelGrid(dir / "prediction.lvx", pred);
    ScoreOptions options;
    options.mask = std::span<const std::uint8_t>(out.observed.occupied);
    MetricReport report = Score(pred, ReadVoxelGrid(cfg.evaluation->ground_truth), classes, options);
    report.tag = std::string(StrategyName(cfg.strategy));
    std::ostringstream kv;
    report.WriteKeyValue(kv);
    WriteText(dir / "report.txt", kv.str());
    if (a.key_value) {
      std::cout << kv.str();
    } else {
      report.PrintTable(std::cout);
    }
  }
  return 0;
}

// --- ablate -----------------------------------------------------------------

struct AblateArgs {
  std::string config;
  int seeds = 50;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
  std::optional<double> vocab_keep;
};

int RunAblate(const AblateArgs& a, const Common& c) {
  SceneConfig cfg = LoadSceneConfig(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.noise) cfg.label_noise = *a.noise;
  if (a.vocab_keep) cfg.vocab_keep = *a.vocab_keep;
  cfg.Validate();
  const auto settings = DefaultAblationSettings();
  const AblationResult result = RunAblation(cfg, a.seeds, settings, ResolveWorkers(c.workers));
  std::cout << "seeds=" << a.seeds << " first_seed=" << cfg.seed
            << " label_noise=" << cfg.label_noise << " vocab_keep=" << cfg.vocab_keep << "\n";
  result.PrintTable(std::cout);

  // Settings (c), (d), (e) compare voxelization strategies.
  const double m = result.Mean(1), n = result.Mean(2), v = result.Mean(3);
  const bool ordered = m > n && n > v;
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "ordering: majority " << (m > n ? ">" : "<=") << " nearest "
            << (n > v ? ">" : "<=") << " modelview" << (ordered ? "" : " (violated)") << "\n";
  std::cout << "sign_test majority>nearest p=" << SignTestPValue(result.miou[1], result.miou[2])
            << "\n";
  std::cout << "sign_test nearest>modelview p=" << SignTestPValue(result.miou[2], result.miou[3])
            << "\n";
  std::cout << "vocabulary: consecutive " << (result.Mean(1) >= result.Mean(0) ? ">=" : "<")
            << " single\n";
  return 0;
}

}  // namespace
}  // namespace semocc

int main(int argc, char** argv) {
  using namespace semocc;
  CLI::App app{"semocc: text-label transfer to 3D occupancy ground truth"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--workers", common.workers,
                 "Worker threads (0: SEMOCC_WORKERS, then hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  int code = 0;

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic scene and its artifacts");
  gen_cmd->add_option("--config", gen.config, "Scene config (JSON)")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "Override the scene seed");
  gen_cmd->callback([&] { code = RunGen(gen, common); });

  SequenceArgs label;
  auto* label_cmd = app.add_subcommand("label", "Assign point labels for every frame");
  label_cmd->add_option("--config", label.config, "Sequence config (JSON)")->required();
  label_cmd->add_option("--out", label.out, "Output directory")->required();
  label_cmd->callback([&] { code = RunLabel(label, common); });

  SequenceArgs recon;
  auto* recon_cmd = app.add_subcommand("reconstruct", "Aggregate labeled frames into the target frame");
  recon_cmd->add_option("--config", recon.config, "Sequence config (JSON)")->required();
  recon_cmd->add_option("--out", recon.out, "Output directory")->required();
  recon_cmd->add_option("--target", recon.target, "Target frame (default from config)");
  recon_cmd->callback([&] { code = RunReconstruct(recon, common); });

  VoxelizeArgs vox;
  auto* vox_cmd = app.add_subcommand("voxelize", "Voxelize a labeled (aggregated) cloud");
  vox_cmd->add_option("--cloud", vox.cloud, "Labeled point cloud (LPC1)")->required();
  vox_cmd->add_option("--config", vox.config, "Sequence config; grid and, for modelview, maps");
  vox_cmd->add_option("--grid", vox.grid, "Grid as x0,y0,z0,voxel,X,Y,Z");
  vox_cmd->add_option("--strategy", vox.strategy, "majority, nearest or modelview");
  vox_cmd->add_option("--out", vox.out, "Output grid (LVX1)")->required();
  vox_cmd->callback([&] { code = RunVoxelize(vox, common); });

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a predicted grid against ground truth");
  eval_cmd->add_option("--pred", ev.pred, "Predicted grid (LVX1, class ids)")->required();
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth grid (LVX1, class ids)")->required();
  eval_cmd->add_option("--classes", ev.classes, "Class list (default: 17 occupancy classes)");
  eval_cmd->add_option("--subset", ev.subset, "all, base or novel");
  eval_cmd->add_option("--mask", ev.mask, "Grid whose non-free voxels are evaluated");
  eval_cmd->add_flag("--absent-as-zero", ev.absent_as_zero, "Average absent classes as IoU 0");
  eval_cmd->add_flag("--kv", ev.key_value, "Print key=value lines instead of a table");
  eval_cmd->callback([&] { code = RunEval(ev, common); });

  AeTrainArgs ae;
  auto* ae_cmd = app.add_subcommand("ae-train", "Train the embedding autoencoder");
  ae_cmd->add_option("--embeddings", ae.embeddings, "Training embeddings (LEM1)")->required();
  ae_cmd->add_option("--out", ae.out, "Checkpoint (LAE1)")->required();
  ae_cmd->add_option("--hidden", ae.hidden, "Hidden widths, encoder side");
  ae_cmd->add_option("--latent", ae.latent, "Latent width");
  ae_cmd->add_option("--epochs", ae.train.epochs, "Epochs");
  ae_cmd->add_option("--lr", ae.train.learning_rate, "Initial learning rate");
  ae_cmd->add_option("--batch", ae.train.batch_size, "Mini-batch size");
  ae_cmd->add_option("--holdout", ae.train.holdout_fraction, "Held-out fraction");
  ae_cmd->add_option("--seed", ae.train.seed, "Initialization and shuffling seed");
  ae_cmd->add_flag("--verbose", ae.verbose, "Log every epoch to stderr");
  ae_cmd->callback([&] { code = RunAeTrain(ae, common); });

  AeEncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("ae-encode", "Encode (or decode) embeddings with a checkpoint");
  enc_cmd->add_option("--checkpoint", enc.checkpoint, "Checkpoint (LAE1)")->required();
  enc_cmd->add_option("--embeddings", enc.embeddings, "Input rows (LEM1)")->required();
  enc_cmd->add_option("--out", enc.out, "Output rows (LEM1)")->required();
  enc_cmd->add_flag("--decode", enc.decode, "Decode latent rows instead");
  enc_cmd->callback([&] { code = RunAeEncode(enc, common); });

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Label, aggregate, voxelize and score a sequence");
  pipe_cmd->add_option("--config", pipe.config, "Sequence config (JSON)")->required();
  pipe_cmd->add_option("--out", pipe.out, "Output directory (default from config)");
  pipe_cmd->add_option("--strategy", pipe.strategy, "Override: majority, nearest or modelview");
  pipe_cmd->add_option("--target", pipe.target, "Override the target frame");
  pipe_cmd->add_flag("--kv", pipe.key_value, "Print key=value lines instead of a table");
  pipe_cmd->callback([&] { code = RunPipelineCommand(pipe, common); });

  AblateArgs abl;
  auto* abl_cmd = app.add_subcommand("ablate", "Compare pipeline settings over seeded scenes");
  abl_cmd->add_option("--config", abl.config, "Scene config (JSON)")->required();
  abl_cmd->add_option("--seeds", abl.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  abl_cmd->add_option("--seed", abl.seed, "First seed (default from config)");
  abl_cmd->add_option("--noise", abl.noise, "Override the segmentation noise");
  abl_cmd->add_option("--vocab-keep", abl.vocab_keep,
                      "Override the fraction of visible labels kept per frame");
  abl_cmd->callback([&] { code = RunAblate(abl, common); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const ProcessingError& e) {
    std::cerr << "processing error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}
