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
// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// if any selected criterion fails. `--only ACn` runs a single criterion.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gradient_check.h"
#include "oracles.h"
#include "semocc/autoencoder.h"
#include "semocc/evaluation.h"
#include "semocc/io.h"
#include "semocc/losses.h"
#include "semocc/reconstruction.h"
#include "semocc/synthetic.h"

namespace semocc {
namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

SceneConfig DemoConfig(const char* name) {
  return LoadSceneConfig(fs::path(SEMOCC_TEST_DATA_DIR) / "demo" / name);
}

// --- AC1 ---------------------------------------------------------------------

Verdict Ac1() {
  const Stopwatch clock;
  const GridSpec spec(Eigen::Vector3d(-2.0, -2.0, -1.0), 0.2, {20, 20, 20});
  int majority_ok = 0, nearest_ok = 0;
  std::size_t max_points = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t count = 1 + rng() % 10000;
    max_points = std::max(max_points, count);
    const SceneAggregate agg = oracle::RandomAggregate(rng, spec, count, 6, 0.1);
    majority_ok += VoxelizeMajority(agg, spec, 1) == oracle::Majority(agg, spec);
    nearest_ok += VoxelizeNearest(agg, spec, 1) == oracle::Nearest(agg, spec);
  }
  const double t = clock.seconds();
  return {majority_ok == 100 && nearest_ok == 100 && t < 30.0,
          "majority " + std::to_string(majority_ok) + "/100, nearest " +
              std::to_string(nearest_ok) + "/100 equal their oracles, max points " +
              std::to_string(max_points) + ", " + Fmt(t, 1) + " s (limit 30 s)"};
}

// --- AC2 ---------------------------------------------------------------------

Verdict Ac2() {
  const SceneConfig cfg = DemoConfig("noiseless.json");
  const Stopwatch clock;
  const SyntheticScene s = Generate(cfg);
  const ScoredRun run = RunAndScore(s, Strategy::kMajority, cfg.vocab_scope);
  const double t = clock.seconds();
  std::size_t checked = 0, recovered = 0;
  for (std::size_t k = 0; k < s.frames.size(); ++k) {
    const PointCloud& labeled = run.output.labeled[k];
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      const auto expected = oracle::PixelCenterLabel(s, static_cast<int>(k), labeled.points[i]);
      const LabelId got = labeled.labels->at(i);
      ++checked;
      if (!expected) {
        recovered += got == kUnlabeled;
        continue;
      }
      const std::optional<std::string> name =
          got == kUnlabeled ? std::nullopt
                            : std::optional<std::string>(run.output.vocab.label(got));
      recovered += name == *expected;
    }
  }
  std::size_t moving = 0;
  for (const auto& p : cfg.primitives) moving += p.velocity.norm() > 0.0;
  const bool pass = run.report.miou >= 0.95 && recovered == checked && t < 10.0;
  return {pass, std::to_string(cfg.frames) + " frames, " + std::to_string(cfg.cameras.size()) +
                    " cameras, " + std::to_string(moving) + " moving box; mIoU " +
                    Fmt(run.report.miou) + " (>= 0.95) over " +
                    std::to_string(run.report.evaluated_voxels) +
                    " observed voxels; point labels " + std::to_string(recovered) + "/" +
                    std::to_string(checked) + " recovered; " + Fmt(t, 2) + " s (limit 10 s)"};
}

// --- AC3 / AC4 ---------------------------------------------------------------

const AblationSetting& Setting(const std::vector<AblationSetting>& all, const char* name) {
  return *std::find_if(all.begin(), all.end(), [&](const auto& s) { return s.name == name; });
}

Verdict Ac3() {
  SceneConfig cfg = DemoConfig("noisy.json");
  cfg.label_noise = 0.2;
  const auto all = DefaultAblationSettings();
  const std::vector<AblationSetting> settings{Setting(all, "(c)"), Setting(all, "(d)"),
                                              Setting(all, "(e)")};
  const Stopwatch clock;
  const AblationResult r = RunAblation(cfg, 50, settings);
  const double t = clock.seconds();
  const double c = r.Mean(0), d = r.Mean(1), e = r.Mean(2);
  const double p_cd = SignTestPValue(r.miou[0], r.miou[1]);
  const double p_de = SignTestPValue(r.miou[1], r.miou[2]);
  const bool pass = c > d && d > e && p_cd < 0.05 && p_de < 0.05 && t < 300.0;
  std::ostringstream s;
  s << "mean mIoU majority " << Fmt(c) << " > nearest " << Fmt(d) << " > modelview " << Fmt(e)
    << "; sign test p " << std::scientific << std::setprecision(2) << p_cd << ", " << p_de
    << " (< 0.05); " << Fmt(t, 1) << " s (limit 300 s)";
  return {pass, s.str()};
}

Verdict Ac4() {
  SceneConfig cfg = DemoConfig("noisy.json");
  cfg.vocab_keep = 0.6;
  const auto all = DefaultAblationSettings();
  const std::vector<AblationSetting> settings{Setting(all, "(b)"), Setting(all, "(c)")};
  const Stopwatch clock;
  const AblationResult r = RunAblation(cfg, 50, settings);
  const double t = clock.seconds();
  const double b = r.Mean(0), c = r.Mean(1);
  return {c >= b && t < 300.0, "vocab_keep 0.6, 50 seeds: consecutive " + Fmt(c) +
                                   " >= single " + Fmt(b) + "; " + Fmt(t, 1) +
                                   " s (limit 300 s)"};
}

// --- AC5 ---------------------------------------------------------------------

Verdict Ac5() {
  const GridSpec grid(Eigen::Vector3d::Zero(), 1.0, {4, 4, 4});
  constexpr int kDim = 8;
  double worst_geo = 0.0, worst_lang = 0.0, worst_ae = 0.0, worst_batch = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> g;
    PredictionVolume pred(grid, kDim);
    OccupancyGrid occ(grid);
    for (Eigen::Index i = 0; i < pred.geometry.size(); ++i) pred.geometry.data()[i] = 2 * g(rng);
    for (Eigen::Index i = 0; i < pred.language.size(); ++i) pred.language.data()[i] = g(rng);
    Eigen::MatrixXd rows(5, kDim);
    for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = g(rng);
    LanguageTarget target{VoxelGrid(grid), EmbeddingMatrix(rows)};
    for (std::size_t v = 0; v < grid.voxel_count(); ++v) {
      const auto r = rng() % 8;
      target.grid.labels[v] = r < 5 ? static_cast<LabelId>(r) : r == 5 ? kUnlabeled : kFree;
      occ.occupied[v] = target.grid.labels[v] != kFree;
    }
    worst_geo = std::max(
        worst_geo, gradcheck::RelativeError(
                       GeometryLossGradient(pred, occ),
                       gradcheck::Numerical<Eigen::MatrixX2d>(
                           pred.geometry, [&] { return GeometryLoss(pred, occ); })));
    worst_lang = std::max(
        worst_lang, gradcheck::RelativeError(
                        LanguageLossGradient(pred, target),
                        gradcheck::Numerical<Eigen::MatrixXd>(
                            pred.language, [&] { return ComputeLanguageLoss(pred, target).sum; })));

    Eigen::VectorXd e(kDim), h(kDim);
    for (int i = 0; i < kDim; ++i) {
      e(i) = g(rng);
      h(i) = g(rng);
    }
    worst_ae = std::max(worst_ae, gradcheck::RelativeError(
                                      AeLossGradient(e, h),
                                      gradcheck::Numerical<Eigen::VectorXd>(
                                          h, [&] { return AeLoss(e, h); })));

    const std::vector<int> sizes{kDim, 6, 4};
    AutoencoderParams params = MakeAutoencoder(sizes, seed);
    Eigen::MatrixXd batch(kDim, 5);
    for (Eigen::Index i = 0; i < batch.size(); ++i) batch.data()[i] = g(rng);
    AutoencoderParams grad;
    BatchLoss(params, batch, &grad);
    auto check = [&](auto& param, const auto& analytic) {
      using M = std::decay_t<decltype(param)>;
      worst_batch = std::max(
          worst_batch, gradcheck::RelativeError(
                           analytic,
                           gradcheck::Numerical<M>(param, [&] { return BatchLoss(params, batch); })));
    };
    for (std::size_t l = 0; l < params.encoder.size(); ++l) {
      check(params.encoder[l].weight, grad.encoder[l].weight);
      check(params.encoder[l].bias, grad.encoder[l].bias);
    }
    for (std::size_t l = 0; l < params.decoder.size(); ++l) {
      check(params.decoder[l].weight, grad.decoder[l].weight);
      check(params.decoder[l].bias, grad.decoder[l].bias);
    }
  }
  PredictionVolume uniform(grid, 2);
  OccupancyGrid half(grid);
  for (std::size_t v = 0; v < half.occupied.size(); v += 2) half.occupied[v] = 1;
  const double ln2_err = std::abs(GeometryLoss(uniform, half) - std::log(2.0));
  const bool pass = worst_geo < 1e-4 && worst_lang < 1e-4 && worst_ae < 1e-4 &&
                    worst_batch < 1e-4 && ln2_err <= 1e-10;
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << "max relative FD error: geometry "
    << worst_geo << ", language " << worst_lang << ", ae_loss " << worst_ae
    << ", ae parameters " << worst_batch << " (< 1e-4); |uniform - ln 2| " << ln2_err
    << " (<= 1e-10)";
  return {pass, s.str()};
}

// --- AC6 ---------------------------------------------------------------------

Eigen::MatrixXd UnitRows(std::uint64_t seed, int n, int dim, int rank) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd rows(n, dim);
  if (rank <= 0) {
    for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = g(rng);
  } else {
    Eigen::MatrixXd coeff(n, rank), basis(rank, dim);
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = g(rng);
    rows = coeff * basis;
  }
  rows.rowwise().normalize();
  return rows;
}

struct AeOutcome {
  TrainResult result;
  double cosine = 0.0;
  double self_match = 0.0;
  double seconds = 0.0;
};

AeOutcome TrainOn(const Eigen::MatrixXd& rows, const TrainConfig& cfg) {
  const std::vector<int> sizes{512, 256, 128};
  const Stopwatch clock;
  AeOutcome o{Train(EmbeddingMatrix(rows), cfg, sizes)};
  o.seconds = clock.seconds();
  const auto& hold = o.result.report.holdout_rows;
  Eigen::MatrixXd cols(rows.cols(), static_cast<Eigen::Index>(hold.size()));
  for (std::size_t i = 0; i < hold.size(); ++i) {
    cols.col(static_cast<Eigen::Index>(i)) = rows.row(hold[i]).transpose();
  }
  o.cosine = MeanReconstructionCosine(o.result.params, cols);
  o.self_match = LatentSelfMatchRate(o.result.params, cols);
  return o;
}

Verdict Ac6() {
  const TrainConfig cfg;
  const Eigen::MatrixXd rows = UnitRows(7, 512, 512, 0);
  const AeOutcome a = TrainOn(rows, cfg);
  const AeOutcome b = TrainOn(rows, cfg);
  const bool same = a.result.params == b.result.params;
  const bool pass = a.cosine >= 0.99 && a.self_match >= 0.95 && a.seconds < 300.0 && same;
  std::ostringstream s;
  s << "isotropic 512-d unit rows, 512->256->128, " << cfg.epochs << " epochs: holdout cosine "
    << Fmt(a.cosine) << " (>= 0.99), latent self-match " << Fmt(a.self_match)
    << " (>= 0.95), " << Fmt(a.seconds, 1) << " s (limit 300 s), bitwise reproducible "
    << (same ? "yes" : "no");
  if (!pass) {
    s << "\n  analysis: 409 isotropic training rows span a 409-d subspace; any rank-128"
         " linear code keeps at most 128/512 of a fresh isotropic row's energy"
         " (expected cosine ~0.5), and the trained model reaches "
      << Fmt(a.cosine) << ". The threshold is not reachable on this data.";
    const AeOutcome low = TrainOn(UnitRows(7, 512, 512, 32), cfg);
    s << "\n  info: same run on rank-32 rows (embedding-like structure): holdout cosine "
      << Fmt(low.cosine) << ", self-match " << Fmt(low.self_match);
  }
  return {pass, s.str()};
}

// --- AC7 ---------------------------------------------------------------------

VoxelGrid RandomField(std::mt19937_64& rng, const GridSpec& spec, int classes) {
  VoxelGrid g(spec);
  for (auto& l : g.labels) {
    const auto r = static_cast<int>(rng() % (classes + 2));
    l = r < classes ? static_cast<LabelId>(r) : r == classes ? kFree : kUnlabeled;
  }
  return g;
}

bool SameIou(const MetricReport& r, const oracle::Tally& t) {
  return r.per_class_iou == t.iou && r.in_mean == t.in_mean && r.miou == t.miou &&
         r.occupancy_iou == t.occupancy_iou;
}

Verdict Ac7() {
  int oracle_ok = 0, symmetric_ok = 0, permuted_ok = 0, fields = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const std::array<int, 3> dims{1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8),
                                  1 + static_cast<int>(rng() % 8)};
    const GridSpec spec(Eigen::Vector3d::Zero(), 0.5, dims);
    const int k = 1 + static_cast<int>(rng() % 6);
    ClassSet classes;
    for (int c = 0; c < k; ++c) {
      classes.semantic.push_back("c" + std::to_string(c));
      classes.base_mask.push_back(rng() % 2 == 0);
    }
    const VoxelGrid pred = RandomField(rng, spec, k), gt = RandomField(rng, spec, k);
    std::vector<std::uint8_t> mask(spec.voxel_count());
    for (auto& m : mask) m = rng() % 4 != 0;
    ++fields;

    bool ok = true;
    for (ClassSubset subset : {ClassSubset::kAll, ClassSubset::kBase, ClassSubset::kNovel}) {
      for (bool absent : {false, true}) {
        for (bool masked : {false, true}) {
          ScoreOptions opt{subset, absent, std::nullopt};
          if (masked) opt.mask = std::span<const std::uint8_t>(mask);
          ok = ok && SameIou(Score(pred, gt, classes, opt),
                             oracle::ConfusionScore(pred, gt, classes, subset, absent,
                                                    masked ? &mask : nullptr));
        }
      }
    }
    oracle_ok += ok;

    const MetricReport fwd = Score(pred, gt, classes), rev = Score(gt, pred, classes);
    symmetric_ok += fwd.per_class_iou == rev.per_class_iou && fwd.miou == rev.miou &&
                    fwd.occupancy_iou == rev.occupancy_iou;

    // Shuffling voxels jointly and renaming class ids leave every score intact.
    std::vector<std::size_t> order(spec.voxel_count());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<LabelId> rename(k);
    std::iota(rename.begin(), rename.end(), 0);
    std::shuffle(rename.begin(), rename.end(), rng);
    ClassSet renamed = classes;
    for (int c = 0; c < k; ++c) {
      renamed.semantic[rename[c]] = classes.semantic[c];
      renamed.base_mask[rename[c]] = classes.base_mask[c];
    }
    auto move = [&](const VoxelGrid& g) {
      VoxelGrid out(spec);
      for (std::size_t v = 0; v < order.size(); ++v) {
        const LabelId l = g.labels[order[v]];
        out.labels[v] = IsSentinel(l) ? l : rename[l];
      }
      return out;
    };
    const MetricReport perm = Score(move(pred), move(gt), renamed);
    bool same = perm.occupancy_iou == fwd.occupancy_iou;
    for (int c = 0; c < k; ++c) {
      same = same && perm.per_class_iou[rename[c]] == fwd.per_class_iou[c];
    }
    // The mean sums in class order, so compare it to rounding.
    same = same && std::abs(perm.miou - fwd.miou) <= 1e-15;
    permuted_ok += same;
  }
  const bool pass = oracle_ok == fields && symmetric_ok == fields && permuted_ok == fields;
  return {pass, "confusion oracle " + std::to_string(oracle_ok) + "/" + std::to_string(fields) +
                    " fields (12 option combinations each), swap symmetry " +
                    std::to_string(symmetric_ok) + "/" + std::to_string(fields) +
                    ", voxel and class permutation " + std::to_string(permuted_ok) + "/" +
                    std::to_string(fields)};
}

// --- AC8 ---------------------------------------------------------------------

#ifdef SEMOCC_CLI
int RunCli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SEMOCC_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Relative path -> bytes of every regular file under `dir`, skipping `skip`.
std::map<std::string, std::vector<char>> Tree(const fs::path& dir, const std::string& skip = "") {
  std::map<std::string, std::vector<char>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).string();
    if (rel != skip) files[rel] = ReadFileBytes(e.path());
  }
  return files;
}
#endif

Verdict Ac8() {
#ifndef SEMOCC_CLI
  return {false, "command-line tool not built"};
#else
  const fs::path root = fs::temp_directory_path() / "semocc_acceptance_ac8";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path log = root / "log.txt";
  const std::string config = (fs::path(SEMOCC_TEST_DATA_DIR) / "demo" / "noisy.json").string();
  for (const char* name : {"scene_a", "scene_b"}) {
    if (RunCli("gen --config " + config + " --out " + (root / name).string(), log) != 0) {
      return {false, "gen failed, see " + log.string()};
    }
  }
  // The sequence config records absolute paths, so it is the only file that
  // may differ between the two scene directories.
  const bool gen_same =
      Tree(root / "scene_a", "sequence.json") == Tree(root / "scene_b", "sequence.json");
  struct RunSpec {
    std::string scene;
    int workers;
    std::string out;
  };
  const std::vector<RunSpec> runs{{"scene_a", 1, "w1"},
                                  {"scene_a", 2, "w2"},
                                  {"scene_a", 8, "w8"},
                                  {"scene_a", 1, "repeat"},
                                  {"scene_b", 1, "second_gen"}};
  for (const auto& r : runs) {
    const std::string args = "--workers " + std::to_string(r.workers) + " pipeline --config " +
                             (root / r.scene / "sequence.json").string() + " --out " +
                             (root / r.out).string();
    if (RunCli(args, log) != 0) return {false, "pipeline failed, see " + log.string()};
  }
  const auto reference = Tree(root / "w1");
  int identical = 0;
  for (const auto& r : runs) identical += Tree(root / r.out) == reference;
  const bool pass = gen_same && identical == static_cast<int>(runs.size());
  const std::string detail =
      std::to_string(reference.size()) + " output files; identical across workers {1,2,8}, a "
      "repeat run and a regenerated scene: " + std::to_string(identical) + "/" +
      std::to_string(runs.size()) + " runs match; generated inputs identical " +
      (gen_same ? "yes" : "no");
  if (pass) fs::remove_all(root);
  return {pass, detail};
#endif
}

// --- AC9 ---------------------------------------------------------------------

Verdict Ac9() {
  const GridSpec g;
  const Eigen::Vector3d lo = g.origin(), hi = g.max_corner();
  const bool pass = g.dims() == std::array<int, 3>{200, 200, 16} && g.voxel_size() == 0.4 &&
                    (lo - Eigen::Vector3d(-40, -40, -1)).norm() < 1e-9 &&
                    (hi - Eigen::Vector3d(40, 40, 5.4)).norm() < 1e-9;
  std::ostringstream s;
  s << "dims " << g.dims()[0] << "x" << g.dims()[1] << "x" << g.dims()[2] << ", voxel "
    << g.voxel_size() << " m, x [" << lo.x() << ", " << hi.x() << "], y [" << lo.y() << ", "
    << hi.y() << "], z [" << lo.z() << ", " << hi.z() << "]";
  return {pass, s.str()};
}

int Main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1", Ac1}, {"AC2", Ac2}, {"AC3", Ac3}, {"AC4", Ac4}, {"AC5", Ac5},
      {"AC6", Ac6}, {"AC7", Ac7}, {"AC8", Ac8}, {"AC9", Ac9}};
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: acceptance_test [--only ACn]\n";
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && name != only) continue;
    ++ran;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << name << " " << (v.pass ? "PASS" : "FAIL") << ": " << v.detail << std::endl;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion " << only << "\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace semocc

int main(int argc, char** argv) { return semocc::Main(argc, argv); }
