#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "edgeprune/errors.hpp"
#include "edgeprune/gradient.hpp"
#include "edgeprune/train.hpp"
#include "test_support.hpp"

namespace edgeprune {
namespace {

Graph small_sbm(std::uint64_t seed, std::size_t per_block = 25) {
  SBMParams p;
  p.nodes_per_block = per_block;
  p.seed = seed;
  return generate_sbm(p);
}

TrainConfig small_train(std::uint64_t seed) {
  TrainConfig t;
  t.hidden_dim = 16;
  t.embed_dim = 8;
  t.adam.lr = 0.01;
  t.seed = seed;
  return t;
}

TEST(Augment, ZeroRatesReturnTheGraph) {
  const Graph g = small_sbm(1);
  Rng rng(3);
  const GraphView v = augment(g, {0.0, 0.0}, false, rng);
  EXPECT_EQ(v.adjacency, g.adjacency.dense());
  EXPECT_EQ(v.features, g.features);
}

TEST(Augment, DropsAreSymmetricSubsetsWithBinomialCount) {
  const Graph g = small_sbm(2, 50);
  const double e = static_cast<double>(g.adjacency.edge_count());
  const double p = 0.3;
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const GraphView v = augment(g, {p, 0.0}, false, rng);
    EXPECT_EQ(v.adjacency, v.adjacency.transpose());
    EXPECT_TRUE((v.adjacency.array() <= g.adjacency.dense().array()).all());
    EXPECT_EQ(v.adjacency.diagonal().sum(), 0.0);
    const double kept = v.adjacency.sum() / 2.0;
    EXPECT_NEAR(e - kept, p * e, 4.0 * std::sqrt(e * p * (1 - p)));
  }
}

TEST(Augment, ColumnMaskZeroesWholeColumns) {
  const Graph g = small_sbm(3);
  Rng rng(7);
  std::size_t masked_total = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const GraphView v = augment(g, {0.0, 0.25}, false, rng);
    for (Eigen::Index c = 0; c < v.features.cols(); ++c) {
      const bool zero = v.features.col(c).isZero(0.0);
      if (zero) {
        ++masked_total;
      } else {
        EXPECT_EQ(v.features.col(c), g.features.col(c));
      }
    }
  }
  // Original columns are never all-zero here, so every zero column was masked.
  const double n = trials * 32.0;
  EXPECT_NEAR(static_cast<double>(masked_total), 0.25 * n, 4.0 * std::sqrt(n * 0.25 * 0.75));
}

TEST(Augment, PerEntryMaskTouchesEntries) {
  Graph g = small_sbm(4);
  g.features.array() += 1.0;  // strictly positive, so zeros come from masking
  Rng rng(9);
  const GraphView v = augment(g, {0.0, 0.2}, true, rng);
  const double n = static_cast<double>(v.features.size());
  const double zeros = (v.features.array() == 0.0).cast<double>().sum();
  EXPECT_NEAR(zeros, 0.2 * n, 4.0 * std::sqrt(n * 0.2 * 0.8));
  // A column-level mask would zero either none or all of a column.
  bool partial = false;
  for (Eigen::Index c = 0; c < v.features.cols(); ++c) {
    const double z = (v.features.col(c).array() == 0.0).cast<double>().sum();
    partial |= z > 0 && z < v.features.rows();
  }
  EXPECT_TRUE(partial);
}

TEST(AugmentationConfig, RejectsRatesOutsideUnitInterval) {
  AugmentationConfig a;
  a.view1.edge_drop_rate = 1.0;
  EXPECT_THROW(a.validate(), ContractError);
  a = AugmentationConfig{};
  a.view2.feature_mask_rate = -0.1;
  EXPECT_THROW(a.validate(), ContractError);
}

TEST(TrainConfig, RejectsDegenerateSettings) {
  TrainConfig t;
  t.epochs = 0;
  EXPECT_THROW(t.validate(), ContractError);
  t = TrainConfig{};
  t.tau = 0.0;
  EXPECT_THROW(t.validate(), ContractError);
  t = TrainConfig{};
  t.adam.lr = 0.0;
  EXPECT_THROW(t.validate(), ContractError);
}

TEST(Trainer, SameSeedSameWeights) {
  const Graph g = small_sbm(1);
  TrainConfig t = small_train(11);
  t.epochs = 5;
  const TrainResult a = train_encoder(g, t, AugmentationConfig{});
  const TrainResult b = train_encoder(g, t, AugmentationConfig{});
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.losses, b.losses);
  t.seed = 12;
  EXPECT_NE(train_encoder(g, t, AugmentationConfig{}).params, a.params);
}

TEST(Trainer, OneEpochChangesWeightsAndCounts) {
  const Graph g = small_sbm(1);
  const TrainConfig t = small_train(3);
  ContrastiveTrainer trainer(t, AugmentationConfig{}, g.feature_dim(), 3);
  const EncoderParams before = trainer.params();
  const double loss = trainer.run_epoch(g);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NE(trainer.params(), before);
  EXPECT_EQ(trainer.epochs_done(), 1u);
  EXPECT_EQ(trainer.run_epochs(g, 3).size(), 3u);
  EXPECT_EQ(trainer.epochs_done(), 4u);
}

TEST(Trainer, WarmContinuationEqualsOneLongRun) {
  const Graph g = small_sbm(2);
  const TrainConfig t = small_train(5);
  ContrastiveTrainer a(t, AugmentationConfig{}, g.feature_dim(), 9);
  ContrastiveTrainer b(t, AugmentationConfig{}, g.feature_dim(), 9);
  a.run_epochs(g, 6);
  b.run_epochs(g, 2);
  b.run_epochs(g, 4);
  EXPECT_EQ(a.params(), b.params());
}

TEST(Trainer, LossDecreasesOverTraining) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = small_sbm(seed);
    TrainConfig t = small_train(seed);
    t.epochs = 200;
    const TrainResult r = train_encoder(g, t, AugmentationConfig{});
    ASSERT_EQ(r.losses.size(), 200u);
    const double head = std::accumulate(r.losses.begin(), r.losses.begin() + 10, 0.0) / 10;
    const double tail = std::accumulate(r.losses.end() - 10, r.losses.end(), 0.0) / 10;
    EXPECT_LT(tail, head) << "seed " << seed;
  }
}

TEST(Trainer, NonFiniteFeaturesReportEpoch) {
  Graph g = small_sbm(1);
  g.features(0, 0) = std::numeric_limits<double>::infinity();
  ContrastiveTrainer trainer(small_train(1), AugmentationConfig::none(), g.feature_dim(), 1);
  try {
    trainer.run_epoch(g);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos) << e.what();
  }
}

TEST(DeterministicLoss, EqualsLossOfUnaugmentedViews) {
  const Graph g = small_sbm(3);
  const EncoderParams p = init_encoder(g.feature_dim(), 16, 8, 4);
  const Matrix h = gcn_forward(p, g.adjacency.dense(), g.features);
  EXPECT_EQ(deterministic_loss(p, g.adjacency, g.features, 0.5), contrastive_loss(h, h, 0.5));
}

TEST(LossCsv, WritesOneRowPerEpoch) {
  const auto path = std::filesystem::temp_directory_path() / "edgeprune_train_test" / "loss.csv";
  std::filesystem::remove_all(path.parent_path());
  write_loss_csv({1.5, 1.25}, path);
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "epoch,loss");
  EXPECT_EQ(lines[1].substr(0, 4), "1,1.");
  EXPECT_EQ(lines[2].substr(0, 5), "2,1.2");
}

TEST(AccumulatedGradient, ExactlySymmetric) {
  const Graph g = small_sbm(5);
  const EncoderParams p = init_encoder(g.feature_dim(), 16, 8, 5);
  Rng rng(1);
  const Matrix grad = accumulate_adjacency_gradient(g.adjacency, g.features, p, 3, AugmentationConfig{}, 0.5, rng);
  EXPECT_EQ(grad, grad.transpose());
}

TEST(AccumulatedGradient, NoAugmentationIsSymmetrizedSumOfTwoViews) {
  const Graph g = small_sbm(6);
  const EncoderParams p = init_encoder(g.feature_dim(), 16, 8, 6);
  Rng rng(2);
  const Matrix grad =
      accumulate_adjacency_gradient(g.adjacency, g.features, p, 1, AugmentationConfig::none(), 0.5, rng);
  const GraphView v{g.adjacency.dense(), g.features};
  const LossGrads lg = loss_and_grads(p, v, v, 0.5);
  const Matrix sum = lg.adjacency_grad[0] + lg.adjacency_grad[1];
  EXPECT_TRUE(grad.isApprox(0.5 * (sum + sum.transpose()), 1e-14));
}

TEST(AccumulatedGradient, PairSumMatchesSymmetricFiniteDifference) {
  Rng pick(3);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Graph g = small_sbm(seed, 5);  // 20 nodes
    const EncoderParams p = init_encoder(g.feature_dim(), 8, 6, seed);
    Rng rng(seed);
    const Matrix grad =
        accumulate_adjacency_gradient(g.adjacency, g.features, p, 1, AugmentationConfig::none(), 0.5, rng);
    Matrix a = g.adjacency.dense();
    auto loss = [&] {
      const Matrix h = gcn_forward(p, a, g.features);
      return contrastive_loss(h, h, 0.5);
    };
    for (int s = 0; s < 15; ++s) {
      const std::size_t i = pick.below(20);
      std::size_t j = pick.below(19);
      if (j >= i) ++j;
      const double saved = a(i, j);
      const double step = 1e-4;
      a(i, j) = a(j, i) = saved + step;
      const double up = loss();
      a(i, j) = a(j, i) = saved - step;
      const double down = loss();
      a(i, j) = a(j, i) = saved;
      const double fd = (up - down) / (2 * step);
      EXPECT_LT(testing::fd_error(grad(i, j) + grad(j, i), fd), 1e-4) << "(" << i << "," << j << ")";
    }
  }
}

TEST(AccumulatedGradient, DroppedEdgesContributeNothing) {
  // With every edge dropped in both views, existing edges get no gradient
  // while non-edges keep theirs.
  const Graph g = small_sbm(7, 5);
  const EncoderParams p = init_encoder(g.feature_dim(), 8, 6, 7);
  AugmentationConfig aug = AugmentationConfig::none();
  aug.view1.edge_drop_rate = 0.999999;
  aug.view2.edge_drop_rate = 0.999999;
  Rng rng(4);
  const Matrix grad = accumulate_adjacency_gradient(g.adjacency, g.features, p, 1, aug, 0.5, rng);
  for (const auto& [i, j] : g.adjacency.edges()) EXPECT_EQ(grad(i, j), 0.0);
  EXPECT_GT(grad.cwiseAbs().sum(), 0.0);
}

TEST(AccumulatedGradient, RejectsZeroDraws) {
  const Graph g = small_sbm(1, 5);
  const EncoderParams p = init_encoder(g.feature_dim(), 4, 4, 1);
  Rng rng(1);
  EXPECT_THROW(accumulate_adjacency_gradient(g.adjacency, g.features, p, 0, AugmentationConfig{}, 0.5, rng),
               ContractError);
}

}  // namespace
}  // namespace edgeprune
