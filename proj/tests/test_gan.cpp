#include <gtest/gtest.h>

#include "support.hpp"

using namespace gestgen;
using gestgen::testing::TempDir;

namespace {

Corpus random_corpus(std::size_t n, std::uint64_t seed) {
  Corpus c;
  c.norm = NormalizationSpec::from_limits(JointLimits::pepper());
  c.provenance = {"random"};
  Rng rng(seed);
  c.ums.resize(n);
  for (auto& um : c.ums) {
    for (auto& v : um.values) v = rng.uniform(-0.9, 0.9);
  }
  return c;
}

GanConfig small_config(std::size_t epochs) {
  GanConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Architecture, PinnedShapes) {
  const auto g = make_generator();
  const auto d = make_discriminator();
  EXPECT_EQ(g.input_dim(), 100u);
  EXPECT_EQ(g.output_dim(), kUmSize);
  EXPECT_EQ(d.input_dim(), kUmSize);
  EXPECT_EQ(d.output_dim(), 1u);
  EXPECT_EQ(g.layers().back().activation, nn::Activation::kTanh);
  EXPECT_EQ(d.layers().back().activation, nn::Activation::kSigmoid);
  EXPECT_EQ(make_generator(7).input_dim(), 7u);
}

TEST(GanConfig, DefaultsAndValidation) {
  const GanConfig cfg;
  EXPECT_EQ(cfg.z_dim, 100u);
  EXPECT_EQ(cfg.batch, 16u);
  EXPECT_EQ(cfg.lr, 2e-4);
  EXPECT_EQ(cfg.beta1, 0.5);
  EXPECT_EQ(cfg.beta2, 0.999);
  EXPECT_EQ(cfg.epochs, 2000u);
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.batch = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = cfg;
  bad.beta2 = 1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = cfg;
  bad.lr = -1e-3;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(SampleNoise, UniformOnSymmetricInterval) {
  Rng rng(1);
  const auto z = sample_noise(400, 100, rng);
  double sum = 0.0, sq = 0.0;
  for (double v : z.data()) {
    ASSERT_GE(v, -1.0);
    ASSERT_LE(v, 1.0);
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(z.data().size());
  // U(-1,1): mean 0, variance 1/3; 40000 draws give sd(mean) ≈ 0.003.
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sq / n, 1.0 / 3.0, 0.02);

  Rng a(5), b(5);
  EXPECT_EQ(sample_noise(3, 4, a), sample_noise(3, 4, b));
  EXPECT_THROW(sample_noise(0, 4, a), ValidationError);
}

TEST(Train, ZeroLearningRateLeavesInitialization) {
  const auto corpus = random_corpus(32, 1);
  auto cfg = small_config(2);
  cfg.lr = 0.0;
  const auto res = train(corpus, cfg);

  Rng rng(cfg.seed);
  auto g = make_generator(cfg.z_dim);
  auto d = make_discriminator();
  nn::glorot_init(g, rng);
  nn::glorot_init(d, rng);
  EXPECT_EQ(res.generator, g);
  EXPECT_EQ(res.discriminator, d);
}

TEST(Train, DeterministicForSameSeed) {
  const auto corpus = random_corpus(48, 2);
  const auto a = train(corpus, small_config(3));
  const auto b = train(corpus, small_config(3));
  EXPECT_EQ(a.generator, b.generator);
  EXPECT_EQ(a.discriminator, b.discriminator);
  ASSERT_EQ(a.log.size(), 3u);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].d_loss, b.log[i].d_loss);
    EXPECT_EQ(a.log[i].g_loss, b.log[i].g_loss);
  }
  auto other = small_config(3);
  other.seed = 4;
  EXPECT_NE(train(corpus, other).generator, a.generator);
}

TEST(Train, LogIsFiniteAndAccuraciesAreFractions) {
  const auto corpus = random_corpus(64, 3);
  std::size_t callbacks = 0;
  const auto res = train(corpus, small_config(5),
                         [&](const TrainLogEntry& e, const auto&, const auto&) {
                           EXPECT_EQ(e.epoch, ++callbacks);
                         });
  EXPECT_EQ(callbacks, 5u);
  for (const auto& e : res.log) {
    EXPECT_TRUE(std::isfinite(e.d_loss));
    EXPECT_TRUE(std::isfinite(e.g_loss));
    EXPECT_GT(e.d_loss, 0.0);
    EXPECT_GT(e.g_loss, 0.0);
    for (double acc : {e.d_accuracy_real, e.d_accuracy_fake}) {
      EXPECT_GE(acc, 0.0);
      EXPECT_LE(acc, 1.0);
    }
  }
}

TEST(Train, RejectsBadCorpora) {
  const auto corpus = random_corpus(8, 4);
  EXPECT_THROW(train(corpus, small_config(1)), ValidationError);  // batch 16 > 8
  EXPECT_THROW(train(Corpus{}, small_config(1)), ValidationError);
  auto bad = random_corpus(16, 4);
  bad.ums[5].values[0] = 1.5;
  EXPECT_THROW(train(bad, small_config(1)), ValidationError);
}

TEST(DiscriminatorAccuracy, UntrainedNetworkIsNearChance) {
  const auto corpus = random_corpus(128, 5);
  Rng rng(9);
  auto g = make_generator();
  auto d = make_discriminator();
  nn::glorot_init(g, rng);
  nn::glorot_init(d, rng);
  const auto acc = discriminator_accuracy(d, g, corpus, 256, rng);
  EXPECT_GE(acc.overall(), 0.2);
  EXPECT_LE(acc.overall(), 0.8);
}

TEST(GenerateUms, WithinLimitsAndDeterministic) {
  const auto lim = JointLimits::pepper();
  const auto norm = NormalizationSpec::from_limits(lim);
  Rng init(6);
  auto g = make_generator();
  nn::glorot_init(g, init);
  // Large weights push tanh into saturation, the hardest case for the bounds.
  for (auto& w : g.params()) w *= 25.0;

  Rng rng(1);
  EXPECT_TRUE(generate_ums(g, 0, rng, norm).empty());
  const auto ums = generate_ums(g, 500, rng, norm);
  ASSERT_EQ(ums.size(), 500u);
  for (const auto& um : ums) {
    for (std::size_t p = 0; p < kPosesPerUm; ++p) EXPECT_TRUE(lim.contains(um.pose(p)));
  }
  Rng a(2), b(2);
  EXPECT_EQ(generate_ums(g, 10, a, norm), generate_ums(g, 10, b, norm));
}

TEST(Checkpoints, GeneratorFileRoundTripsBitExact) {
  TempDir dir;
  const auto corpus = random_corpus(32, 7);
  auto cfg = small_config(4);
  cfg.checkpoint_every = 2;
  const auto res = pipeline::train_to_dir(corpus, cfg, dir.file("model"));

  const auto model = pipeline::load_generator(dir.file("model"));
  EXPECT_EQ(model.generator, res.generator);
  EXPECT_EQ(nn::load_network(dir.file("model/discriminator.bin")).net, res.discriminator);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    EXPECT_EQ(model.norm.bounds[c].min, corpus.norm.bounds[c].min);
    EXPECT_EQ(model.norm.bounds[c].max, corpus.norm.bounds[c].max);
  }
  EXPECT_TRUE(std::filesystem::exists(dir.file("model/checkpoints/epoch_000002.generator.bin")));
  EXPECT_TRUE(std::filesystem::exists(dir.file("model/checkpoints/epoch_000004.discriminator.bin")));
  EXPECT_FALSE(std::filesystem::exists(dir.file("model/checkpoints/epoch_000003.generator.bin")));

  // Header line plus one row per epoch.
  const std::string log = gestgen::testing::read_bytes(dir.file("model/trainlog.csv"));
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 5);
  EXPECT_EQ(log.substr(0, log.find('\n')), "epoch,d_loss,g_loss,d_acc_real,d_acc_fake");
}
