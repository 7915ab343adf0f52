#pragma once

// Vanilla GAN over units of movement. The generator maps uniform noise in
// [-1, 1]^z_dim to a normalized 56-vector; the discriminator scores 56-vectors
// as captured (1) or generated (0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "gestgen/dataset.hpp"
#include "gestgen/error.hpp"
#include "gestgen/neuralnet.hpp"
#include "gestgen/random.hpp"

namespace gestgen {

struct GanConfig {
  std::size_t z_dim = 100;
  std::size_t batch = 16;
  double lr = 0.0002;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::size_t epochs = 2000;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 0;  // 0 disables periodic checkpoints

  void validate() const {
    if (z_dim == 0 || batch == 0 || epochs == 0) {
      throw ValidationError("z_dim, batch and epochs must be positive");
    }
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw ValidationError("Adam betas must lie in [0, 1)");
    }
  }
};

struct TrainLogEntry {
  std::size_t epoch = 0;  // 1-based
  double d_loss = 0.0;
  double g_loss = 0.0;
  double d_accuracy_real = 0.0;
  double d_accuracy_fake = 0.0;
};

using TrainLog = std::vector<TrainLogEntry>;

/// z_dim → 128 → 256 → 56, leaky-ReLU hidden layers, tanh output.
inline nn::MlpNetwork<double> make_generator(std::size_t z_dim = 100) {
  using nn::Activation;
  return nn::MlpNetwork<double>({{z_dim, 128, Activation::kLeakyRelu},
                                 {128, 256, Activation::kLeakyRelu},
                                 {256, kUmSize, Activation::kTanh}});
}

/// 56 → 256 → 128 → 1, leaky-ReLU hidden layers, sigmoid output.
inline nn::MlpNetwork<double> make_discriminator() {
  using nn::Activation;
  return nn::MlpNetwork<double>({{kUmSize, 256, Activation::kLeakyRelu},
                                 {256, 128, Activation::kLeakyRelu},
                                 {128, 1, Activation::kSigmoid}});
}

/// n × z_dim matrix of i.i.d. uniform [-1, 1] draws.
inline nn::Matrix<double> sample_noise(std::size_t n, std::size_t z_dim, Rng& rng) {
  if (n == 0 || z_dim == 0) throw ValidationError("noise shape must be positive");
  nn::Matrix<double> z(n, z_dim);
  for (auto& v : z.data()) v = rng.uniform(-1.0, 1.0);
  return z;
}

namespace detail {

/// log(1 + e^x) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

/// Mean binary cross-entropy of sigmoid(logits) against `label`, plus the
/// gradient with respect to the logits.
struct BceResult {
  double loss = 0.0;
  nn::Matrix<double> grad;
};

inline BceResult bce_from_logits(const nn::Matrix<double>& logits, const nn::Matrix<double>& probs,
                                 double label) {
  const std::size_t n = logits.rows();
  BceResult out{0.0, nn::Matrix<double>(n, 1)};
  for (std::size_t r = 0; r < n; ++r) {
    const double z = logits(r, 0);
    out.loss += label == 1.0 ? softplus(-z) : softplus(z);
    out.grad(r, 0) = (probs(r, 0) - label) / static_cast<double>(n);
  }
  out.loss /= static_cast<double>(n);
  return out;
}

inline double fraction_where(const nn::Matrix<double>& probs, bool above_half) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    if ((probs(r, 0) > 0.5) == above_half) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(probs.rows());
}

inline nn::Matrix<double> gather(const std::vector<UnitOfMovement>& ums,
                                 std::span<const std::size_t> idx) {
  nn::Matrix<double> m(idx.size(), kUmSize);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy(ums[idx[r]].values.begin(), ums[idx[r]].values.end(), m.row(r).begin());
  }
  return m;
}

inline void add_into(std::vector<double>& acc, const std::vector<double>& g) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
}

}  // namespace detail

struct TrainResult {
  nn::MlpNetwork<double> generator;
  nn::MlpNetwork<double> discriminator;
  TrainLog log;
};

/// Called after every epoch with the log entry and both networks.
using EpochCallback = std::function<void(const TrainLogEntry&, const nn::MlpNetwork<double>&,
                                         const nn::MlpNetwork<double>&)>;

/// Alternating GAN training. Each epoch shuffles the corpus and runs
/// ⌊|corpus|/batch⌋ batches; per batch, one discriminator step on a real and
/// a generated half-batch (BCE, labels 1/0) and one generator step on fresh
/// noise with the non-saturating loss -log D(G(z)). One Rng seeded from
/// cfg.seed drives initialization, shuffling and noise, so a run is fully
/// determined by (corpus, cfg).
inline TrainResult train(const Corpus& corpus, const GanConfig& cfg,
                         const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (corpus.ums.empty()) throw ValidationError("training corpus is empty");
  if (cfg.batch > corpus.ums.size()) {
    throw ValidationError("batch size " + std::to_string(cfg.batch) + " exceeds corpus size " +
                          std::to_string(corpus.ums.size()));
  }
  for (std::size_t i = 0; i < corpus.ums.size(); ++i) {
    if (!is_normalized(corpus.ums[i])) {
      throw ValidationError("corpus unit " + std::to_string(i) + " is not normalized");
    }
  }

  Rng rng(cfg.seed);
  TrainResult res{make_generator(cfg.z_dim), make_discriminator(), {}};
  auto& gen = res.generator;
  auto& disc = res.discriminator;
  nn::glorot_init(gen, rng);
  nn::glorot_init(disc, rng);

  const nn::AdamHyper hyper{cfg.lr, cfg.beta1, cfg.beta2, 1e-8};
  nn::AdamState<double> g_opt(gen.num_params(), hyper);
  nn::AdamState<double> d_opt(disc.num_params(), hyper);

  std::vector<std::size_t> order(corpus.ums.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batches = corpus.ums.size() / cfg.batch;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.index(i)]);
    }

    TrainLogEntry entry;
    entry.epoch = epoch;
    for (std::size_t b = 0; b < batches; ++b) {
      const auto real = detail::gather(
          corpus.ums, std::span<const std::size_t>(order).subspan(b * cfg.batch, cfg.batch));

      // Discriminator step.
      const auto fake = nn::predict(gen, sample_noise(cfg.batch, cfg.z_dim, rng));
      const auto d_real = nn::forward(disc, real);
      const auto d_fake = nn::forward(disc, fake);
      const auto loss_real = detail::bce_from_logits(d_real.tape.pre.back(), d_real.output, 1.0);
      const auto loss_fake = detail::bce_from_logits(d_fake.tape.pre.back(), d_fake.output, 0.0);
      auto d_grads = nn::backward(disc, d_real.tape, loss_real.grad,
                                  nn::GradientOf::kFinalPreActivation).params;
      detail::add_into(d_grads, nn::backward(disc, d_fake.tape, loss_fake.grad,
                                             nn::GradientOf::kFinalPreActivation).params);
      const double d_loss = loss_real.loss + loss_fake.loss;
      nn::adam_step<double>(disc.params(), d_grads, d_opt);

      // Generator step against the updated discriminator.
      const auto g_fwd = nn::forward(gen, sample_noise(cfg.batch, cfg.z_dim, rng));
      const auto d_on_g = nn::forward(disc, g_fwd.output);
      const auto g_loss = detail::bce_from_logits(d_on_g.tape.pre.back(), d_on_g.output, 1.0);
      const auto d_input_grad = nn::backward(disc, d_on_g.tape, g_loss.grad,
                                             nn::GradientOf::kFinalPreActivation).input;
      const auto g_grads = nn::backward(gen, g_fwd.tape, d_input_grad).params;
      nn::adam_step<double>(gen.params(), g_grads, g_opt);

      if (!std::isfinite(d_loss) || !std::isfinite(g_loss.loss)) {
        throw NumericalAbort("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(b + 1) + " (d_loss=" + std::to_string(d_loss) +
                             ", g_loss=" + std::to_string(g_loss.loss) + ")");
      }
      entry.d_loss += d_loss;
      entry.g_loss += g_loss.loss;
      entry.d_accuracy_real += detail::fraction_where(d_real.output, true);
      entry.d_accuracy_fake += detail::fraction_where(d_fake.output, false);
    }
    const double nb = static_cast<double>(batches);
    entry.d_loss /= nb;
    entry.g_loss /= nb;
    entry.d_accuracy_real /= nb;
    entry.d_accuracy_fake /= nb;
    if (!gen.all_finite() || !disc.all_finite()) {
      throw NumericalAbort("non-finite parameters after epoch " + std::to_string(epoch));
    }
    res.log.push_back(entry);
    if (on_epoch) on_epoch(entry, gen, disc);
  }
  return res;
}

struct DiscriminatorAccuracy {
  double real = 0.0;  // fraction of real samples scored > 0.5
  double fake = 0.0;  // fraction of generated samples scored <= 0.5

  double overall() const { return 0.5 * (real + fake); }
};

/// Scores `n` corpus units (cycled) and `n` generated units.
inline DiscriminatorAccuracy discriminator_accuracy(const nn::MlpNetwork<double>& disc,
                                                    const nn::MlpNetwork<double>& gen,
                                                    const Corpus& corpus, std::size_t n,
                                                    Rng& rng) {
  if (corpus.ums.empty() || n == 0) throw ValidationError("accuracy needs samples");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i % corpus.ums.size();
  const auto real = nn::predict(disc, detail::gather(corpus.ums, idx));
  const auto fake = nn::predict(disc, nn::predict(gen, sample_noise(n, gen.input_dim(), rng)));
  return {detail::fraction_where(real, true), detail::fraction_where(fake, false)};
}

/// Normalized generator samples, one per row of fresh noise.
inline std::vector<UnitOfMovement> sample_normalized(const nn::MlpNetwork<double>& gen,
                                                     std::size_t n, Rng& rng) {
  std::vector<UnitOfMovement> out;
  if (n == 0) return out;
  if (gen.output_dim() != kUmSize) throw ValidationError("generator must emit 56 values");
  const auto y = nn::predict(gen, sample_noise(n, gen.input_dim(), rng));
  out.resize(n);
  for (std::size_t r = 0; r < n; ++r) std::copy_n(y.row(r).begin(), kUmSize, out[r].values.begin());
  return out;
}

/// n decoded units of movement; every value lies within `norm` bounds.
inline std::vector<UnitOfMovement> generate_ums(const nn::MlpNetwork<double>& gen, std::size_t n,
                                                Rng& rng, const NormalizationSpec& norm) {
  auto ums = sample_normalized(gen, n, rng);
  for (auto& um : ums) um = denormalize_um(um, norm);
  return ums;
}

}  // namespace gestgen
