#pragma once

// File-level stages shared by the command-line tool and the integration
// tests: retarget → dataset → train → generate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gestgen/dataset.hpp"
#include "gestgen/error.hpp"
#include "gestgen/gan.hpp"
#include "gestgen/neuralnet.hpp"
#include "gestgen/retarget.hpp"
#include "gestgen/sequence.hpp"
#include "gestgen/skeleton.hpp"

namespace gestgen::pipeline {

namespace fs = std::filesystem;

/// Runs `fn`, prefixing any gestgen error with the stage name while keeping
/// its exit code.
template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "stage '" + name + "': " + e.what());
  } catch (const DegenerateGeometry& e) {
    throw Error(ExitCode::kValidation, "stage '" + name + "': " + e.what());
  }
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

struct RetargetSummary {
  std::size_t frames = 0;
  std::size_t holds = 0;
};

/// Recording (+ optional hands sidecar) → pose stream JSONL.
inline RetargetSummary retarget_file(const std::string& recording_path,
                                     const std::optional<std::string>& hands_path,
                                     const RetargetConfig& cfg, const std::string& out_path) {
  const Recording rec = load_recording(recording_path);
  std::map<std::size_t, GlovePair> gloves;
  if (hands_path) gloves = load_glove_readings(*hands_path);
  const RetargetRun run = retarget_recording(rec, gloves, cfg);
  save_pose_stream(out_path, run.poses, 1.0 / rec.fps);
  return {run.poses.size(), run.holds};
}

/// Pose stream files → corpus; the recording id is the file stem.
inline Corpus build_corpus_from_files(const std::vector<std::string>& pose_paths,
                                      const NormalizationSpec& norm, std::size_t stride) {
  std::vector<PoseSource> sources;
  for (const auto& path : pose_paths) {
    PoseSource src{fs::path(path).stem().string(), {}};
    for (const auto& tp : load_pose_stream(path).poses) src.poses.push_back(tp.pose);
    sources.push_back(std::move(src));
  }
  Corpus corpus = build_corpus(std::move(sources), norm, stride);
  if (corpus.ums.empty()) {
    throw ValidationError(
        "corpus is empty: each recording needs at least 4 retargeted poses to form a unit of "
        "movement; record a longer session or lower --stride");
  }
  return corpus;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::ordered_json model_meta(const Corpus& corpus, const GanConfig& cfg,
                                         std::size_t epoch) {
  nlohmann::ordered_json meta;
  meta["role"] = "generator";
  meta["norm"] = norm_to_json(corpus.norm);
  meta["z_dim"] = cfg.z_dim;
  meta["seed"] = cfg.seed;
  meta["epoch"] = epoch;
  return meta;
}

/// Trains on `corpus` and writes generator.bin, discriminator.bin and
/// trainlog.csv into `model_dir`, plus checkpoints/epoch_NNNNNN.*.bin every
/// cfg.checkpoint_every epochs. `progress` receives each log entry.
inline TrainResult train_to_dir(const Corpus& corpus, const GanConfig& cfg,
                                const std::string& model_dir,
                                const std::function<void(const TrainLogEntry&)>& progress = {}) {
  const fs::path dir(model_dir);
  ensure_dir(dir);
  const fs::path log_path = dir / "trainlog.csv";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw IoError("cannot write '" + log_path.string() + "'");
  log << "epoch,d_loss,g_loss,d_acc_real,d_acc_fake\n";

  auto on_epoch = [&](const TrainLogEntry& e, const nn::MlpNetwork<double>& g,
                      const nn::MlpNetwork<double>& d) {
    log << e.epoch << ',' << format_double(e.d_loss) << ',' << format_double(e.g_loss) << ','
        << format_double(e.d_accuracy_real) << ',' << format_double(e.d_accuracy_fake) << '\n';
    log.flush();
    if (cfg.checkpoint_every > 0 && e.epoch % cfg.checkpoint_every == 0) {
      ensure_dir(dir / "checkpoints");
      char stem[32];
      std::snprintf(stem, sizeof stem, "epoch_%06zu", e.epoch);
      auto meta = model_meta(corpus, cfg, e.epoch);
      nn::save_network((dir / "checkpoints" / (std::string(stem) + ".generator.bin")).string(), g,
                       meta);
      meta["role"] = "discriminator";
      nn::save_network((dir / "checkpoints" / (std::string(stem) + ".discriminator.bin")).string(),
                       d, meta);
    }
    if (progress) progress(e);
  };

  TrainResult res = train(corpus, cfg, on_epoch);
  auto meta = model_meta(corpus, cfg, cfg.epochs);
  nn::save_network((dir / "generator.bin").string(), res.generator, meta);
  meta["role"] = "discriminator";
  nn::save_network((dir / "discriminator.bin").string(), res.discriminator, meta);
  if (!log) throw IoError("write failed for '" + log_path.string() + "'");
  return res;
}

struct GeneratorModel {
  nn::MlpNetwork<double> generator;
  NormalizationSpec norm;
};

inline GeneratorModel load_generator(const std::string& model_dir) {
  const auto path = (fs::path(model_dir) / "generator.bin").string();
  auto loaded = nn::load_network(path);
  if (!loaded.meta.contains("norm")) {
    throw ValidationError("'" + path + "' lacks the normalization spec");
  }
  if (loaded.net.output_dim() != kUmSize) {
    throw ValidationError("'" + path + "' does not emit 56-value units of movement");
  }
  return {std::move(loaded.net), norm_from_json(loaded.meta["norm"])};
}

struct GenerateOptions {
  double duration = 10.0;
  std::uint64_t seed = 0;
  std::size_t blend = kDefaultBlendFrames;
  double frame_period = kDefaultFramePeriod;
};

/// Samples enough units of movement for `duration` and assembles them.
inline GestureSequence generate_sequence(const GeneratorModel& model, const GenerateOptions& opts) {
  const std::size_t n = std::max<std::size_t>(1, ums_needed(opts.duration, opts.frame_period));
  Rng rng(opts.seed);
  return assemble(generate_ums(model.generator, n, rng, model.norm), opts.frame_period, opts.blend);
}

struct PipelineOptions {
  std::string recording;
  std::optional<std::string> hands;
  RetargetConfig retarget;
  std::string workdir = "gestgen_run";
  std::size_t stride = kPosesPerUm;
  GanConfig gan;
  GenerateOptions generate;
};

struct PipelineOutputs {
  std::string poses;
  std::string corpus;
  std::string model_dir;
  std::string sequence;
  RetargetSummary retarget;
  std::size_t corpus_size = 0;
  std::size_t sequence_frames = 0;
};

/// retarget → dataset → train → generate → export, each stage labelled in
/// error messages.
inline PipelineOutputs run_pipeline(const PipelineOptions& opts,
                                    const std::function<void(const std::string&)>& note = {}) {
  const fs::path work(opts.workdir);
  stage("setup", [&] { ensure_dir(work); });
  PipelineOutputs out;
  out.poses = (work / "poses.jsonl").string();
  out.corpus = (work / "corpus.bin").string();
  out.model_dir = (work / "model").string();
  out.sequence = (work / "seq.jsonl").string();
  auto say = [&](const std::string& s) {
    if (note) note(s);
  };

  out.retarget = stage("retarget", [&] {
    return retarget_file(opts.recording, opts.hands, opts.retarget, out.poses);
  });
  say("retarget: " + std::to_string(out.retarget.frames) + " poses, " +
      std::to_string(out.retarget.holds) + " held channels");

  const Corpus corpus = stage("dataset", [&] {
    Corpus c = build_corpus_from_files({out.poses},
                                       NormalizationSpec::from_limits(opts.retarget.limits),
                                       opts.stride);
    save_corpus(c, out.corpus);
    return c;
  });
  out.corpus_size = corpus.ums.size();
  say("dataset: " + std::to_string(corpus.ums.size()) + " units of movement");

  stage("train", [&] {
    GanConfig cfg = opts.gan;
    if (cfg.batch > corpus.ums.size()) {
      throw ValidationError("corpus has " + std::to_string(corpus.ums.size()) +
                            " units of movement, fewer than the batch size " +
                            std::to_string(cfg.batch));
    }
    train_to_dir(corpus, cfg, out.model_dir);
  });
  say("train: " + std::to_string(opts.gan.epochs) + " epochs");

  const GestureSequence seq = stage("generate", [&] {
    return generate_sequence(load_generator(out.model_dir), opts.generate);
  });
  stage("export", [&] { export_sequence(seq, out.sequence); });
  out.sequence_frames = seq.poses.size();
  say("generate: " + std::to_string(seq.poses.size()) + " frames -> " + out.sequence);
  return out;
}

}  // namespace gestgen::pipeline
