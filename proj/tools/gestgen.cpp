// gestgen: capture → retarget → dataset → train → generate → play.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error, 4 numerical abort.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gestgen/gestgen.hpp"

namespace {

using namespace gestgen;

gestgen::RetargetConfig config_or_default(const std::string& path) {
  return path.empty() ? RetargetConfig{} : load_retarget_config(path);
}

void add_gan_flags(CLI::App* cmd, GanConfig& gan) {
  cmd->add_option("--epochs", gan.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--seed", gan.seed, "Seed for init, shuffling and noise")->capture_default_str();
  cmd->add_option("--batch", gan.batch, "Batch size")->capture_default_str();
  cmd->add_option("--lr", gan.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--beta1", gan.beta1, "Adam beta1")->capture_default_str();
  cmd->add_option("--beta2", gan.beta2, "Adam beta2")->capture_default_str();
  cmd->add_option("--z-dim", gan.z_dim, "Generator noise dimension")->capture_default_str();
  cmd->add_option("--checkpoint-every", gan.checkpoint_every,
                  "Write checkpoints every N epochs (0 = only final)")
      ->capture_default_str();
}

void print_log_entry(const TrainLogEntry& e, std::size_t total) {
  if (e.epoch == 1 || e.epoch == total || e.epoch % 50 == 0) {
    std::cerr << "epoch " << e.epoch << "/" << total << "  d_loss " << e.d_loss << "  g_loss "
              << e.g_loss << "  d_acc_real " << e.d_accuracy_real << "  d_acc_fake "
              << e.d_accuracy_fake << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Talking-gesture toolkit: skeleton retargeting and GAN gesture synthesis"};
  app.require_subcommand(1);

  // synth
  synth::Options synth_opts;
  std::string synth_out = "recording.jsonl";
  int synth_window = 20;
  auto* synth_cmd = app.add_subcommand("synth", "Write a procedural recording with glove crops");
  synth_cmd->add_option("--frames", synth_opts.frames, "Number of frames")->capture_default_str();
  synth_cmd->add_option("--seed", synth_opts.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--fps", synth_opts.fps, "Frame rate (Hz)")->capture_default_str();
  synth_cmd->add_option("--subject", synth_opts.subject, "Subject label")->capture_default_str();
  synth_cmd->add_option("--window", synth_window, "Glove crop side (pixels)")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Recording path; hands.jsonl and gloves/ go beside it")
      ->capture_default_str();

  // retarget
  std::string rt_recording, rt_hands, rt_config, rt_out = "poses.jsonl";
  std::optional<std::uint64_t> rt_seed;
  auto* rt_cmd = app.add_subcommand("retarget", "Map a recording to robot joint poses");
  rt_cmd->add_option("--recording", rt_recording, "Recording JSONL")->required();
  rt_cmd->add_option("--hands", rt_hands, "hands.jsonl sidecar with glove crops");
  rt_cmd->add_option("--config", rt_config, "Limits file (default: built-in Pepper limits)");
  rt_cmd->add_option("--seed", rt_seed, "Overrides retarget.seed (hand opening draws)");
  rt_cmd->add_option("--out", rt_out, "Pose stream output")->capture_default_str();

  // dataset build
  std::vector<std::string> ds_inputs;
  std::string ds_out = "corpus.bin", ds_config;
  std::size_t ds_stride = kPosesPerUm;
  double ds_holdout = 0.0;
  auto* ds_cmd = app.add_subcommand("dataset", "Corpus operations");
  auto* ds_build = ds_cmd->add_subcommand("build", "Window pose streams into a normalized corpus");
  ds_cmd->require_subcommand(1);
  ds_build->add_option("inputs", ds_inputs, "Pose stream JSONL files")->required();
  ds_build->add_option("--stride", ds_stride, "Window stride in poses (4 = non-overlapping)")
      ->capture_default_str();
  ds_build->add_option("--out", ds_out, "Corpus output")->capture_default_str();
  ds_build->add_option("--config", ds_config, "Limits file giving the normalization bounds");
  ds_build->add_option("--holdout", ds_holdout,
                       "Fraction of trailing units written to <out>.holdout.bin")
      ->capture_default_str();

  // train
  GanConfig train_cfg;
  std::string tr_corpus, tr_out = "model";
  auto* tr_cmd = app.add_subcommand("train", "Train the GAN on a corpus");
  tr_cmd->add_option("--corpus", tr_corpus, "corpus.bin")->required();
  tr_cmd->add_option("--out", tr_out, "Model directory")->capture_default_str();
  add_gan_flags(tr_cmd, train_cfg);

  // generate
  pipeline::GenerateOptions gen_opts;
  std::string gen_model = "model", gen_out = "seq.jsonl";
  auto* gen_cmd = app.add_subcommand("generate", "Synthesize a gesture sequence for a duration");
  gen_cmd->add_option("--model", gen_model, "Model directory")->capture_default_str();
  gen_cmd->add_option("--duration", gen_opts.duration, "Speech duration (s)")->capture_default_str();
  gen_cmd->add_option("--seed", gen_opts.seed, "Noise seed")->capture_default_str();
  gen_cmd->add_option("--blend", gen_opts.blend, "Interpolated frames at each seam")
      ->capture_default_str();
  gen_cmd->add_option("--frame-period", gen_opts.frame_period, "Seconds per pose")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Sequence output")->capture_default_str();

  // play
  std::string play_seq, play_config, play_format = "timeline";
  bool play_realtime = false;
  auto* play_cmd = app.add_subcommand("play", "Print a sequence as a timeline or frame stream");
  play_cmd->add_option("--seq", play_seq, "Sequence JSONL")->required();
  play_cmd->add_option("--config", play_config, "Limits file for the gauges");
  play_cmd->add_option("--format", play_format, "timeline or jsonl")
      ->check(CLI::IsMember({"timeline", "jsonl"}))
      ->capture_default_str();
  play_cmd->add_flag("--realtime", play_realtime, "Emit frames at wall-clock rate");

  // pipeline
  pipeline::PipelineOptions pl;
  std::string pl_hands, pl_config;
  pl.gan.epochs = 50;
  auto* pl_cmd = app.add_subcommand("pipeline", "Run retarget, dataset, train and generate");
  pl_cmd->add_option("--recording", pl.recording, "Recording JSONL")->required();
  pl_cmd->add_option("--hands", pl_hands, "hands.jsonl sidecar");
  pl_cmd->add_option("--config", pl_config, "Limits file");
  pl_cmd->add_option("--workdir", pl.workdir, "Output directory")->capture_default_str();
  pl_cmd->add_option("--stride", pl.stride, "Window stride")->capture_default_str();
  add_gan_flags(pl_cmd, pl.gan);
  pl_cmd->add_option("--duration", pl.generate.duration, "Sequence duration (s)")
      ->capture_default_str();
  pl_cmd->add_option("--gen-seed", pl.generate.seed, "Generation noise seed")
      ->capture_default_str();
  pl_cmd->add_option("--blend", pl.generate.blend, "Interpolated frames at each seam")
      ->capture_default_str();
  pl_cmd->add_option("--frame-period", pl.generate.frame_period, "Seconds per pose")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (*synth_cmd) {
      const auto sidecar = synth::write_session(synth_opts, synth_out, synth_window);
      std::cerr << "wrote " << synth_out << " (" << synth_opts.frames << " frames) and "
                << sidecar << '\n';
    } else if (*rt_cmd) {
      auto cfg = config_or_default(rt_config);
      if (rt_seed) cfg.seed = *rt_seed;
      const auto hands = rt_hands.empty() ? std::nullopt : std::optional<std::string>(rt_hands);
      const auto s = pipeline::retarget_file(rt_recording, hands, cfg, rt_out);
      std::cerr << "retargeted " << s.frames << " frames (" << s.holds
                << " held channels) -> " << rt_out << '\n';
    } else if (*ds_cmd) {
      const auto cfg = config_or_default(ds_config);
      Corpus corpus = pipeline::build_corpus_from_files(
          ds_inputs, NormalizationSpec::from_limits(cfg.limits), ds_stride);
      if (ds_holdout > 0.0) {
        const Corpus held = split_holdout(corpus, ds_holdout);
        save_corpus(held, ds_out + ".holdout.bin");
        std::cerr << "held out " << held.ums.size() << " units -> " << ds_out << ".holdout.bin\n";
      }
      save_corpus(corpus, ds_out);
      std::cerr << "corpus: " << corpus.ums.size() << " units of movement -> " << ds_out << '\n';
    } else if (*tr_cmd) {
      const Corpus corpus = load_corpus(tr_corpus);
      pipeline::train_to_dir(corpus, train_cfg, tr_out, [&](const TrainLogEntry& e) {
        print_log_entry(e, train_cfg.epochs);
      });
      std::cerr << "model -> " << tr_out << '\n';
    } else if (*gen_cmd) {
      const auto seq = pipeline::generate_sequence(pipeline::load_generator(gen_model), gen_opts);
      export_sequence(seq, gen_out);
      std::cerr << seq.poses.size() << " frames (" << seq.duration() << " s) -> " << gen_out
                << '\n';
    } else if (*play_cmd) {
      const auto seq = load_sequence(play_seq);
      if (play_format == "timeline") {
        print_timeline(seq, config_or_default(play_config).limits, std::cout, play_realtime);
      } else {
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < seq.poses.size(); ++i) {
          const double t = static_cast<double>(i) * seq.frame_period;
          if (play_realtime) {
            std::this_thread::sleep_until(start + std::chrono::duration<double>(t));
          }
          nlohmann::ordered_json j;
          j["t"] = t;
          j["q"] = seq.poses[i].q;
          std::cout << j.dump() << '\n' << std::flush;
        }
      }
    } else if (*pl_cmd) {
      pl.retarget = config_or_default(pl_config);
      if (!pl_hands.empty()) pl.hands = pl_hands;
      pipeline::run_pipeline(pl, [](const std::string& s) { std::cerr << s << '\n'; });
    }
  } catch (const gestgen::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kValidation);
  }
  return 0;
}
