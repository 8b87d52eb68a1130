// SPDX-License-Identifier: Apache-2.0

#include "restorelab/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "restorelab/losses.h"
#include "restorelab/metrics.h"
#include "restorelab/parallel.h"
#include "restorelab/pipeline.h"
#include "restorelab/random.h"
#include "restorelab/resample.h"
#include "restorelab/restore.h"
#include "restorelab/rir.h"
#include "restorelab/serialize.h"
#include "restorelab/wav.h"

namespace restorelab {

namespace fs = std::filesystem;

namespace {

/// Option combinations that parse but make no sense; reported as usage errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  int threads = 0;
  bool json = false;
  std::string format = "float32";
};

std::vector<fs::path> wav_files(const fs::path& p) {
  if (!fs::exists(p)) throw std::runtime_error("'" + p.string() + "' does not exist");
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error("no .wav files in '" + p.string() + "'");
  return out;
}

AudioBuffer load_at_default_rate(const fs::path& p) {
  AudioBuffer a = read_wav(p);
  return a.sample_rate == kDefaultSampleRate ? a : resample(a, kDefaultSampleRate);
}

Pool load_pool(const std::vector<std::string>& sources, int threads) {
  std::vector<fs::path> files;
  for (const auto& s : sources) {
    const auto f = wav_files(s);
    files.insert(files.end(), f.begin(), f.end());
  }
  Pool pool(files.size());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < files.size(); ++i) {
    pool[i].id = files[i].stem().string();
    if (!ids.insert(pool[i].id).second) {
      throw std::runtime_error("duplicate item id '" + pool[i].id + "'");
    }
  }
  parallel_for(files.size(), threads,
               [&](std::size_t i) { pool[i].audio = load_at_default_rate(files[i]); });
  return pool;
}

ToolConfig load_config(const Common& c) {
  return c.config.empty() ? ToolConfig{} : load_tool_config(c.config);
}

int resolve_threads(const Common& c, const ToolConfig& cfg) {
  if (c.threads > 0) return c.threads;
  if (cfg.threads > 0) return cfg.threads;
  return default_thread_count();
}

/// Writes <id>.target.wav and <id>.degraded.wav for every item plus
/// manifest.jsonl and, when records exist, records.jsonl.
std::vector<ManifestEntry> write_paired_set(const PairedSet& set, const fs::path& dir,
                                            WavFormat format, int threads) {
  fs::create_directories(dir);
  std::vector<ManifestEntry> entries(set.items.size());
  parallel_for(set.items.size(), threads, [&](std::size_t i) {
    const PairedItem& item = set.items[i];
    ManifestEntry& e = entries[i];
    e.id = item.id;
    e.target = item.id + ".target.wav";
    e.degraded = item.id + ".degraded.wav";
    e.record = item.record;
    write_wav(dir / e.target, item.target, format);
    write_wav(dir / e.degraded, item.degraded, format);
  });
  write_manifest(dir / "manifest.jsonl", entries);
  bool any_record = false;
  for (const auto& e : entries) any_record = any_record || e.record.has_value();
  if (any_record) {
    std::ofstream rec(dir / "records.jsonl", std::ios::trunc);
    for (const auto& e : entries) {
      if (e.record) rec << Json{{"id", e.id}, {"record", to_json(*e.record)}}.dump() << '\n';
    }
    if (!rec) throw std::runtime_error("cannot write records.jsonl");
  }
  return entries;
}

Json set_summary(const std::string& name, const fs::path& dir,
                 const std::vector<ManifestEntry>& entries) {
  Json items = Json::array();
  for (const auto& e : entries) {
    Json j = {{"id", e.id}, {"target", (dir / e.target).string()},
              {"degraded", (dir / e.degraded).string()}};
    if (e.record) j["steps"] = e.record->steps.size();
    items.push_back(j);
  }
  return {{"set", name}, {"out", dir.string()}, {"manifest", (dir / "manifest.jsonl").string()},
          {"count", entries.size()}, {"items", items}};
}

// ---------------------------------------------------------------------------

struct DegradeArgs {
  std::vector<std::string> speech, noise, rir;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_degrade(const DegradeArgs& a, const Common& c, std::ostream& out) {
  const ToolConfig cfg = load_config(c);
  const int threads = resolve_threads(c, cfg);
  const std::uint64_t seed = a.seed.value_or(cfg.seed);
  const Pool speech = load_pool(a.speech, threads);
  const Pool noise = a.noise.empty() ? Pool{} : load_pool(a.noise, threads);
  const Pool rirs = a.rir.empty() ? Pool{} : load_pool(a.rir, threads);

  PairedSet set;
  set.name = "degrade";
  set.items.resize(speech.size());
  parallel_for(speech.size(), threads, [&](std::size_t i) {
    DegradeResult r = degrade(speech[i].audio, noise, rirs, cfg.distortion, seed, i);
    set.items[i] = {speech[i].id, std::move(r.target), std::move(r.degraded), std::move(r.record)};
  });
  const auto entries = write_paired_set(set, a.out, wav_format_from_string(c.format), threads);
  if (c.json) out << set_summary(set.name, a.out, entries).dump(2) << '\n';
  return kExitOk;
}

struct TestsetArgs {
  std::string kind;
  std::vector<std::string> speech, noise, rir;
  std::optional<int> rate;
  std::optional<double> eta;
  std::optional<std::uint64_t> seed;
  double segment_seconds = kGsrSegmentSeconds;
  std::string out;
};

int run_build_testset(const TestsetArgs& a, const Common& c, std::ostream& out) {
  const ToolConfig cfg = load_config(c);
  const int threads = resolve_threads(c, cfg);
  const std::uint64_t seed = a.seed.value_or(cfg.seed);
  if (a.kind == "sr" && !a.rate) throw UsageError("build-testset sr requires --rate");
  if (a.kind == "declip" && !a.eta) throw UsageError("build-testset declip requires --eta");
  if (a.kind == "dereverb" && a.rir.empty()) throw UsageError("build-testset dereverb requires --rir");

  const Pool corpus = load_pool(a.speech, threads);
  PairedSet set;
  if (a.kind == "sr") {
    set = build_sr_testset(corpus, *a.rate, threads);
  } else if (a.kind == "declip") {
    set = build_declip_testset(corpus, *a.eta, threads);
  } else if (a.kind == "dereverb") {
    set = build_dereverb_testset(corpus, load_pool(a.rir, threads), seed, threads);
  } else {
    const Pool noise = a.noise.empty() ? Pool{} : load_pool(a.noise, threads);
    const Pool rirs = a.rir.empty() ? Pool{} : load_pool(a.rir, threads);
    set = build_gsr_testset(corpus, noise, rirs, cfg.distortion, seed, threads, a.segment_seconds);
  }
  const auto entries = write_paired_set(set, a.out, wav_format_from_string(c.format), threads);
  if (c.json) out << set_summary(set.name, a.out, entries).dump(2) << '\n';
  return kExitOk;
}

struct RirArgs {
  std::size_t count = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  int rate = kDefaultSampleRate;
  std::size_t max_images = RirOptions{}.max_images;
};

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

int run_rir_gen(const RirArgs& a, const Common& c, std::ostream& out) {
  const ToolConfig cfg = load_config(c);
  const int threads = resolve_threads(c, cfg);
  const std::uint64_t seed = a.seed.value_or(cfg.seed);
  fs::create_directories(a.out);
  RirOptions opts;
  opts.max_images = a.max_images;
  std::vector<Json> lines(a.count);
  const WavFormat format = wav_format_from_string(c.format);
  parallel_for(a.count, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const RoomConfig room = sample_room(rng);
    const ImpulseResponse ir = simulate_rir(room, a.rate, opts);
    char name[32];
    std::snprintf(name, sizeof(name), "rir_%04zu", i);
    write_wav(fs::path(a.out) / (std::string(name) + ".wav"), ir.audio, format);
    Json measured = nullptr;
    try {
      measured = measure_rt60(ir.audio);
    } catch (const std::exception&) {
      // too short or too sparse to fit a decay; leave null
    }
    lines[i] = {{"id", name},
                {"dims", vec_json(room.dims)},
                {"mic_pos", vec_json(room.mic_pos)},
                {"src_pos", vec_json(room.src_pos)},
                {"rt60", room.rt60},
                {"pattern", to_string(room.pattern)},
                {"mic_orientation", vec_json(room.mic_orientation)},
                {"distance", room.distance()},
                {"measured_rt60", measured}};
  });
  std::ofstream side(fs::path(a.out) / "rooms.jsonl", std::ios::trunc);
  for (const auto& l : lines) side << l.dump() << '\n';
  if (!side) throw std::runtime_error("cannot write rooms.jsonl");
  if (c.json) out << Json{{"out", a.out}, {"count", a.count}, {"rooms", lines}}.dump(2) << '\n';
  return kExitOk;
}

struct EvaluateArgs {
  std::string pairs;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a, const Common& c, std::ostream& out) {
  const ToolConfig cfg = load_config(c);
  const int threads = resolve_threads(c, cfg);
  const auto entries = read_manifest(a.pairs);
  const fs::path base = fs::path(a.pairs).parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  std::vector<EvalPair> pairs(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    pairs[i] = {entries[i].id, read_wav(resolve(entries[i].target)),
                read_wav(resolve(entries[i].degraded))};
  });
  const MetricReport report = evaluate(pairs, cfg.metrics, threads);
  const Json j = to_json(report);
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + a.out + "'");
    if (fs::path(a.out).extension() == ".csv") {
      f << to_csv(report);
    } else {
      f << j.dump(2) << '\n';
    }
    if (!f) throw std::runtime_error("write failed for '" + a.out + "'");
  }
  if (c.json || a.out.empty()) {
    out << (a.out.empty() ? j : Json{{"out", a.out}, {"mean", j["mean"]}}).dump(2) << '\n';
  }
  return kExitOk;
}

struct LossesArgs {
  std::string a, b;
};

int run_losses(const LossesArgs& a, const Common& c, std::ostream& out) {
  const ToolConfig cfg = load_config(c);
  const AudioBuffer est = read_wav(a.a);
  const AudioBuffer ref = read_wav(a.b);
  const LossBreakdown parts = loss_components(est, ref, cfg.losses);
  out << to_json(parts, cfg.weights).dump(2) << '\n';
  return kExitOk;
}

struct RestoreArgs {
  std::string degraded, target, out;
  std::optional<int> iterations;
  std::optional<double> ceiling;
};

int run_restore(const RestoreArgs& a, const Common& c, std::ostream& out) {
  const ToolConfig cfg = load_config(c);
  RestoreConfig rc = cfg.restore;
  rc.nnls.threads = resolve_threads(c, cfg);
  if (a.iterations) rc.griffin_lim.iterations = *a.iterations;
  if (a.ceiling) rc.mask_ceiling = *a.ceiling;
  const auto r = restore_oracle_detailed(read_wav(a.degraded), read_wav(a.target), rc);
  write_wav(a.out, r.audio, wav_format_from_string(c.format));
  if (c.json) {
    out << Json{{"out", a.out},
                {"samples", r.audio.size()},
                {"sample_rate", r.audio.sample_rate},
                {"mel_lsd", lsd(r.target_mel.bins, r.restored_mel.bins)},
                {"peak_limited", r.peak_limited}}
               .dump(2)
        << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speech degradation simulation and restoration evaluation", "restorelab"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "JSON tool configuration");
  app.add_option("--threads", common.threads, "Worker threads (overrides RESTORELAB_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", common.json, "Print a machine-readable summary on stdout");
  app.add_option("--format", common.format, "WAV output encoding")
      ->check(CLI::IsMember({"float32", "pcm16"}));

  DegradeArgs dg;
  auto* degrade_cmd = app.add_subcommand("degrade", "Apply the randomized degradation pipeline");
  degrade_cmd->add_option("--speech", dg.speech, "Clean speech directory or files")->required();
  degrade_cmd->add_option("--noise", dg.noise, "Noise directory or files");
  degrade_cmd->add_option("--rir", dg.rir, "Impulse response directory or files");
  degrade_cmd->add_option("--seed", dg.seed, "Master seed");
  degrade_cmd->add_option("--out", dg.out, "Output directory")->required();

  TestsetArgs ts;
  auto* testset_cmd = app.add_subcommand("build-testset", "Build a paired evaluation set");
  testset_cmd->add_option("kind", ts.kind, "sr, declip, dereverb or gsr")
      ->required()
      ->check(CLI::IsMember({"sr", "declip", "dereverb", "gsr"}));
  testset_cmd->add_option("--speech", ts.speech, "Clean speech directory or files")->required();
  testset_cmd->add_option("--noise", ts.noise, "Noise directory or files (gsr)");
  testset_cmd->add_option("--rir", ts.rir, "Impulse responses (dereverb, gsr)");
  testset_cmd->add_option("--rate", ts.rate, "Band-limit sample rate in Hz (sr)")
      ->check(CLI::Range(1, kDefaultSampleRate));
  testset_cmd->add_option("--eta", ts.eta, "Clipping threshold (declip)")->check(CLI::Range(0.0, 1.0));
  testset_cmd->add_option("--seed", ts.seed, "Master seed");
  testset_cmd->add_option("--segment-seconds", ts.segment_seconds, "Segment length (gsr)")
      ->check(CLI::PositiveNumber);
  testset_cmd->add_option("--out", ts.out, "Output directory")->required();

  RirArgs ra;
  auto* rir_cmd = app.add_subcommand("rir-gen", "Simulate random shoebox room impulse responses");
  rir_cmd->add_option("--count", ra.count, "Number of responses")->required();
  rir_cmd->add_option("--seed", ra.seed, "Master seed");
  rir_cmd->add_option("--out", ra.out, "Output directory")->required();
  rir_cmd->add_option("--rate", ra.rate, "Sample rate in Hz")->check(CLI::PositiveNumber);
  rir_cmd->add_option("--max-images", ra.max_images, "Image-source budget per response")
      ->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score target/degraded pairs from a manifest");
  eval_cmd->add_option("--pairs", ev.pairs, "manifest.jsonl")->required();
  eval_cmd->add_option("--out", ev.out, "report.json or report.csv");

  LossesArgs la;
  auto* loss_cmd = app.add_subcommand("losses", "Vocoder loss components of an estimate");
  loss_cmd->add_option("--a", la.a, "Estimate WAV")->required();
  loss_cmd->add_option("--b", la.b, "Reference WAV")->required();

  RestoreArgs rs;
  auto* restore_cmd = app.add_subcommand("restore-oracle", "Oracle mel-mask restoration");
  restore_cmd->add_option("--degraded", rs.degraded, "Degraded WAV")->required();
  restore_cmd->add_option("--target", rs.target, "Clean target WAV")->required();
  restore_cmd->add_option("--out", rs.out, "Output WAV")->required();
  restore_cmd->add_option("--iterations", rs.iterations, "Griffin-Lim iterations")
      ->check(CLI::NonNegativeNumber);
  restore_cmd->add_option("--ceiling", rs.ceiling, "Mask ceiling")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (degrade_cmd->parsed()) return run_degrade(dg, common, out);
    if (testset_cmd->parsed()) return run_build_testset(ts, common, out);
    if (rir_cmd->parsed()) return run_rir_gen(ra, common, out);
    if (eval_cmd->parsed()) return run_evaluate(ev, common, out);
    if (loss_cmd->parsed()) return run_losses(la, common, out);
    if (restore_cmd->parsed()) return run_restore(rs, common, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace restorelab
