// SPDX-License-Identifier: Apache-2.0

#include "restorelab/serialize.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace restorelab {

namespace {

void check_object(const Json& j, const char* what) {
  if (!j.is_object()) throw FormatError(std::string(what) + ": expected a JSON object");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  check_object(j, what);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw FormatError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const char* what) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw FormatError(std::string(what) + "." + key + ": wrong type");
  }
}

template <typename T>
T require(const Json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw FormatError(std::string(what) + ": missing '" + key + "'");
  T out{};
  read(j, key, out, what);
  return out;
}

Json range_json(const Range& r) { return Json::array({r.low, r.high}); }
Json range_json(const IntRange& r) { return Json::array({r.low, r.high}); }

template <typename R>
void read_range(const Json& j, const char* key, R& out, const char* what) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw FormatError(std::string(what) + "." + key + ": expected [low, high]");
  }
  out.low = v[0].get<decltype(out.low)>();
  out.high = v[1].get<decltype(out.high)>();
}

Json distortion_json(const DistortionConfig& c) {
  Json families = Json::array();
  for (FilterFamily f : c.families) families.push_back(to_string(f));
  return {{"p1", c.p1},
          {"p2", c.p2},
          {"p3", c.p3},
          {"p4", c.p4},
          {"p5", c.p5},
          {"eta", range_json(c.eta)},
          {"cutoff_hz", range_json(c.cutoff_hz)},
          {"order", range_json(c.order)},
          {"snr_db", range_json(c.snr_db)},
          {"scale", range_json(c.scale)},
          {"families", families},
          {"trim_reverb", c.trim_reverb}};
}

DistortionConfig distortion_from_json(const Json& j) {
  const char* what = "distortion";
  check_keys(j, {"p1", "p2", "p3", "p4", "p5", "eta", "cutoff_hz", "order", "snr_db", "scale",
                 "families", "trim_reverb"},
             what);
  DistortionConfig c;
  read(j, "p1", c.p1, what);
  read(j, "p2", c.p2, what);
  read(j, "p3", c.p3, what);
  read(j, "p4", c.p4, what);
  read(j, "p5", c.p5, what);
  read_range(j, "eta", c.eta, what);
  read_range(j, "cutoff_hz", c.cutoff_hz, what);
  read_range(j, "order", c.order, what);
  read_range(j, "snr_db", c.snr_db, what);
  read_range(j, "scale", c.scale, what);
  if (j.contains("families")) {
    std::vector<std::string> names;
    read(j, "families", names, what);
    c.families.clear();
    try {
      for (const auto& n : names) c.families.push_back(filter_family_from_string(n));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("distortion.families: ") + e.what());
    }
  }
  read(j, "trim_reverb", c.trim_reverb, what);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("distortion: ") + e.what());
  }
  return c;
}

Json losses_json(const MultiResConfig& c) {
  Json freq = Json::array();
  for (const auto& r : c.freq_windows) freq.push_back(Json::array({r.window_size, r.hop}));
  return {{"freq_windows", freq},
          {"time_windows", c.time_windows},
          {"mel_window", c.mel_stft.window_size},
          {"mel_hop", c.mel_stft.hop},
          {"n_mels", c.mel.n_mels},
          {"sc_conventional", c.sc_conventional}};
}

MultiResConfig losses_from_json(const Json& j) {
  const char* what = "losses";
  check_keys(j, {"freq_windows", "time_windows", "mel_window", "mel_hop", "n_mels",
                 "sc_conventional"},
             what);
  MultiResConfig c = MultiResConfig::defaults();
  if (j.contains("freq_windows")) {
    std::vector<std::vector<int>> pairs;
    read(j, "freq_windows", pairs, what);
    c.freq_windows.clear();
    for (const auto& p : pairs) {
      if (p.size() != 2 || p[0] <= 0 || p[1] <= 0) {
        throw FormatError("losses.freq_windows: entries must be [window, hop] with positive values");
      }
      c.freq_windows.push_back({p[0], p[1]});
    }
  }
  read(j, "time_windows", c.time_windows, what);
  read(j, "mel_window", c.mel_stft.window_size, what);
  read(j, "mel_hop", c.mel_stft.hop, what);
  read(j, "n_mels", c.mel.n_mels, what);
  read(j, "sc_conventional", c.sc_conventional, what);
  if (c.freq_windows.empty() && c.time_windows.empty()) {
    throw FormatError("losses: freq_windows and time_windows are both empty");
  }
  for (std::size_t w : c.time_windows) {
    if (w == 0) throw FormatError("losses.time_windows: entries must be positive");
  }
  return c;
}

Json weights_json(const LossWeights& w) {
  return {{"mel", w.mel},       {"sc", w.sc},         {"mag", w.mag},
          {"seg", w.seg},       {"energy", w.energy}, {"phase", w.phase},
          {"discriminator", w.discriminator}};
}

LossWeights weights_from_json(const Json& j) {
  const char* what = "weights";
  check_keys(j, {"mel", "sc", "mag", "seg", "energy", "phase", "discriminator"}, what);
  LossWeights w;
  read(j, "mel", w.mel, what);
  read(j, "sc", w.sc, what);
  read(j, "mag", w.mag, what);
  read(j, "seg", w.seg, what);
  read(j, "energy", w.energy, what);
  read(j, "phase", w.phase, what);
  read(j, "discriminator", w.discriminator, what);
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("weights: ") + e.what());
  }
  return w;
}

Json metrics_json(const MetricConfig& c) {
  return {{"window", c.stft.window_size},
          {"hop", c.stft.hop},
          {"lsd_floor", c.lsd_floor},
          {"cap_db", c.snr.cap_db},
          {"strict_sisnr", c.snr.strict_estimate_denominator}};
}

MetricConfig metrics_from_json(const Json& j) {
  const char* what = "metrics";
  check_keys(j, {"window", "hop", "lsd_floor", "cap_db", "strict_sisnr"}, what);
  MetricConfig c;
  read(j, "window", c.stft.window_size, what);
  read(j, "hop", c.stft.hop, what);
  read(j, "lsd_floor", c.lsd_floor, what);
  read(j, "cap_db", c.snr.cap_db, what);
  read(j, "strict_sisnr", c.snr.strict_estimate_denominator, what);
  return c;
}

Json restore_json(const RestoreConfig& c) {
  Json ceiling = std::isinf(c.mask_ceiling) ? Json(nullptr) : Json(c.mask_ceiling);
  return {{"window", c.stft.window_size},
          {"hop", c.stft.hop},
          {"n_mels", c.mel.n_mels},
          {"mask_ceiling", ceiling},
          {"nnls_iterations", c.nnls.iterations},
          {"griffin_lim_iterations", c.griffin_lim.iterations},
          {"phase_init", c.griffin_lim.init == PhaseInit::kZero ? "zero" : "random"},
          {"phase_seed", c.griffin_lim.seed}};
}

RestoreConfig restore_from_json(const Json& j) {
  const char* what = "restore";
  check_keys(j, {"window", "hop", "n_mels", "mask_ceiling", "nnls_iterations",
                 "griffin_lim_iterations", "phase_init", "phase_seed"},
             what);
  RestoreConfig c;
  read(j, "window", c.stft.window_size, what);
  read(j, "hop", c.stft.hop, what);
  read(j, "n_mels", c.mel.n_mels, what);
  if (j.contains("mask_ceiling")) {
    if (j.at("mask_ceiling").is_null()) {
      c.mask_ceiling = std::numeric_limits<double>::infinity();
    } else {
      read(j, "mask_ceiling", c.mask_ceiling, what);
    }
  }
  read(j, "nnls_iterations", c.nnls.iterations, what);
  read(j, "griffin_lim_iterations", c.griffin_lim.iterations, what);
  if (j.contains("phase_init")) {
    const std::string init = require<std::string>(j, "phase_init", what);
    if (init == "zero") {
      c.griffin_lim.init = PhaseInit::kZero;
    } else if (init == "random") {
      c.griffin_lim.init = PhaseInit::kRandom;
    } else {
      throw FormatError("restore.phase_init: expected 'zero' or 'random'");
    }
  }
  read(j, "phase_seed", c.griffin_lim.seed, what);
  return c;
}

}  // namespace

Json to_json(const ToolConfig& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"seed", cfg.seed},
          {"threads", cfg.threads},
          {"distortion", distortion_json(cfg.distortion)},
          {"losses", losses_json(cfg.losses)},
          {"weights", weights_json(cfg.weights)},
          {"metrics", metrics_json(cfg.metrics)},
          {"restore", restore_json(cfg.restore)}};
}

ToolConfig tool_config_from_json(const Json& j) {
  const char* what = "config";
  check_keys(j, {"schema_version", "seed", "threads", "distortion", "losses", "weights",
                 "metrics", "restore"},
             what);
  const int version = require<int>(j, "schema_version", what);
  if (version != kSchemaVersion) {
    throw FormatError("config: schema_version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kSchemaVersion) + ")");
  }
  ToolConfig cfg;
  read(j, "seed", cfg.seed, what);
  read(j, "threads", cfg.threads, what);
  if (j.contains("distortion")) cfg.distortion = distortion_from_json(j.at("distortion"));
  if (j.contains("losses")) cfg.losses = losses_from_json(j.at("losses"));
  if (j.contains("weights")) cfg.weights = weights_from_json(j.at("weights"));
  if (j.contains("metrics")) cfg.metrics = metrics_from_json(j.at("metrics"));
  if (j.contains("restore")) cfg.restore = restore_from_json(j.at("restore"));
  return cfg;
}

ToolConfig load_tool_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return tool_config_from_json(j);
}

Json to_json(const DistortionRecord& rec) {
  Json steps = Json::array();
  for (const DistortionStep& step : rec.steps) {
    if (const auto* r = std::get_if<ReverbStep>(&step)) {
      steps.push_back({{"type", "reverb"}, {"rir_id", r->rir_id}});
    } else if (const auto* c = std::get_if<ClipStep>(&step)) {
      steps.push_back({{"type", "clip"}, {"eta", c->eta}});
    } else if (const auto* l = std::get_if<LowpassStep>(&step)) {
      steps.push_back({{"type", "lowpass"},
                       {"family", to_string(l->family)},
                       {"cutoff_hz", l->cutoff_hz},
                       {"order", l->order},
                       {"noise_lowpass", l->noise_lowpass}});
    } else if (const auto* n = std::get_if<NoiseStep>(&step)) {
      steps.push_back({{"type", "noise"},
                       {"noise_id", n->noise_id},
                       {"offset", n->offset},
                       {"snr_db", n->snr_db}});
    }
  }
  return {{"master_seed", rec.master_seed}, {"index", rec.index}, {"seed", rec.seed},
          {"q", rec.q},                     {"trim_reverb", rec.trim_reverb},
          {"steps", steps}};
}

DistortionRecord record_from_json(const Json& j) {
  const char* what = "record";
  check_keys(j, {"master_seed", "index", "seed", "q", "trim_reverb", "steps"}, what);
  DistortionRecord rec;
  rec.master_seed = require<std::uint64_t>(j, "master_seed", what);
  rec.index = require<std::uint64_t>(j, "index", what);
  rec.seed = require<std::uint64_t>(j, "seed", what);
  rec.q = require<double>(j, "q", what);
  read(j, "trim_reverb", rec.trim_reverb, what);
  if (!j.contains("steps") || !j.at("steps").is_array()) {
    throw FormatError("record: 'steps' must be an array");
  }
  for (const Json& s : j.at("steps")) {
    const char* sw = "record.steps[]";
    const std::string type = require<std::string>(s, "type", sw);
    if (type == "reverb") {
      check_keys(s, {"type", "rir_id"}, sw);
      rec.steps.push_back(ReverbStep{require<std::string>(s, "rir_id", sw)});
    } else if (type == "clip") {
      check_keys(s, {"type", "eta"}, sw);
      rec.steps.push_back(ClipStep{require<double>(s, "eta", sw)});
    } else if (type == "lowpass") {
      check_keys(s, {"type", "family", "cutoff_hz", "order", "noise_lowpass"}, sw);
      LowpassStep l;
      try {
        l.family = filter_family_from_string(require<std::string>(s, "family", sw));
      } catch (const std::invalid_argument& e) {
        throw FormatError(std::string(sw) + ": " + e.what());
      }
      l.cutoff_hz = require<double>(s, "cutoff_hz", sw);
      l.order = require<int>(s, "order", sw);
      read(s, "noise_lowpass", l.noise_lowpass, sw);
      rec.steps.push_back(l);
    } else if (type == "noise") {
      check_keys(s, {"type", "noise_id", "offset", "snr_db"}, sw);
      rec.steps.push_back(NoiseStep{require<std::string>(s, "noise_id", sw),
                                    require<std::uint64_t>(s, "offset", sw),
                                    require<double>(s, "snr_db", sw)});
    } else {
      throw FormatError("record: unknown step type '" + type + "'");
    }
  }
  return rec;
}

Json to_json(const ManifestEntry& e) {
  Json j = {{"id", e.id}, {"target", e.target}, {"degraded", e.degraded}};
  if (e.record) j["record"] = to_json(*e.record);
  return j;
}

ManifestEntry manifest_entry_from_json(const Json& j) {
  const char* what = "manifest entry";
  check_keys(j, {"id", "target", "degraded", "record"}, what);
  ManifestEntry e;
  e.id = require<std::string>(j, "id", what);
  e.target = require<std::string>(j, "target", what);
  e.degraded = require<std::string>(j, "degraded", what);
  if (j.contains("record") && !j.at("record").is_null()) e.record = record_from_json(j.at("record"));
  return e;
}

std::string to_jsonl(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<ManifestEntry> parse_jsonl(const std::string& text) {
  std::vector<ManifestEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(manifest_entry_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw FormatError("manifest line " + std::to_string(number) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError("manifest line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_jsonl(ss.str());
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
  out << to_jsonl(entries);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Json to_json(const MetricReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    if (r.error) {
      rows.push_back({{"id", r.id}, {"error", *r.error}});
    } else {
      rows.push_back({{"id", r.id},
                      {"lsd", r.lsd},
                      {"ssim", r.ssim},
                      {"sisnr_db", r.sisnr_db},
                      {"sispnr_db", r.sispnr_db}});
    }
  }
  Json mean = nullptr;
  if (report.mean) {
    mean = {{"lsd", report.mean->lsd},
            {"ssim", report.mean->ssim},
            {"sisnr_db", report.mean->sisnr_db},
            {"sispnr_db", report.mean->sispnr_db},
            {"count", report.mean->count}};
  }
  return {{"schema_version", kSchemaVersion},
          {"config", metrics_json(report.config)},
          {"rows", rows},
          {"mean", mean}};
}

std::string to_csv(const MetricReport& report) {
  std::string out = "id,lsd,ssim,sisnr_db,sispnr_db\n";
  char buf[128];
  for (const auto& r : report.rows) {
    std::string id = r.id;
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : id) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      id = quoted + "\"";
    }
    if (r.error) {
      out += id + ",,,,\n";
      continue;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g,%.17g\n", r.lsd, r.ssim, r.sisnr_db,
                  r.sispnr_db);
    out += id + buf;
  }
  return out;
}

Json to_json(const LossBreakdown& parts, const LossWeights& w) {
  Json freq = Json::array();
  for (const auto& t : parts.freq) {
    freq.push_back({{"window", t.stft.window_size}, {"hop", t.stft.hop}, {"sc", t.sc}, {"mag", t.mag}});
  }
  Json time = Json::array();
  for (const auto& t : parts.time) {
    time.push_back({{"window", t.window}, {"seg", t.seg}, {"energy", t.energy}, {"phase", t.phase}});
  }
  const double lf = frequency_loss(parts, w);
  const double lt = time_loss(parts, w);
  return {{"mel", parts.mel},
          {"freq", freq},
          {"time", time},
          {"weights", weights_json(w)},
          {"frequency_loss", lf},
          {"time_loss", lt},
          {"total", lf + lt}};
}

}  // namespace restorelab
