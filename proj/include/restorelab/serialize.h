// SPDX-License-Identifier: Apache-2.0
//
// JSON forms of the tool configuration, distortion records, JSON-lines
// manifests and metric reports.

#ifndef RESTORELAB_SERIALIZE_H_
#define RESTORELAB_SERIALIZE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "restorelab/losses.h"
#include "restorelab/metrics.h"
#include "restorelab/pipeline.h"
#include "restorelab/restore.h"

namespace restorelab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ToolConfig {
  DistortionConfig distortion{};
  MultiResConfig losses = MultiResConfig::defaults();
  LossWeights weights{};
  MetricConfig metrics{};
  RestoreConfig restore{};
  std::uint64_t seed = 0;
  int threads = 0;  // 0: RESTORELAB_THREADS or the hardware count
};

/// Thrown for malformed configs, records and manifests.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const ToolConfig& cfg);
/// Missing keys keep their defaults; unknown keys and a schema_version other
/// than the current one are rejected.
ToolConfig tool_config_from_json(const Json& j);
ToolConfig load_tool_config(const std::filesystem::path& path);

Json to_json(const DistortionRecord& rec);
DistortionRecord record_from_json(const Json& j);

/// One JSON-lines manifest entry. Paths are stored as written; readers
/// resolve relative paths against the manifest's directory.
struct ManifestEntry {
  std::string id;
  std::string target;
  std::string degraded;
  std::optional<DistortionRecord> record;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

Json to_json(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(const Json& j);
std::string to_jsonl(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> parse_jsonl(const std::string& text);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

Json to_json(const MetricReport& report);
/// Header id,lsd,ssim,sisnr_db,sispnr_db; flagged rows leave the metric
/// fields empty.
std::string to_csv(const MetricReport& report);

Json to_json(const LossBreakdown& parts, const LossWeights& w);

}  // namespace restorelab

#endif  // RESTORELAB_SERIALIZE_H_
