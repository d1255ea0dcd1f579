#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "framepool/core.hpp"
#include "framepool/eval.hpp"
#include "framepool/trainer.hpp"

namespace framepool {

inline constexpr int kModelSchemaVersion = 1;

// One manifest line: a video, its feature file (relative to the manifest
// location), per-event labels, and the split it belongs to.
struct ManifestEntry {
  std::string video_id;
  std::string path;
  std::map<std::string, int> labels;  // event_id -> +1 (pos) / -1 (neg)
  std::string split;                  // "train" or "test"
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  // Sorted union of every event id appearing in any entry's labels.
  std::vector<std::string> event_ids() const;
};

// The on-disk form of a trained model plus the configuration snapshot.
struct ModelFile {
  int schema_version = kModelSchemaVersion;
  TrainerConfig config;
  TrainedModel model;
};

// Per-video feature CSV: one row per frame, m comma-separated decimal
// floats, no header, LF line endings. The video id is the file stem.
FrameFeatureSequence read_video_features(const std::filesystem::path& path);
void write_video_features(const std::filesystem::path& path,
                          const FrameFeatureSequence& seq);

// JSON Lines manifest with fields video_id, path, labels, split; unknown
// fields are ignored on read. Reading verifies ids are unique and every
// referenced feature file exists next to the manifest.
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const Manifest& manifest);

// Model JSON round trip: byte-deterministic output (sorted keys, shortest
// round-trip floats); reading rejects any other schema version.
void write_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile read_model(const std::filesystem::path& path);

// Ranked-list CSV `rank,video_id,score,label` (header + one row per item,
// ranks assigned 1..n in the given order).
void write_scores(const std::filesystem::path& path,
                  const std::vector<ScoredItem>& ranked);
std::vector<ScoredItem> read_scores(const std::filesystem::path& path);

// Weight-trace CSV `iteration,k,theta_k`: T rows per trace entry.
void write_weights_csv(const std::filesystem::path& path,
                       const std::vector<TraceEntry>& trace);

// Loads every entry of the chosen split that carries a label for the
// event, reading the referenced (already preprocessed) feature files.
LabeledDataset load_dataset(const std::filesystem::path& manifest_path,
                            const std::string& event_id,
                            const std::string& split);

}  // namespace framepool
