#include "framepool/store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

namespace framepool {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shortest representation that parses back to the identical double.
std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view cell, const fs::path& path,
                    std::size_t line_number) {
  double value = 0.0;
  const auto result =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (result.ec != std::errc() || result.ptr != cell.data() + cell.size()) {
    throw ParseError(path.string() + " line " + std::to_string(line_number) +
                     ": cell '" + std::string(cell) + "' is not a number");
  }
  return value;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::ifstream open_for_reading(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_for_writing(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  std::vector<double> values(v.data(), v.data() + v.size());
  return json(values);
}

Eigen::VectorXd vector_from_json(const json& array) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(array.size()));
  Eigen::Index i = 0;
  for (const auto& x : array) v[i++] = x.get<double>();
  return v;
}

json config_to_json(const TrainerConfig& config) {
  json j;
  j["C"] = config.C;
  j["N"] = config.N;
  j["T"] = static_cast<std::int64_t>(config.T);
  j["early_stop_tol"] = config.early_stop_tol;
  j["seed"] = config.seed;
  j["svm"]["C"] = config.svm.C;
  j["svm"]["max_passes"] = config.svm.max_passes;
  j["svm"]["standardize"] = config.svm.standardize;
  j["svm"]["tolerance"] = config.svm.tolerance;
  return j;
}

TrainerConfig config_from_json(const json& j) {
  TrainerConfig config;
  config.C = j.at("C").get<double>();
  config.N = j.at("N").get<int>();
  config.T = j.at("T").get<std::int64_t>();
  config.early_stop_tol = j.at("early_stop_tol").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  const json& svm = j.at("svm");
  config.svm.C = svm.at("C").get<double>();
  config.svm.max_passes = svm.at("max_passes").get<int>();
  config.svm.standardize = svm.at("standardize").get<bool>();
  config.svm.tolerance = svm.at("tolerance").get<double>();
  return config;
}

}  // namespace

std::vector<std::string> Manifest::event_ids() const {
  std::set<std::string> ids;
  for (const auto& entry : entries) {
    for (const auto& [event_id, label] : entry.labels) ids.insert(event_id);
  }
  return std::vector<std::string>(ids.begin(), ids.end());
}

FrameFeatureSequence read_video_features(const fs::path& path) {
  std::ifstream in = open_for_reading(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      row.push_back(parse_double(cell, path, line_number));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path.string() + " line " +
                       std::to_string(line_number) + ": row has " +
                       std::to_string(row.size()) + " cells, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError(path.string() + ": no feature rows");
  }

  FrameFeatureSequence seq;
  seq.video_id = path.stem().string();
  const Eigen::Index frames = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index m = static_cast<Eigen::Index>(rows.front().size());
  seq.values.resize(m, frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (Eigen::Index j = 0; j < m; ++j) {
      seq.values(j, t) = rows[static_cast<std::size_t>(t)]
                             [static_cast<std::size_t>(j)];
    }
  }
  validate_sequence(seq);
  return seq;
}

void write_video_features(const fs::path& path,
                          const FrameFeatureSequence& seq) {
  validate_sequence(seq);
  std::ofstream out = open_for_writing(path);
  for (Eigen::Index t = 0; t < seq.frame_count(); ++t) {
    for (Eigen::Index j = 0; j < seq.feature_dim(); ++j) {
      if (j > 0) out << ',';
      out << format_double(seq.values(j, t));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in = open_for_reading(path);
  const fs::path base = path.parent_path();
  Manifest manifest;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where =
        path.string() + " line " + std::to_string(line_number);

    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(where + ": entry is not an object");
    for (const char* field : {"video_id", "path", "labels", "split"}) {
      if (!j.contains(field)) {
        throw ParseError(where + ": missing field '" + field + "'");
      }
    }

    ManifestEntry entry;
    try {
      entry.video_id = j.at("video_id").get<std::string>();
      entry.path = j.at("path").get<std::string>();
      entry.split = j.at("split").get<std::string>();
      for (const auto& [event_id, label] : j.at("labels").items()) {
        const std::string value = label.get<std::string>();
        if (value == "pos") {
          entry.labels[event_id] = 1;
        } else if (value == "neg") {
          entry.labels[event_id] = -1;
        } else {
          throw ParseError(where + ": label for event '" + event_id +
                           "' must be \"pos\" or \"neg\", got \"" + value +
                           "\"");
        }
      }
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }

    if (entry.split != "train" && entry.split != "test") {
      throw ParseError(where + ": split must be \"train\" or \"test\", got \"" +
                       entry.split + "\"");
    }
    if (!seen_ids.insert(entry.video_id).second) {
      throw ParseError(where + ": duplicate video_id '" + entry.video_id +
                       "'");
    }
    if (!fs::exists(base / entry.path)) {
      throw ValidationError(where + ": feature file '" + entry.path +
                            "' does not exist");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  std::ofstream out = open_for_writing(path);
  for (const auto& entry : manifest.entries) {
    json labels = json::object();
    for (const auto& [event_id, label] : entry.labels) {
      labels[event_id] = label > 0 ? "pos" : "neg";
    }
    json j;
    j["labels"] = std::move(labels);
    j["path"] = entry.path;
    j["split"] = entry.split;
    j["video_id"] = entry.video_id;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_model(const fs::path& path, const ModelFile& file) {
  json j;
  j["schema_version"] = file.schema_version;
  j["event_id"] = file.model.event_id;
  j["w"] = vector_to_json(file.model.model.w);
  j["b"] = file.model.model.b;
  j["theta"] = vector_to_json(file.model.theta.theta);
  j["objective"] = file.model.objective;
  j["config"] = config_to_json(file.config);
  j["trace"] = json::array();
  for (const auto& entry : file.model.trace) {
    json t;
    t["iteration"] = entry.iteration;
    t["theta"] = vector_to_json(entry.theta.theta);
    t["objective_svm"] = entry.objective_svm;
    if (entry.objective_lp) t["objective_lp"] = *entry.objective_lp;
    j["trace"].push_back(std::move(t));
  }

  std::ofstream out = open_for_writing(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ModelFile read_model(const fs::path& path) {
  std::ifstream in = open_for_reading(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  if (!j.contains("schema_version")) {
    throw ParseError(path.string() + ": missing field 'schema_version'");
  }
  const int version = j.at("schema_version").get<int>();
  if (version != kModelSchemaVersion) {
    throw ParseError(path.string() + ": model schema version " +
                     std::to_string(version) + ", this reader supports " +
                     std::to_string(kModelSchemaVersion));
  }

  ModelFile file;
  file.schema_version = version;
  try {
    file.model.event_id = j.at("event_id").get<std::string>();
    file.model.model.w = vector_from_json(j.at("w"));
    file.model.model.b = j.at("b").get<double>();
    file.model.theta.theta = vector_from_json(j.at("theta"));
    file.model.objective = j.at("objective").get<double>();
    file.config = config_from_json(j.at("config"));
    for (const auto& t : j.at("trace")) {
      TraceEntry entry;
      entry.iteration = t.at("iteration").get<int>();
      entry.theta.theta = vector_from_json(t.at("theta"));
      entry.objective_svm = t.at("objective_svm").get<double>();
      if (t.contains("objective_lp")) {
        entry.objective_lp = t.at("objective_lp").get<double>();
      }
      file.model.trace.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return file;
}

void write_scores(const fs::path& path,
                  const std::vector<ScoredItem>& ranked) {
  std::ofstream out = open_for_writing(path);
  out << "rank,video_id,score,label\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out << (i + 1) << ',' << ranked[i].video_id << ','
        << format_double(ranked[i].score) << ',' << ranked[i].label << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<ScoredItem> read_scores(const fs::path& path) {
  std::ifstream in = open_for_reading(path);
  std::string line;
  if (!std::getline(in, line) || line != "rank,video_id,score,label") {
    throw ParseError(path.string() +
                     ": expected header 'rank,video_id,score,label'");
  }
  std::vector<ScoredItem> items;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != 4) {
      throw ParseError(path.string() + " line " + std::to_string(line_number) +
                       ": expected 4 cells, got " +
                       std::to_string(cells.size()));
    }
    ScoredItem item;
    item.video_id = std::string(cells[1]);
    item.score = parse_double(cells[2], path, line_number);
    const double label = parse_double(cells[3], path, line_number);
    if (label != 1.0 && label != -1.0) {
      throw ParseError(path.string() + " line " + std::to_string(line_number) +
                       ": label must be 1 or -1");
    }
    item.label = static_cast<int>(label);
    items.push_back(std::move(item));
  }
  return items;
}

void write_weights_csv(const fs::path& path,
                       const std::vector<TraceEntry>& trace) {
  std::ofstream out = open_for_writing(path);
  out << "iteration,k,theta_k\n";
  for (const auto& entry : trace) {
    for (Eigen::Index k = 0; k < entry.theta.theta.size(); ++k) {
      out << entry.iteration << ',' << (k + 1) << ','
          << format_double(entry.theta.theta[k]) << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

LabeledDataset load_dataset(const fs::path& manifest_path,
                            const std::string& event_id,
                            const std::string& split) {
  const Manifest manifest = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();

  LabeledDataset dataset;
  dataset.event_id = event_id;
  for (const auto& entry : manifest.entries) {
    if (entry.split != split) continue;
    const auto label = entry.labels.find(event_id);
    if (label == entry.labels.end()) continue;

    FrameFeatureSequence seq = read_video_features(base / entry.path);
    LabeledItem item;
    item.features.video_id = entry.video_id;
    item.features.X = std::move(seq.values);
    item.label = label->second;
    dataset.items.push_back(std::move(item));
  }
  if (dataset.empty()) {
    throw ValidationError("manifest has no '" + split +
                          "' entries labeled for event '" + event_id + "'");
  }
  validate_dataset(dataset, /*for_training=*/false);
  return dataset;
}

}  // namespace framepool
