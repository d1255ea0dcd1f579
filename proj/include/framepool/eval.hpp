#pragma once

#include <map>
#include <string>
#include <vector>

#include "framepool/core.hpp"
#include "framepool/trainer.hpp"

namespace framepool {

// One row of a ranked list: a video, its decision score, and its label.
struct ScoredItem {
  std::string video_id;
  double score = 0.0;
  int label = 0;  // +1 or -1
};

struct EvaluationReport {
  double ap = 0.0;
  std::vector<ScoredItem> ranked;  // score descending, video_id ascending
};

// Canonical ranking order: score descending, ties broken by ascending
// video_id so equal-score lists still rank deterministically.
void sort_ranked(std::vector<ScoredItem>& items);

// Non-interpolated average precision: sort by score descending (ties
// broken by ascending video_id), then average the precision values seen
// at each positive rank. Requires at least one positive item.
double average_precision(std::vector<ScoredItem> items);

// Arithmetic mean of per-event AP values; the map must be non-empty.
double mean_ap(const std::map<std::string, double>& per_event);

// Scores every test item with the trained model and computes AP.
EvaluationReport evaluate_model(const TrainedModel& model,
                                const LabeledDataset& test);

}  // namespace framepool
