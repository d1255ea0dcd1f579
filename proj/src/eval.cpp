#include "framepool/eval.hpp"

#include <algorithm>
#include <cmath>

#include "framepool/pooling.hpp"

namespace framepool {

void sort_ranked(std::vector<ScoredItem>& items) {
  std::sort(items.begin(), items.end(),
            [](const ScoredItem& a, const ScoredItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.video_id < b.video_id;
            });
}

double average_precision(std::vector<ScoredItem> items) {
  if (items.empty()) {
    throw ValidationError("average precision of an empty list is undefined");
  }
  int positives = 0;
  for (const auto& item : items) {
    if (!std::isfinite(item.score)) {
      throw ValidationError("non-finite score for video '" + item.video_id +
                            "'");
    }
    if (item.label != 1 && item.label != -1) {
      throw ValidationError("label for video '" + item.video_id +
                            "' must be +1 or -1");
    }
    if (item.label == 1) ++positives;
  }
  if (positives == 0) {
    throw ValidationError(
        "average precision is undefined without positive items");
  }

  sort_ranked(items);
  double sum_precision = 0.0;
  int seen_positives = 0;
  for (std::size_t r = 0; r < items.size(); ++r) {
    if (items[r].label == 1) {
      ++seen_positives;
      sum_precision += static_cast<double>(seen_positives) /
                       static_cast<double>(r + 1);
    }
  }
  return sum_precision / static_cast<double>(positives);
}

double mean_ap(const std::map<std::string, double>& per_event) {
  if (per_event.empty()) {
    throw ValidationError("mean AP over an empty event map is undefined");
  }
  double sum = 0.0;
  for (const auto& [event_id, ap] : per_event) {
    if (!std::isfinite(ap)) {
      throw ValidationError("non-finite AP for event '" + event_id + "'");
    }
    sum += ap;
  }
  return sum / static_cast<double>(per_event.size());
}

EvaluationReport evaluate_model(const TrainedModel& model,
                                const LabeledDataset& test) {
  validate_dataset(test, /*for_training=*/false);
  validate_weights(model.theta, test.column_count());

  EvaluationReport report;
  report.ranked.reserve(test.size());
  for (const auto& item : test.items) {
    ScoredItem scored;
    scored.video_id = item.features.video_id;
    scored.score = decision_score(model.model, model.theta, item.features);
    scored.label = item.label;
    report.ranked.push_back(std::move(scored));
  }
  report.ap = average_precision(report.ranked);
  sort_ranked(report.ranked);
  return report;
}

}  // namespace framepool
