#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stvsa/error.hpp"

namespace stvsa::eval {

/// Binary confusion counts with "stable" as the positive class.
struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion_matrix(const std::vector<int> &truth,
                                 const std::vector<int> &predicted);

struct ScalarMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double misdetection_rate = 0.0; // unstable predicted stable / unstable total
  double false_alarm_rate = 0.0;  // stable predicted unstable / stable total
};

/// Standard formulas; zero denominators yield 0 by convention.
ScalarMetrics scalar_metrics(const ConfusionCounts &counts);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  std::vector<RocPoint> points; // from (0,0) to (1,1), both monotone
  double auc = 0.0;
};

/// ROC sweep over the distinct score values (ties grouped into a single
/// threshold step) with trapezoidal AUC. Requires both classes present.
RocResult roc_auc(const std::vector<double> &stable_scores,
                  const std::vector<int> &truth);

struct EvalReport {
  ConfusionCounts counts;
  ScalarMetrics metrics;
  std::optional<RocResult> roc;
  double mean_latency_ms = 0.0;
  std::size_t evaluated = 0;
};

std::string report_to_json(const EvalReport &report);
void write_roc_csv(const std::string &path, const RocResult &roc);

} // namespace stvsa::eval
