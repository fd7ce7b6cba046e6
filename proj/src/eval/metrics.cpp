#include "stvsa/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace stvsa::eval {

ConfusionCounts confusion_matrix(const std::vector<int> &truth,
                                 const std::vector<int> &predicted) {
  if (truth.size() != predicted.size())
    fail("shape", "truth and prediction lengths differ");
  if (truth.empty()) fail("data", "empty label sequences");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      fail("data", "confusion_matrix labels must be binary");
    if (t == 1)
      p == 1 ? ++c.tp : ++c.fn;
    else
      p == 1 ? ++c.fp : ++c.tn;
  }
  return c;
}

ScalarMetrics scalar_metrics(const ConfusionCounts &c) {
  if (c.total() <= 0) fail("data", "scalar_metrics requires counts");
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  ScalarMetrics m;
  m.accuracy = (tp + tn) / (tp + fp + fn + tn);
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
           ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
           : 0.0;
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  m.mcc = denom > 0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
  m.misdetection_rate = fp + tn > 0 ? fp / (fp + tn) : 0.0;
  m.false_alarm_rate = tp + fn > 0 ? fn / (tp + fn) : 0.0;
  return m;
}

RocResult roc_auc(const std::vector<double> &stable_scores,
                  const std::vector<int> &truth) {
  if (stable_scores.size() != truth.size())
    fail("shape", "score and label lengths differ");
  long pos = 0, neg = 0;
  for (int t : truth) t == 1 ? ++pos : ++neg;
  if (pos == 0 || neg == 0)
    fail("data", "roc_auc requires both classes in the truth labels");

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return stable_scores[a] > stable_scores[b];
  });

  RocResult out;
  out.points.push_back({0.0, 0.0});
  long tp = 0, fp = 0;
  double auc = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    // Consume the whole tie group at this threshold.
    const double threshold = stable_scores[order[i]];
    while (i < order.size() && stable_scores[order[i]] == threshold) {
      truth[order[i]] == 1 ? ++tp : ++fp;
      ++i;
    }
    const double tpr = static_cast<double>(tp) / pos;
    const double fpr = static_cast<double>(fp) / neg;
    auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
    out.points.push_back({fpr, tpr});
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  out.auc = auc;
  return out;
}

std::string report_to_json(const EvalReport &report) {
  nlohmann::json j;
  j["counts"] = {{"tp", report.counts.tp},
                 {"fp", report.counts.fp},
                 {"tn", report.counts.tn},
                 {"fn", report.counts.fn}};
  j["accuracy"] = report.metrics.accuracy;
  j["precision"] = report.metrics.precision;
  j["recall"] = report.metrics.recall;
  j["f1"] = report.metrics.f1;
  j["mcc"] = report.metrics.mcc;
  j["misdetection_rate"] = report.metrics.misdetection_rate;
  j["false_alarm_rate"] = report.metrics.false_alarm_rate;
  if (report.roc) j["auc"] = report.roc->auc;
  j["mean_latency_ms"] = report.mean_latency_ms;
  j["evaluated"] = report.evaluated;
  return j.dump(2);
}

void write_roc_csv(const std::string &path, const RocResult &roc) {
  std::ofstream f(path);
  if (!f) fail("io", "cannot open '" + path + "' for writing");
  f << "fpr,tpr\n";
  for (const RocPoint &p : roc.points) f << p.fpr << ',' << p.tpr << '\n';
  if (!f) fail("io", "write failed for '" + path + "'");
}

} // namespace stvsa::eval
