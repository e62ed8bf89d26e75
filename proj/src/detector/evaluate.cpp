#include <cmath>
#include <algorithm>
#include <numeric>
#include <set>

#include "clickguard/detector.hpp"

namespace clickguard::detector {

std::string_view to_string(Label l) { return l == Label::Fraud ? "fraud" : "benign"; }

Label label_for(double error, double threshold) {
  return error > threshold ? Label::Fraud : Label::Benign;
}

Verdict classify(const VaeModel& model, std::span<const double> weighted) {
  if (!model.threshold) throw ModelError("model threshold is not calibrated");
  Verdict v;
  v.error = score(model, weighted);
  v.threshold = *model.threshold;
  v.label = label_for(v.error, v.threshold);
  return v;
}

AppVerdict aggregate_app_verdict(std::span<const Verdict> sites) {
  AppVerdict app;
  std::set<std::string> locations;
  for (const auto& s : sites)
    if (s.label == Label::Fraud) {
      app.label = Label::Fraud;
      locations.insert(s.location);
    }
  app.fraud_locations.assign(locations.begin(), locations.end());
  return app;
}

RocResult sweep_roc(std::span<const double> scores, const std::vector<bool>& is_fraud) {
  if (scores.size() != is_fraud.size())
    throw std::invalid_argument("sweep_roc: scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(
      std::count(is_fraud.begin(), is_fraud.end(), true));
  const auto neg = scores.size() - pos;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("sweep_roc: labeled set must contain both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return scores[a] > scores[b]; });

  RocResult roc;
  roc.points.push_back({scores[order.front()], 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  double auc = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::size_t dtp = 0, dfp = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i)
      (is_fraud[order[i]] ? dtp : dfp)++;
    // Trapezoid over the tie block counts tied pairs as one half.
    auc += static_cast<double>(dfp) * (static_cast<double>(tp) + 0.5 * static_cast<double>(dtp));
    tp += dtp;
    fp += dfp;
    const double next = i < order.size() ? scores[order[i]] : s - std::max(1.0, std::abs(s));
    const double t = i < order.size() ? 0.5 * (s + next) : (s > 0 ? 0.5 * s : next);
    roc.points.push_back({t, static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
  }
  roc.auc = auc / (static_cast<double>(pos) * static_cast<double>(neg));

  roc.best_j = -1.0;
  for (const auto& p : roc.points) {
    const double j = p.tpr - p.fpr;
    if (j > roc.best_j) {
      roc.best_j = j;
      roc.best_threshold = p.threshold;
    }
  }
  return roc;
}

namespace {

Metrics finish(Metrics m) {
  m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.f_score = m.precision + m.recall > 0
                  ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                  : 0.0;
  return m;
}

}  // namespace

Metrics confusion(std::span<const Label> predicted, const std::vector<bool>& is_fraud) {
  if (predicted.size() != is_fraud.size())
    throw std::invalid_argument("confusion: length mismatch");
  Metrics m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::Fraud;
    if (p && is_fraud[i]) ++m.tp;
    else if (p) ++m.fp;
    else if (is_fraud[i]) ++m.fn;
    else ++m.tn;
  }
  return finish(m);
}

Metrics confusion(std::span<const double> scores, const std::vector<bool>& is_fraud,
                  double threshold) {
  std::vector<Label> predicted;
  predicted.reserve(scores.size());
  for (double s : scores) predicted.push_back(label_for(s, threshold));
  return confusion(predicted, is_fraud);
}

double best_f_score(std::span<const double> scores, const std::vector<bool>& is_fraud) {
  const auto roc = sweep_roc(scores, is_fraud);
  double best = 0.0;
  for (const auto& p : roc.points)
    best = std::max(best, confusion(scores, is_fraud, p.threshold).f_score);
  return best;
}

}  // namespace clickguard::detector
