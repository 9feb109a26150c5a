#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tripforge {

/// Undefined ratios (zero denominators) are nullopt rather than zero.
struct ClassificationReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0;
  std::optional<double> precision, recall, f1;

  std::size_t n() const { return tp + fp + tn + fn; }
};

/// Labels are compared against 1 (positive) and 0 (negative). Throws
/// std::invalid_argument on length mismatch or empty input.
template <typename Label>
ClassificationReport classification_metrics(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("classification_metrics: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("classification_metrics: empty input");
  ClassificationReport r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label(1);
    const bool t = truth[i] == Label(1);
    if (p && t) ++r.tp;
    else if (p) ++r.fp;
    else if (t) ++r.fn;
    else ++r.tn;
  }
  const auto n = static_cast<double>(r.n());
  r.accuracy = static_cast<double>(r.tp + r.tn) / n;
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  if (r.precision && r.recall) {
    const double s = *r.precision + *r.recall;
    if (s > 0) r.f1 = 2.0 * *r.precision * *r.recall / s;
  }
  return r;
}

struct RegressionReport {
  double mae = 0;           // in the unit of the inputs
  std::optional<double> r2;  // nullopt for constant truth or n < 2
};

template <typename Scalar>
RegressionReport regression_metrics(std::span<const Scalar> predicted, std::span<const Scalar> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("regression_metrics: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("regression_metrics: empty input");
  const auto n = predicted.size();
  double abs_sum = 0, mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    abs_sum += std::abs(static_cast<double>(predicted[i]) - static_cast<double>(truth[i]));
    mean += static_cast<double>(truth[i]);
  }
  mean /= static_cast<double>(n);
  RegressionReport r;
  r.mae = abs_sum / static_cast<double>(n);
  if (n < 2) return r;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = static_cast<double>(predicted[i]) - static_cast<double>(truth[i]);
    const double d = static_cast<double>(truth[i]) - mean;
    ss_res += e * e;
    ss_tot += d * d;
  }
  if (ss_tot > 0) r.r2 = 1.0 - ss_res / ss_tot;
  return r;
}

inline nlohmann::json to_json(const ClassificationReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"accuracy", r.accuracy}, {"precision", opt(r.precision)}, {"recall", opt(r.recall)},
          {"f1", opt(r.f1)},        {"tp", r.tp},                    {"fp", r.fp},
          {"tn", r.tn},             {"fn", r.fn}};
}

/// MAE is written under "mae_minutes": callers pass minutes.
inline nlohmann::json to_json(const RegressionReport& r) {
  return {{"mae_minutes", r.mae}, {"r2", r.r2 ? nlohmann::json(*r.r2) : nlohmann::json(nullptr)}};
}

}  // namespace tripforge
