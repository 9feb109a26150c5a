#pragma once

// Least squares with an L1 penalty,
//
//   minimize  sum_i (b . x_i + b0 - t_i)^2 + alpha * |b|_1
//
// with no 1/(2n) factor, so useful alpha values grow with n. Features are
// standardized internally (population sd) and the penalty applies to the
// standardized coefficients. Coordinate descent runs on the Gram matrix of the
// standardized design, so each sweep costs O(k^2) regardless of n.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace tripforge {

template <typename Scalar>
Scalar soft_threshold(Scalar z, Scalar a) {
  if (z > a) return z - a;
  if (z < -a) return z + a;
  return Scalar(0);
}

struct LassoConfig {
  double alpha = 0.0;
  int max_iterations = 10000;
  double tolerance = 1e-10;  // on max |change| of a standardized coefficient per sweep

  void validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("lasso: alpha must be >= 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("lasso: tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("lasso: max_iterations must be >= 1");
  }
};

template <typename Scalar>
struct LassoModel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector coefficients;  // original feature scale
  Scalar intercept = 0;
  Scalar alpha = 0;
  Vector feature_mean;
  Vector feature_scale;  // 0 for constant features
  Vector standardized_coefficients;
  Scalar target_mean = 0;
  bool converged = false;
  int n_iterations = 0;

  template <typename Derived>
  Scalar predict(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != coefficients.size())
      throw std::invalid_argument("lasso: feature dimension mismatch");
    return coefficients.dot(x.template cast<Scalar>()) + intercept;
  }

  /// Same prediction through the internal standardized parameterization.
  template <typename Derived>
  Scalar predict_standardized(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != coefficients.size())
      throw std::invalid_argument("lasso: feature dimension mismatch");
    Scalar acc = target_mean;
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (feature_scale(j) > 0) acc += standardized_coefficients(j) * (x(j) - feature_mean(j)) / feature_scale(j);
    return acc;
  }

  template <typename Derived>
  Vector predict_rows(const Eigen::MatrixBase<Derived>& x) const {
    if (x.cols() != coefficients.size()) throw std::invalid_argument("lasso: feature dimension mismatch");
    return (x.template cast<Scalar>() * coefficients).array() + intercept;
  }

  Eigen::Index nonzero_count() const {
    return (coefficients.array() != Scalar(0)).count();
  }
};

/// Standardized, centered problem shared by fit and the regularization path.
template <typename Scalar>
struct LassoProblem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector mean, scale;
  Scalar target_mean = 0;
  Matrix gram;       // X~' X~
  Vector xty;        // X~' y~
  Scalar yty = 0;    // y~' y~

  template <typename DerivedX, typename DerivedY>
  LassoProblem(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
    const auto n = x.rows();
    if (n < 2) throw std::invalid_argument("lasso: need at least 2 examples");
    if (y.size() != n) throw std::invalid_argument("lasso: target count does not match rows");
    if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("lasso: non-finite input");
    const Matrix xs = x.template cast<Scalar>();
    const Vector ys = y.template cast<Scalar>();
    mean = xs.colwise().mean().transpose();
    Matrix centered = xs.rowwise() - mean.transpose();
    scale = (centered.colwise().squaredNorm() / Scalar(n)).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
      if (scale(j) <= Scalar(1e-12) * (Scalar(1) + std::abs(mean(j)))) {
        scale(j) = 0;
        centered.col(j).setZero();
      } else {
        centered.col(j) /= scale(j);
      }
    }
    target_mean = ys.mean();
    const Vector yc = ys.array() - target_mean;
    gram = centered.transpose() * centered;
    xty = centered.transpose() * yc;
    yty = yc.squaredNorm();
  }

  Eigen::Index dim() const { return xty.size(); }

  /// Smallest alpha at which every coefficient is zero: 2 max_j |x~_j' y~|.
  Scalar alpha_max() const { return dim() == 0 ? Scalar(0) : Scalar(2) * xty.cwiseAbs().maxCoeff(); }

  /// Objective at standardized coefficients b (the intercept is implicit).
  Scalar objective(const Vector& b, Scalar alpha) const {
    return yty - Scalar(2) * b.dot(xty) + b.dot(gram * b) + alpha * b.template lpNorm<1>();
  }
};

template <typename Scalar>
LassoModel<Scalar> solve_lasso(const LassoProblem<Scalar>& prob, const LassoConfig& config,
                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* warm_start = nullptr,
                               std::vector<Scalar>* objective_trace = nullptr) {
  config.validate();
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto k = prob.dim();
  const Scalar alpha = static_cast<Scalar>(config.alpha);
  const Scalar half_alpha = alpha / Scalar(2);
  Vector b = warm_start ? *warm_start : Vector::Zero(k);
  for (Eigen::Index j = 0; j < k; ++j)
    if (prob.scale(j) == Scalar(0)) b(j) = 0;
  // grad_part = gram * b, maintained incrementally
  Vector gb = prob.gram * b;
  if (objective_trace) objective_trace->push_back(prob.objective(b, alpha));

  LassoModel<Scalar> m;
  m.alpha = alpha;
  for (int it = 1; it <= config.max_iterations; ++it) {
    Scalar max_delta = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const Scalar gjj = prob.gram(j, j);
      if (gjj <= Scalar(0)) continue;
      const Scalar z = prob.xty(j) - (gb(j) - gjj * b(j));
      const Scalar nb = soft_threshold(z, half_alpha) / gjj;
      const Scalar d = nb - b(j);
      if (d != Scalar(0)) {
        gb += prob.gram.col(j) * d;
        b(j) = nb;
        max_delta = std::max(max_delta, std::abs(d));
      }
    }
    if (objective_trace) objective_trace->push_back(prob.objective(b, alpha));
    m.n_iterations = it;
    if (max_delta < static_cast<Scalar>(config.tolerance)) {
      m.converged = true;
      break;
    }
  }

  m.standardized_coefficients = b;
  m.feature_mean = prob.mean;
  m.feature_scale = prob.scale;
  m.target_mean = prob.target_mean;
  m.coefficients = Vector::Zero(k);
  m.intercept = prob.target_mean;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (prob.scale(j) == Scalar(0)) continue;
    m.coefficients(j) = b(j) / prob.scale(j);
    m.intercept -= m.coefficients(j) * prob.mean(j);
  }
  return m;
}

/// Throws std::invalid_argument for fewer than 2 rows or non-finite input.
/// A fit that hits max_iterations is returned with converged == false.
template <typename DerivedX, typename DerivedY>
auto fit_lasso(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
               const LassoConfig& config) {
  using Scalar = typename DerivedX::Scalar;
  return solve_lasso(LassoProblem<Scalar>(x, y), config);
}

/// Warm-started fits along a descending list of alphas.
template <typename DerivedX, typename DerivedY>
auto regularization_path(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                         const std::vector<double>& alphas, LassoConfig base = {}) {
  using Scalar = typename DerivedX::Scalar;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0.0)) throw std::invalid_argument("lasso path: alphas must be >= 0");
    if (i > 0 && alphas[i] > alphas[i - 1]) throw std::invalid_argument("lasso path: alphas must be descending");
  }
  const LassoProblem<Scalar> prob(x, y);
  std::vector<LassoModel<Scalar>> out;
  for (double a : alphas) {
    base.alpha = a;
    const auto* warm = out.empty() ? nullptr : &out.back().standardized_coefficients;
    out.push_back(solve_lasso(prob, base, warm));
  }
  return out;
}

template <typename Scalar>
nlohmann::json to_json(const LassoModel<Scalar>& m) {
  auto vec = [](const auto& v) {
    std::vector<Scalar> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
  };
  return {{"model", "lasso"},
          {"alpha", m.alpha},
          {"coefficients", vec(m.coefficients)},
          {"intercept", m.intercept},
          {"converged", m.converged},
          {"n_iterations", m.n_iterations},
          {"feature_mean", vec(m.feature_mean)},
          {"feature_scale", vec(m.feature_scale)},
          {"standardized_coefficients", vec(m.standardized_coefficients)},
          {"target_mean", m.target_mean}};
}

template <typename Scalar>
LassoModel<Scalar> lasso_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<Scalar>>();
    return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(
        Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  LassoModel<Scalar> m;
  m.alpha = j.at("alpha").get<Scalar>();
  m.coefficients = vec(j.at("coefficients"));
  m.intercept = j.at("intercept").get<Scalar>();
  m.converged = j.at("converged").get<bool>();
  m.n_iterations = j.at("n_iterations").get<int>();
  m.feature_mean = j.contains("feature_mean") ? vec(j["feature_mean"]) : decltype(m.coefficients)::Zero(m.coefficients.size());
  m.feature_scale = j.contains("feature_scale") ? vec(j["feature_scale"]) : decltype(m.coefficients)::Zero(m.coefficients.size());
  m.standardized_coefficients = j.contains("standardized_coefficients")
                                    ? vec(j["standardized_coefficients"])
                                    : decltype(m.coefficients)::Zero(m.coefficients.size());
  m.target_mean = j.value("target_mean", m.intercept);
  return m;
}

}  // namespace tripforge
