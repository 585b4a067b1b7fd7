// Copyright 2026 The Synthmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "synthmark/error.hpp"

namespace synthmark::models {

// Binary logistic regression with an L2 penalty on the slopes (not the
// intercept), fitted by damped Newton steps.
class L2Logistic {
 public:
  explicit L2Logistic(double lambda = 1e-4, int max_iter = 50)
      : lambda_(lambda), max_iter_(max_iter) {}

  // Minimizes mean log-loss + lambda/2 * |w|^2. X is n x p without an
  // intercept column; y holds 0/1 labels.
  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;
    beta_ = Eigen::VectorXd::Zero(p + 1);
    const double prior = std::clamp(y.mean(), 1e-12, 1 - 1e-12);
    beta_(0) = std::log(prior / (1 - prior));
    Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p + 1, lambda_);
    penalty(0) = 0;

    double previous = objective(design, y, penalty);
    for (int it = 0; it < max_iter_; ++it) {
      const Eigen::VectorXd prob = sigmoid(design * beta_);
      const Eigen::VectorXd grad =
          design.transpose() * (prob - y) / static_cast<double>(n) +
          penalty.cwiseProduct(beta_);
      const Eigen::VectorXd w = prob.cwiseProduct(
          (Eigen::VectorXd::Ones(n) - prob));
      Eigen::MatrixXd hessian =
          design.transpose() * w.asDiagonal() * design /
          static_cast<double>(n);
      hessian.diagonal() += penalty;
      hessian.diagonal().array() += 1e-10;
      const Eigen::VectorXd step = hessian.ldlt().solve(grad);
      double scale = 1.0;
      Eigen::VectorXd candidate = beta_ - step;
      double value = objective(design, y, penalty, candidate);
      while (value > previous && scale > 1e-6) {
        scale /= 2;
        candidate = beta_ - scale * step;
        value = objective(design, y, penalty, candidate);
      }
      if (value > previous) break;
      beta_ = candidate;
      const double gain = previous - value;
      previous = value;
      if (gain < 1e-12 || grad.lpNorm<Eigen::Infinity>() < 1e-9) break;
    }
  }

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd eta = x * beta_.tail(beta_.size() - 1);
    eta.array() += beta_(0);
    return sigmoid(eta);
  }

  const Eigen::VectorXd& coefficients() const { return beta_; }

 private:
  static Eigen::VectorXd sigmoid(const Eigen::VectorXd& eta) {
    return eta.unaryExpr([](double v) {
      return v >= 0 ? 1 / (1 + std::exp(-v)) : std::exp(v) / (1 + std::exp(v));
    });
  }

  double objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& penalty) const {
    return objective(design, y, penalty, beta_);
  }
  static double objective(const Eigen::MatrixXd& design,
                          const Eigen::VectorXd& y,
                          const Eigen::VectorXd& penalty,
                          const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = design * beta;
    double loss = 0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      // log(1 + e^eta) - y * eta, evaluated stably.
      const double e = eta(i);
      const double softplus =
          e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
      loss += softplus - y(i) * e;
    }
    loss /= static_cast<double>(eta.size());
    return loss + 0.5 * (penalty.array() * beta.array().square()).sum();
  }

  double lambda_;
  int max_iter_;
  Eigen::VectorXd beta_;
};

// Multinomial logistic regression with an L1 penalty on the weights,
// fitted by proximal gradient descent (ISTA) with a fixed step 1/L. The
// penalty follows the C-parameterization: minimize
//   C * sum_i logloss_i + |W|_1,
// i.e. mean log-loss + |W|_1 / (C n). Intercepts are not penalized.
class L1Multinomial {
 public:
  L1Multinomial(double inverse_strength = 0.01, int max_iter = 100)
      : c_(inverse_strength), max_iter_(max_iter) {}

  // labels in 0..classes-1.
  void fit(const Eigen::MatrixXd& x, const std::vector<int>& labels,
           int classes) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n == 0) throw DegenerateInputError("L1Multinomial: no training rows");
    classes_ = classes;
    weights_ = Eigen::MatrixXd::Zero(p, classes);
    intercepts_ = Eigen::VectorXd::Zero(classes);
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, classes);
    for (Eigen::Index i = 0; i < n; ++i) {
      onehot(i, labels[static_cast<std::size_t>(i)]) = 1;
    }
    // Class priors as the starting intercepts.
    const Eigen::VectorXd freq = onehot.colwise().mean().transpose();
    for (int k = 0; k < classes; ++k) {
      intercepts_(k) = std::log(std::max(freq(k), 1e-12));
    }

    // The softmax log-loss Hessian is bounded by 1/2 * [X 1]^T [X 1] / n.
    Eigen::MatrixXd design(n, p + 1);
    design << x, Eigen::VectorXd::Ones(n);
    const Eigen::MatrixXd gram =
        design.transpose() * design / static_cast<double>(n);
    const double lipschitz =
        0.5 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                  gram, Eigen::EigenvaluesOnly)
                  .eigenvalues()
                  .maxCoeff();
    const double step = 1.0 / lipschitz;
    const double lambda = 1.0 / (c_ * static_cast<double>(n));

    for (int it = 0; it < max_iter_; ++it) {
      const Eigen::MatrixXd prob = softmax(x, weights_, intercepts_);
      const Eigen::MatrixXd resid = (prob - onehot) / static_cast<double>(n);
      const Eigen::MatrixXd grad_w = x.transpose() * resid;
      const Eigen::VectorXd grad_b = resid.colwise().sum().transpose();
      weights_ -= step * grad_w;
      intercepts_ -= step * grad_b;
      const double shrink = step * lambda;
      weights_ = weights_.unaryExpr([shrink](double w) {
        return w > shrink ? w - shrink : (w < -shrink ? w + shrink : 0.0);
      });
    }
  }

  std::vector<int> predict(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd logits = x * weights_;
    logits.rowwise() += intercepts_.transpose();
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Eigen::Index best = 0;
      logits.row(i).maxCoeff(&best);
      out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
  }

  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  static Eigen::MatrixXd softmax(const Eigen::MatrixXd& x,
                                 const Eigen::MatrixXd& w,
                                 const Eigen::VectorXd& b) {
    Eigen::MatrixXd logits = x * w;
    logits.rowwise() += b.transpose();
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      const double top = logits.row(i).maxCoeff();
      logits.row(i) = (logits.row(i).array() - top).exp();
      logits.row(i) /= logits.row(i).sum();
    }
    return logits;
  }

  double c_;
  int max_iter_;
  int classes_ = 0;
  Eigen::MatrixXd weights_;
  Eigen::VectorXd intercepts_;
};

}  // namespace synthmark::models
