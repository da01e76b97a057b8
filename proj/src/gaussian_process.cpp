// Copyright 2026 The ionlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ionlearn/gaussian_process.hpp"

#include <cmath>

namespace ionlearn {

GaussianProcess::GaussianProcess(Eigen::MatrixXd points, Eigen::VectorXd values, Eigen::VectorXd length_scales,
                                 double signal_variance, double jitter)
    : points_(std::move(points)),
      inv_length_(length_scales.cwiseInverse()),
      signal_variance_(signal_variance),
      jitter_(jitter) {
  Eigen::MatrixXd gram = cross_kernel(points_);
  gram.diagonal().array() += jitter_;
  chol_.compute(gram);
  if (chol_.info() != Eigen::Success) return;
  const Eigen::VectorXd diag = chol_.matrixLLT().diagonal();
  if (!diag.allFinite() || diag.minCoeff() <= 0.0) return;
  alpha_ = chol_.solve(values);
  ok_ = alpha_.allFinite();
}

Eigen::MatrixXd GaussianProcess::cross_kernel(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd a = inv_length_.asDiagonal() * points_;
  const Eigen::MatrixXd b = inv_length_.asDiagonal() * x;
  const Eigen::VectorXd an = a.colwise().squaredNorm().transpose();
  const Eigen::RowVectorXd bn = b.colwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * a.transpose() * b).colwise() + an;
  d2.rowwise() += bn;
  return signal_variance_ * (-0.5 * d2.array().max(0.0)).exp().matrix();
}

void GaussianProcess::predict(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& sd) const {
  const Eigen::MatrixXd ks = cross_kernel(x);
  mean = ks.transpose() * alpha_;
  const Eigen::MatrixXd v = chol_.matrixL().solve(ks);
  const Eigen::VectorXd var = (signal_variance_ - v.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
  sd = var.array().sqrt().matrix();
}

}  // namespace ionlearn
