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

#ifndef IONLEARN_GAUSSIAN_PROCESS_HPP
#define IONLEARN_GAUSSIAN_PROCESS_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <vector>

namespace ionlearn {

/// Zero-mean GP regressor with a squared-exponential kernel
///
///     k(a, b) = s2 * exp(-0.5 * sum_d ((a_d - b_d) / l_d)^2)
///
/// and a diagonal jitter added to the Gram matrix. Observations are used as
/// given; the optimizer standardizes them first.
class GaussianProcess {
 public:
  /// `points` is d x n (one column per observation). Returns false from
  /// ok() when the Cholesky factorization fails.
  GaussianProcess(Eigen::MatrixXd points, Eigen::VectorXd values, Eigen::VectorXd length_scales,
                  double signal_variance, double jitter);

  bool ok() const noexcept { return ok_; }
  double jitter() const noexcept { return jitter_; }

  /// Posterior mean and standard deviation at each column of `x` (d x m).
  void predict(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& sd) const;

 private:
  Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& x) const;

  Eigen::MatrixXd points_;
  Eigen::VectorXd inv_length_;
  double signal_variance_;
  double jitter_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  bool ok_ = false;
};

}  // namespace ionlearn

#endif  // IONLEARN_GAUSSIAN_PROCESS_HPP
