// Copyright 2026 The dlab authors
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

#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "dlab/qcore.hpp"

namespace dlab::metrics {

using qcore::DensityOp;
using qcore::KrausChannel;
using qcore::PureState;

namespace detail {

/// 1/2 * sum of |eigenvalues| of the Hermitian difference a - b.
inline double trace_distance_raw(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Hermitian square root with eigenvalues clamped at 0 from below.
inline Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  RVec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// (tr sqrt(sqrt(a) b sqrt(a)))^2.
inline double fidelity_raw(const Mat& a, const Mat& b) {
  Mat ra = psd_sqrt(a);
  Eigen::SelfAdjointEigenSolver<Mat> es(ra * b * ra, Eigen::EigenvaluesOnly);
  double t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return t * t;
}

}  // namespace detail

inline double trace_distance(const DensityOp& rho, const DensityOp& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  return detail::trace_distance_raw(rho.matrix(), sigma.matrix());
}

inline double fidelity(const DensityOp& rho, const DensityOp& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("fidelity: dimension mismatch");
  return detail::fidelity_raw(rho.matrix(), sigma.matrix());
}

/// Trace distance and fidelity of a pair, together with the two-sided
/// bounds 1 - sqrt(F) <= T <= sqrt(1 - F) relating them.
struct MetricReport {
  double trace_distance;
  double fidelity;
  double fg_lower;
  double fg_upper;
};

inline MetricReport metric_report(const DensityOp& rho, const DensityOp& sigma) {
  double t = trace_distance(rho, sigma);
  double f = fidelity(rho, sigma);
  return MetricReport{t, f, 1.0 - std::sqrt(std::max(0.0, f)),
                      std::sqrt(std::max(0.0, 1.0 - f))};
}

/// Eigendecomposition purification on C^d (x) C^d; the partial trace over
/// the second factor recovers the input.
inline PureState purify(const DensityOp& rho) {
  int d = rho.dim();
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
  Vec v = Vec::Zero(long(d) * d);
  for (int k = 0; k < d; ++k) {
    double lam = std::max(0.0, es.eigenvalues()[k]);
    if (lam < 1e-300) continue;
    for (int i = 0; i < d; ++i)
      v[long(i) * d + k] = std::sqrt(lam) * es.eigenvectors()(i, k);
  }
  return PureState::normalized(v);
}

/// Distinguishability slacks under a channel: both are nonnegative for any
/// CPTP map (trace distance contracts, fidelity grows).
inline std::pair<double, double> check_monotonicity(const DensityOp& rho,
                                                    const DensityOp& sigma,
                                                    const KrausChannel& ch) {
  DensityOp r2 = qcore::apply_channel(ch, rho);
  DensityOp s2 = qcore::apply_channel(ch, sigma);
  double slack_t = trace_distance(rho, sigma) - trace_distance(r2, s2);
  double slack_f = fidelity(r2, s2) - fidelity(rho, sigma);
  return {slack_t, slack_f};
}

}  // namespace dlab::metrics
