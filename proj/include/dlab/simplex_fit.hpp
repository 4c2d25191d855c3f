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

#include <vector>

#include <Eigen/Dense>

#include "dlab/common.hpp"

namespace dlab::fit {

// Minimizes f(q) = || sum_i q_i A_i - T ||_tr over the probability simplex
// with pairwise Frank-Wolfe steps and exact (golden-section) line search.
// f is convex in q, so every iterate yields a valid upper bound on the
// minimum; only the gap to the optimum is heuristic.

/// Value of (1/2)||M||_1 together with the subgradient (1/2) sgn(M).
inline std::pair<double, Mat> trace_norm_half(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  double val = 0.5 * es.eigenvalues().cwiseAbs().sum();
  RVec sgn(es.eigenvalues().size());
  for (long i = 0; i < sgn.size(); ++i) {
    double lam = es.eigenvalues()[i];
    sgn[i] = lam > 0 ? 0.5 : (lam < 0 ? -0.5 : 0.0);
  }
  Mat sub = es.eigenvectors() * sgn.asDiagonal() * es.eigenvectors().adjoint();
  return {val, sub};
}

inline double trace_norm_half_value(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Exact line search for gamma in [0, hi] on the convex function
/// g(gamma) = (1/2)||M + gamma*D||_1.
inline std::pair<double, double> line_search_trace(const Mat& m, const Mat& d,
                                                   double hi) {
  auto g = [&](double t) { return trace_norm_half_value(m + t * d); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  while (b - a > 1e-12 * std::max(1.0, hi)) {
    if (g1 <= g2) {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - phi * (b - a);
      g1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + phi * (b - a);
      g2 = g(x2);
    }
  }
  double mid = 0.5 * (a + b), gm = g(mid);
  double g0 = g(0.0), ghi = g(hi);
  if (g0 <= gm && g0 <= ghi) return {0.0, g0};
  if (ghi <= gm) return {hi, ghi};
  return {mid, gm};
}

struct SimplexFitOptions {
  int max_iters = 500;
  double improvement_tol = 1e-8;
  double gap_tol = 1e-10;
};

struct SimplexFitResult {
  double dist = 0.0;
  RVec weights;
  bool converged = false;
  int iters = 0;
};

inline SimplexFitResult fit_simplex_mixture(const std::vector<Mat>& atoms,
                                            const Mat& target,
                                            SimplexFitOptions opts = {},
                                            const RVec* warm_start = nullptr) {
  const int n = static_cast<int>(atoms.size());
  if (n == 0) throw std::invalid_argument("no atoms to fit with");

  SimplexFitResult res;
  res.weights = RVec::Zero(n);
  if (warm_start && warm_start->size() == n && warm_start->minCoeff() >= 0.0 &&
      warm_start->sum() > 0.0) {
    res.weights = *warm_start / warm_start->sum();
  } else {
    // Start from the best single atom.
    int best = 0;
    double best_val = trace_norm_half_value(atoms[0] - target);
    for (int j = 1; j < n; ++j) {
      double v = trace_norm_half_value(atoms[j] - target);
      if (v < best_val) {
        best_val = v;
        best = j;
      }
    }
    res.weights[best] = 1.0;
  }

  Mat x = Mat::Zero(target.rows(), target.cols());
  for (int j = 0; j < n; ++j)
    if (res.weights[j] > 0.0) x += res.weights[j] * atoms[j];

  double f = trace_norm_half_value(x - target);
  for (int it = 0; it < opts.max_iters; ++it) {
    res.iters = it + 1;
    auto [val, sub] = trace_norm_half(x - target);
    f = val;

    int toward = 0, away = -1;
    double toward_score = 0.0, away_score = 0.0;
    for (int j = 0; j < n; ++j) {
      double s = (sub.conjugate().cwiseProduct(atoms[j])).sum().real();
      if (j == 0 || s < toward_score) {
        toward_score = s;
        toward = j;
      }
      if (res.weights[j] > 1e-14 && (away < 0 || s > away_score)) {
        away_score = s;
        away = j;
      }
    }
    double x_score = (sub.conjugate().cwiseProduct(x)).sum().real();
    double gap = x_score - toward_score;  // Frank-Wolfe dual gap estimate
    if (gap <= opts.gap_tol) {
      res.converged = true;
      break;
    }

    // Candidate 1: standard FW step toward the best atom.
    Mat d_fw = atoms[toward] - x;
    auto [g_fw, f_fw] = line_search_trace(x - target, d_fw, 1.0);
    // Candidate 2: pairwise step moving mass from the worst active atom.
    double g_pw = 0.0, f_pw = f;
    bool have_pw = away >= 0 && away != toward && res.weights[away] > 1e-14;
    Mat d_pw;
    if (have_pw) {
      d_pw = atoms[toward] - atoms[away];
      std::tie(g_pw, f_pw) = line_search_trace(x - target, d_pw, res.weights[away]);
    }

    double f_new;
    if (have_pw && f_pw <= f_fw) {
      res.weights[toward] += g_pw;
      res.weights[away] -= g_pw;
      x += g_pw * d_pw;
      f_new = f_pw;
    } else {
      res.weights *= (1.0 - g_fw);
      res.weights[toward] += g_fw;
      x += g_fw * d_fw;
      f_new = f_fw;
    }

    if ((it + 1) % 50 == 0) {
      // Rebuild the mixture to shed accumulated drift.
      x.setZero();
      for (int j = 0; j < n; ++j)
        if (res.weights[j] > 0.0) x += res.weights[j] * atoms[j];
    }

    if (f - f_new < opts.improvement_tol && gap < 1e-6) {
      f = f_new;
      res.converged = true;
      break;
    }
    f = f_new;
  }

  // Exact value at the final weights.
  res.weights = res.weights.cwiseMax(0.0);
  res.weights /= res.weights.sum();
  x.setZero();
  for (int j = 0; j < n; ++j)
    if (res.weights[j] > 0.0) x += res.weights[j] * atoms[j];
  res.dist = trace_norm_half_value(x - target);
  return res;
}

}  // namespace dlab::fit
