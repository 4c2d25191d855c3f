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
#include <optional>
#include <vector>

#include "dlab/common.hpp"
#include "dlab/qcore.hpp"
#include "dlab/simplex_fit.hpp"

namespace dlab::purenet {

using qcore::PureState;

/// Trace distance between pure states: sqrt(1 - |<a|b>|^2).
inline double pure_trace_distance(const PureState& a, const PureState& b) {
  double ov = std::norm(a.overlap(b));
  return std::sqrt(std::max(0.0, 1.0 - ov));
}

/// Two-sided bounds on log2 of the minimum epsilon-net size of the pure
/// states of C^d in trace distance.
struct NetBounds {
  double log2_lower;
  double log2_upper;
  int d;
  double epsilon;
};

inline NetBounds lemma1_bounds(int d, double epsilon) {
  if (d < 2) throw std::invalid_argument("net bounds need d >= 2");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must be in (0,1]");
  double lower = 2.0 * (d - 1) * std::log2(1.0 / epsilon);
  double upper = lower + std::log2(5.0 * d * std::log(double(d)));
  return NetBounds{lower, upper, d, epsilon};
}

/// Monte-Carlo covering certificate: the max over sampled Haar targets of
/// the distance to the net. Never a proof, so the sample count travels
/// with the radius.
struct CoverCertificate {
  double radius;
  long samples;
  std::uint64_t seed;
};

class PureNet {
 public:
  PureNet(std::vector<PureState> points, double nominal_radius)
      : points_(std::move(points)), nominal_(nominal_radius) {
    if (points_.empty()) throw std::invalid_argument("empty net");
    if (!(nominal_ > 0.0 && nominal_ <= 1.0))
      throw std::invalid_argument("nominal radius must be in (0,1]");
    dim_ = points_.front().dim();
    for (size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].dim() != dim_)
        throw std::invalid_argument("net points have mixed dimensions");
      for (size_t j = i + 1; j < points_.size(); ++j)
        if (pure_trace_distance(points_[i], points_[j]) <= 1e-9)
          throw std::invalid_argument("net points coincide up to phase");
    }
  }

  const std::vector<PureState>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  int dim() const { return dim_; }
  double nominal_radius() const { return nominal_; }
  const std::optional<CoverCertificate>& certificate() const { return cert_; }

  PureNet with_certificate(CoverCertificate c) const {
    PureNet n = *this;
    n.cert_ = c;
    return n;
  }

  double min_distance_to(const PureState& target) const {
    double best = 2.0;
    for (const auto& p : points_)
      best = std::min(best, pure_trace_distance(p, target));
    return best;
  }

 private:
  std::vector<PureState> points_;
  double nominal_;
  int dim_;
  std::optional<CoverCertificate> cert_;
};

/// The six single-qubit octahedron states |0>,|1>,|+>,|->,|+i>,|-i>.
/// Their covering radius is sqrt((1 - 1/sqrt(3))/2) ~ 0.4597, so the set
/// is a 0.46-net of the qubit pure states.
inline PureNet octahedron_net() {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<PureState> pts;
  pts.push_back(PureState::basis(2, 0));
  pts.push_back(PureState::basis(2, 1));
  Vec plus(2), minus(2), plus_i(2), minus_i(2);
  plus << s, s;
  minus << s, -s;
  plus_i << s, cxd(0, s);
  minus_i << s, cxd(0, -s);
  pts.emplace_back(plus);
  pts.emplace_back(minus);
  pts.emplace_back(plus_i);
  pts.emplace_back(minus_i);
  return PureNet(std::move(pts), 0.46);
}

/// Greedy farthest-point insertion over a finite Haar pool. Stops once
/// every pool candidate lies within eps of the net, so the result covers
/// the pool by construction; certify_covering measures fresh targets.
inline PureNet build_net_greedy(int d, double eps, long pool_size,
                                std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("net construction needs d >= 2");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("net infeasible: eps must be in (0,1)");
  if (pool_size < 1) throw std::invalid_argument("empty candidate pool");

  std::vector<PureState> pool;
  pool.reserve(pool_size);
  Rng rng(seed);
  for (long i = 0; i < pool_size; ++i)
    pool.push_back(PureState::normalized(rng.cgauss_vec(d)));

  std::vector<PureState> net{pool[0]};
  std::vector<double> dist(pool_size);
  for (long i = 0; i < pool_size; ++i)
    dist[i] = pure_trace_distance(pool[i], net[0]);

  for (;;) {
    long far = 0;
    for (long i = 1; i < pool_size; ++i)
      if (dist[i] > dist[far]) far = i;  // ties keep the first index
    if (dist[far] <= eps) break;
    net.push_back(pool[far]);
    for (long i = 0; i < pool_size; ++i)
      dist[i] = std::min(dist[i], pure_trace_distance(pool[i], net.back()));
  }
  return PureNet(std::move(net), eps);
}

/// Max over n_samples Haar targets of the distance to the net; parallel
/// over targets with per-target derived seeds, reduced in index order.
inline CoverCertificate certify_covering(const PureNet& net, long n_samples,
                                         std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  const long chunk = 1024;
  const long n_chunks = (n_samples + chunk - 1) / chunk;
  std::vector<double> worst(n_chunks, 0.0);
  parallel_for(n_chunks, [&](long c) {
    double w = 0.0;
    long lo = c * chunk, hi = std::min(n_samples, lo + chunk);
    for (long i = lo; i < hi; ++i) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      PureState t = PureState::normalized(rng.cgauss_vec(net.dim()));
      w = std::max(w, net.min_distance_to(t));
    }
    worst[c] = w;
  });
  double radius = 0.0;
  for (double w : worst) radius = std::max(radius, w);
  return CoverCertificate{radius, n_samples, seed};
}

struct ConvexCoverResult {
  double dist;
  RVec weights;
  bool converged;
};

/// Distance from the convex hull of the net to a pure target, minimized
/// over simplex weights by Frank-Wolfe. The result is an upper bound on
/// the true hull distance.
inline ConvexCoverResult convex_cover_distance(const PureNet& net,
                                               const PureState& target,
                                               int iters = 500) {
  if (target.dim() != net.dim())
    throw std::invalid_argument("target dimension mismatch");
  std::vector<Mat> atoms;
  atoms.reserve(net.size());
  for (const auto& p : net.points()) atoms.push_back(p.outer());
  fit::SimplexFitOptions opts;
  opts.max_iters = iters;
  auto r = fit::fit_simplex_mixture(atoms, target.outer(), opts);
  return ConvexCoverResult{r.dist, r.weights, r.converged};
}

}  // namespace dlab::purenet
