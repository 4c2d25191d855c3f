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

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dlab/common.hpp"

namespace dlab::qcore {

// Finite-dimensional operator algebra on dense complex matrices.
// Multi-factor indices are row-major throughout: for factor dims
// [d0, d1, ..., dk-1] the linear index of (i0, i1, ..., ik-1) is
// ((i0*d1 + i1)*d2 + ...), i.e. factor 0 is the most significant.

inline long product_of(const std::vector<int>& dims) {
  long p = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("factor dims must be positive");
    p *= d;
  }
  return p;
}

inline double hermiticity_defect(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Unit complex vector in C^d.
class PureState {
 public:
  explicit PureState(Vec amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 1) throw std::invalid_argument("empty state vector");
    if (std::abs(amps_.norm() - 1.0) > kUnitNormTol)
      throw std::invalid_argument("state vector is not normalized");
  }

  static PureState basis(int d, int i) {
    if (i < 0 || i >= d) throw std::invalid_argument("basis index out of range");
    Vec v = Vec::Zero(d);
    v[i] = 1.0;
    return PureState(std::move(v));
  }

  /// Normalizes an arbitrary nonzero vector.
  static PureState normalized(const Vec& v) {
    double n = v.norm();
    if (n < 1e-300) throw std::invalid_argument("cannot normalize zero vector");
    return PureState(v / n);
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vec& amplitudes() const { return amps_; }
  cxd overlap(const PureState& other) const { return amps_.dot(other.amps_); }
  Mat outer() const { return amps_ * amps_.adjoint(); }

 private:
  Vec amps_;
};

/// PSD trace-one operator with explicit tensor-factor structure.
class DensityOp {
 public:
  DensityOp(Mat m, std::vector<int> factor_dims)
      : m_(std::move(m)), factors_(std::move(factor_dims)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("not square");
    if (product_of(factors_) != m_.rows())
      throw std::invalid_argument("factor dims do not match matrix dimension");
    if (hermiticity_defect(m_) > kHermTol)
      throw std::invalid_argument("density operator is not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol ||
        std::abs(m_.trace().imag()) > kTraceTol)
      throw std::invalid_argument("density operator trace is not 1");
    if (min_eigenvalue(m_) < kPsdTol)
      throw std::invalid_argument("density operator is not PSD");
  }

  static DensityOp from_pure(const PureState& s,
                             std::vector<int> factor_dims = {}) {
    if (factor_dims.empty()) factor_dims = {s.dim()};
    return DensityOp(s.outer(), std::move(factor_dims));
  }

  static DensityOp maximally_mixed(int d) {
    return DensityOp(Mat::Identity(d, d) / double(d), {d});
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  const std::vector<int>& factor_dims() const { return factors_; }

  DensityOp with_factors(std::vector<int> factor_dims) const {
    return DensityOp(m_, std::move(factor_dims));
  }

 private:
  Mat m_;
  std::vector<int> factors_;
};

/// General rectangular operator from C^in to C^out.
class LinOp {
 public:
  LinOp(Mat m, int in_dim, int out_dim) : m_(std::move(m)) {
    if (m_.cols() != in_dim || m_.rows() != out_dim)
      throw std::invalid_argument("operator shape mismatch");
  }
  explicit LinOp(Mat m)
      : LinOp(m, static_cast<int>(m.cols()), static_cast<int>(m.rows())) {}

  int in_dim() const { return static_cast<int>(m_.cols()); }
  int out_dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
};

/// Choi operator of a CPTP map; input factor first, so the matrix acts on
/// C^in (x) C^out and the block at (i,j) is Gamma(|i><j|).
class ChoiOp {
 public:
  ChoiOp(Mat m, int in_dim, int out_dim)
      : m_(std::move(m)), in_(in_dim), out_(out_dim) {
    if (m_.rows() != m_.cols() || m_.rows() != long(in_) * out_)
      throw std::invalid_argument("Choi matrix dimension mismatch");
    if (hermiticity_defect(m_) > kHermTol)
      throw std::invalid_argument("Choi operator is not Hermitian (not CP)");
    if (min_eigenvalue(m_) < kPsdTol)
      throw std::invalid_argument("Choi operator is not PSD (not CP)");
    // TP: tracing the output factor must leave the identity on the input.
    Mat marg = Mat::Zero(in_, in_);
    for (int i = 0; i < in_; ++i)
      for (int j = 0; j < in_; ++j)
        marg(i, j) = m_.block(i * out_, j * out_, out_, out_).trace();
    if ((marg - Mat::Identity(in_, in_)).cwiseAbs().maxCoeff() > kHermTol)
      throw std::invalid_argument("Choi operator is not trace-preserving");
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
  int in_;
  int out_;
};

/// CPTP map as a list of Kraus operators with a common shape.
class KrausChannel {
 public:
  KrausChannel(std::vector<LinOp> kraus_ops, std::vector<int> out_factors = {})
      : ops_(std::move(kraus_ops)), out_factors_(std::move(out_factors)) {
    if (ops_.empty()) throw std::invalid_argument("empty Kraus list");
    int in = ops_.front().in_dim(), out = ops_.front().out_dim();
    Mat closure = Mat::Zero(in, in);
    for (const auto& k : ops_) {
      if (k.in_dim() != in || k.out_dim() != out)
        throw std::invalid_argument("Kraus operators have mixed shapes");
      closure += k.matrix().adjoint() * k.matrix();
    }
    if ((closure - Mat::Identity(in, in)).cwiseAbs().maxCoeff() >
        kKrausClosureTol)
      throw std::invalid_argument("Kraus closure sum is not the identity");
    if (out_factors_.empty()) out_factors_ = {out};
    if (product_of(out_factors_) != out)
      throw std::invalid_argument("output factor dims do not match");
  }

  int in_dim() const { return ops_.front().in_dim(); }
  int out_dim() const { return ops_.front().out_dim(); }
  const std::vector<LinOp>& kraus_ops() const { return ops_; }
  const std::vector<int>& out_factors() const { return out_factors_; }

  static KrausChannel identity(int d) {
    return KrausChannel({LinOp(Mat::Identity(d, d))});
  }

  /// rho |-> tr(rho) * sigma.
  static KrausChannel trace_and_replace(const DensityOp& sigma, int in_dim) {
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma.matrix());
    std::vector<LinOp> ops;
    for (int k = 0; k < sigma.dim(); ++k) {
      double lam = std::max(0.0, es.eigenvalues()[k]);
      if (lam < 1e-15) continue;
      for (int i = 0; i < in_dim; ++i) {
        Mat op = Mat::Zero(sigma.dim(), in_dim);
        op.col(i) = std::sqrt(lam) * es.eigenvectors().col(k);
        ops.emplace_back(std::move(op), in_dim, sigma.dim());
      }
    }
    return KrausChannel(std::move(ops), sigma.factor_dims());
  }

 private:
  std::vector<LinOp> ops_;
  std::vector<int> out_factors_;
};

// ---------------------------------------------------------------------------
// Tensor products
// ---------------------------------------------------------------------------

inline Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

inline Vec kron_vec(const Vec& a, const Vec& b) {
  Vec r(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i)
    r.segment(i * b.size(), b.size()) = a[i] * b;
  return r;
}

inline PureState tensor(const PureState& a, const PureState& b) {
  return PureState(kron_vec(a.amplitudes(), b.amplitudes()));
}

inline DensityOp tensor(const DensityOp& a, const DensityOp& b) {
  std::vector<int> dims = a.factor_dims();
  dims.insert(dims.end(), b.factor_dims().begin(), b.factor_dims().end());
  return DensityOp(kron(a.matrix(), b.matrix()), std::move(dims));
}

inline LinOp tensor(const LinOp& a, const LinOp& b) {
  return LinOp(kron(a.matrix(), b.matrix()));
}

/// n-fold tensor power of a pure state.
inline Vec vec_power(const Vec& v, int n) {
  Vec r = v;
  for (int i = 1; i < n; ++i) r = kron_vec(r, v);
  return r;
}

// ---------------------------------------------------------------------------
// Partial trace
// ---------------------------------------------------------------------------

namespace detail {

struct TraceLayout {
  std::vector<long> kept_offsets;    // row offset of each kept multi-index
  std::vector<long> traced_offsets;  // row offset of each traced multi-index
  std::vector<int> kept_dims;
};

inline TraceLayout trace_layout(const std::vector<int>& dims,
                                const std::set<int>& traced) {
  int k = static_cast<int>(dims.size());
  for (int t : traced)
    if (t < 0 || t >= k) throw std::invalid_argument("invalid factor index");
  std::vector<long> strides(k, 1);
  for (int i = k - 2; i >= 0; --i) strides[i] = strides[i + 1] * dims[i + 1];

  TraceLayout lay;
  std::vector<int> kept_idx, traced_idx;
  for (int i = 0; i < k; ++i)
    (traced.count(i) ? traced_idx : kept_idx).push_back(i);
  for (int i : kept_idx) lay.kept_dims.push_back(dims[i]);

  auto offsets = [&](const std::vector<int>& which) {
    long n = 1;
    for (int i : which) n *= dims[i];
    std::vector<long> off(n, 0);
    for (long lin = 0; lin < n; ++lin) {
      long rest = lin;
      for (auto it = which.rbegin(); it != which.rend(); ++it) {
        off[lin] += (rest % dims[*it]) * strides[*it];
        rest /= dims[*it];
      }
    }
    return off;
  };
  lay.kept_offsets = offsets(kept_idx);
  lay.traced_offsets = offsets(traced_idx);
  return lay;
}

inline Mat partial_trace_raw(const Mat& m, const std::vector<int>& dims,
                             const std::set<int>& traced) {
  TraceLayout lay = trace_layout(dims, traced);
  long dk = static_cast<long>(lay.kept_offsets.size());
  Mat r = Mat::Zero(dk, dk);
  for (long a = 0; a < dk; ++a)
    for (long b = 0; b < dk; ++b) {
      cxd acc = 0.0;
      for (long t : lay.traced_offsets)
        acc += m(lay.kept_offsets[a] + t, lay.kept_offsets[b] + t);
      r(a, b) = acc;
    }
  return r;
}

}  // namespace detail

inline DensityOp partial_trace(const DensityOp& op, const std::set<int>& traced) {
  Mat r = detail::partial_trace_raw(op.matrix(), op.factor_dims(), traced);
  std::vector<int> kept;
  for (int i = 0; i < static_cast<int>(op.factor_dims().size()); ++i)
    if (!traced.count(i)) kept.push_back(op.factor_dims()[i]);
  if (kept.empty()) kept = {1};
  return DensityOp(std::move(r), std::move(kept));
}

/// Partial trace of a square LinOp with an explicit factor split.
inline LinOp partial_trace(const LinOp& op, const std::vector<int>& dims,
                           const std::set<int>& traced) {
  if (op.in_dim() != op.out_dim())
    throw std::invalid_argument("partial trace needs a square operator");
  if (product_of(dims) != op.in_dim())
    throw std::invalid_argument("factor dims do not match operator");
  return LinOp(detail::partial_trace_raw(op.matrix(), dims, traced));
}

// ---------------------------------------------------------------------------
// Channels and Choi representations
// ---------------------------------------------------------------------------

inline Mat apply_channel_raw(const KrausChannel& ch, const Mat& rho) {
  Mat out = Mat::Zero(ch.out_dim(), ch.out_dim());
  for (const auto& k : ch.kraus_ops())
    out += k.matrix() * rho * k.matrix().adjoint();
  return out;
}

inline DensityOp apply_channel(const KrausChannel& ch, const DensityOp& rho) {
  if (rho.dim() != ch.in_dim())
    throw std::invalid_argument("channel input dimension mismatch");
  return DensityOp(apply_channel_raw(ch, rho.matrix()), ch.out_factors());
}

inline DensityOp apply_channel(const ChoiOp& choi, const DensityOp& rho) {
  if (rho.dim() != choi.in_dim())
    throw std::invalid_argument("channel input dimension mismatch");
  int out = choi.out_dim();
  Mat r = Mat::Zero(out, out);
  for (int i = 0; i < choi.in_dim(); ++i)
    for (int j = 0; j < choi.in_dim(); ++j)
      r += rho.matrix()(i, j) * choi.matrix().block(i * out, j * out, out, out);
  return DensityOp(std::move(r), {out});
}

inline ChoiOp choi_of(const KrausChannel& ch) {
  int in = ch.in_dim(), out = ch.out_dim();
  Mat j = Mat::Zero(long(in) * out, long(in) * out);
  for (const auto& k : ch.kraus_ops()) {
    // vec[(i,m)] = K[m,i]
    Vec v(long(in) * out);
    for (int i = 0; i < in; ++i)
      for (int m = 0; m < out; ++m) v[long(i) * out + m] = k.matrix()(m, i);
    j += v * v.adjoint();
  }
  return ChoiOp(std::move(j), in, out);
}

inline KrausChannel channel_of(const ChoiOp& choi) {
  int in = choi.in_dim(), out = choi.out_dim();
  Eigen::SelfAdjointEigenSolver<Mat> es(choi.matrix());
  std::vector<LinOp> ops;
  for (long l = 0; l < es.eigenvalues().size(); ++l) {
    double lam = es.eigenvalues()[l];
    if (lam < 1e-12) continue;
    Mat k(out, in);
    for (int i = 0; i < in; ++i)
      for (int m = 0; m < out; ++m)
        k(m, i) = std::sqrt(lam) * es.eigenvectors()(long(i) * out + m, l);
    ops.emplace_back(std::move(k), in, out);
  }
  return KrausChannel(std::move(ops));
}

// ---------------------------------------------------------------------------
// Seeded random objects
// ---------------------------------------------------------------------------

inline PureState random_pure(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  Rng rng(seed);
  return PureState::normalized(rng.cgauss_vec(d));
}

inline DensityOp random_density(int d, int rank, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (rank < 1 || rank > d) throw std::invalid_argument("rank out of range");
  Rng rng(seed);
  Mat g = rng.cgauss_mat(d, rank);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOp(std::move(rho), {d});
}

/// Haar-random isometry C^in -> C^out via QR with the R diagonal made
/// positive real, so the distribution is exactly Haar and reproducible.
inline Mat random_isometry(int out, int in, Rng& rng) {
  if (out < in) throw std::invalid_argument("isometry needs out >= in");
  Mat g = rng.cgauss_mat(out, in);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(out, in);
  Mat r = q.adjoint() * g;
  for (int j = 0; j < in; ++j) {
    cxd d = r(j, j);
    if (std::abs(d) > 1e-300) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// Channel from a Haar-random isometry into out (x) env followed by an
/// environment trace. Kraus ops are the env-basis slices of the isometry.
inline KrausChannel random_channel(int in, int out, int env,
                                   std::uint64_t seed) {
  if (in < 1 || out < 1 || env < 1)
    throw std::invalid_argument("dimensions must be >= 1");
  if (long(out) * env < in)
    throw std::invalid_argument("out*env must be >= in for an isometry");
  Rng rng(seed);
  Mat v = random_isometry(out * env, in, rng);
  std::vector<LinOp> ops;
  ops.reserve(env);
  for (int e = 0; e < env; ++e) {
    Mat k(out, in);
    for (int m = 0; m < out; ++m) k.row(m) = v.row(long(m) * env + e);
    ops.emplace_back(std::move(k), in, out);
  }
  return KrausChannel(std::move(ops));
}

/// Maximally entangled pure state across C^d (x) C^d.
inline PureState max_entangled(int d) {
  Vec v = Vec::Zero(long(d) * d);
  for (int i = 0; i < d; ++i) v[long(i) * d + i] = 1.0 / std::sqrt(double(d));
  return PureState(std::move(v));
}

}  // namespace dlab::qcore
