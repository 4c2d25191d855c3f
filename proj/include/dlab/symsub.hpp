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

#include <map>
#include <vector>

#include "dlab/common.hpp"
#include "dlab/purenet.hpp"
#include "dlab/qcore.hpp"
#include "dlab/simplex_fit.hpp"

namespace dlab::symsub {

using qcore::DensityOp;
using qcore::PureState;
using purenet::PureNet;

/// dim of the symmetric subspace of (C^d)^(x)n: C(n+d-1, d-1), computed
/// with overflow-safe integer arithmetic and a desk-scale cap.
inline long sym_dimension(int d, int n, long cap = 1000000) {
  if (d < 1 || n < 1) throw std::invalid_argument("need d >= 1 and n >= 1");
  // C(n+d-1, d-1); partial products are themselves binomials, so the cap
  // check during accumulation is sound.
  unsigned long long r = 1;
  int k = d - 1, m = n + d - 1;
  for (int i = 1; i <= k; ++i) {
    unsigned __int128 t = static_cast<unsigned __int128>(r) * (m - k + i);
    r = static_cast<unsigned long long>(t / i);
    if (r > static_cast<unsigned long long>(cap))
      throw CapExceeded("desk-scale exceeded: symmetric dimension too large");
  }
  return static_cast<long>(r);
}

/// Occupation-number basis of the symmetric subspace: d-tuples summing to
/// n in lexicographic order.
struct SymBasis {
  int d;
  int n;
  std::vector<std::vector<int>> occupations;
  long dim;
};

inline SymBasis sym_basis(int d, int n, long cap = 1000000) {
  SymBasis b{d, n, {}, sym_dimension(d, n, cap)};
  std::vector<int> occ(d, 0);
  // lexicographic enumeration by recursion on the first coordinate
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d - 1) {
      occ[pos] = left;
      b.occupations.push_back(occ);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      occ[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return b;
}

/// Isometry from coordinates C^{sym_dim} into (C^d)^(x)n whose columns are
/// the normalized symmetrizations of the occupation basis (Dicke states).
/// Column supports are disjoint sets of product strings, each entry equal
/// to 1/sqrt(count), so the representation is kept sparse: row lists per
/// column. Copy 1 is the most significant index of a product string.
class SymIsometry {
 public:
  SymIsometry(int d, int n, const Caps& caps = {})
      : basis_(sym_basis(d, n, caps.sym_dim)) {
    long full = 1;
    for (int i = 0; i < n; ++i) {
      full *= d;
      if (full * d > caps.embed_len)
        throw CapExceeded("desk-scale exceeded: embedding vector too long");
    }
    full_dim_ = full;
    std::map<std::vector<int>, int> index;
    for (int x = 0; x < basis_.dim; ++x) index[basis_.occupations[x]] = x;
    rows_.assign(basis_.dim, {});
    std::vector<int> type(d);
    for (long w = 0; w < full_dim_; ++w) {
      std::fill(type.begin(), type.end(), 0);
      long rest = w;
      for (int i = 0; i < n; ++i) {
        type[rest % d]++;
        rest /= d;
      }
      rows_[index.at(type)].push_back(w);
    }
  }

  int d() const { return basis_.d; }
  int n() const { return basis_.n; }
  long sym_dim() const { return basis_.dim; }
  long full_dim() const { return full_dim_; }
  const SymBasis& basis() const { return basis_; }

  /// Dense column x (a Dicke state) of length d^n.
  Vec column(int x) const {
    Vec v = Vec::Zero(full_dim_);
    double a = 1.0 / std::sqrt(double(rows_[x].size()));
    for (long r : rows_[x]) v[r] = a;
    return v;
  }

  /// Embeds a coordinate vector into (C^d)^(x)n.
  Vec embed(const Vec& coords) const {
    if (coords.size() != basis_.dim)
      throw std::invalid_argument("coordinate length mismatch");
    Vec v = Vec::Zero(full_dim_);
    for (int x = 0; x < basis_.dim; ++x) {
      double a = 1.0 / std::sqrt(double(rows_[x].size()));
      for (long r : rows_[x]) v[r] += a * coords[x];
    }
    return v;
  }

  /// U^dag w: projects a full-space vector onto symmetric coordinates.
  Vec project(const Vec& w) const {
    if (w.size() != full_dim_)
      throw std::invalid_argument("full-space vector length mismatch");
    Vec c = Vec::Zero(basis_.dim);
    for (int x = 0; x < basis_.dim; ++x) {
      cxd acc = 0.0;
      for (long r : rows_[x]) acc += w[r];
      c[x] = acc / std::sqrt(double(rows_[x].size()));
    }
    return c;
  }

  /// Coordinates of phi^(x)n in closed form: sqrt(count) * prod_c phi_c^o_c.
  Vec product_power_coords(const PureState& phi) const {
    if (phi.dim() != basis_.d)
      throw std::invalid_argument("single-copy dimension mismatch");
    Vec c(basis_.dim);
    for (int x = 0; x < basis_.dim; ++x) {
      cxd prod = 1.0;
      for (int cdx = 0; cdx < basis_.d; ++cdx)
        for (int rep = 0; rep < basis_.occupations[x][cdx]; ++rep)
          prod *= phi.amplitudes()[cdx];
      c[x] = std::sqrt(double(rows_[x].size())) * prod;
    }
    return c;
  }

  /// Dense materialization; guarded because it is quadratic in d^n.
  Mat to_matrix(long max_elems = 4000000) const {
    if (full_dim_ * basis_.dim > max_elems)
      throw CapExceeded("desk-scale exceeded: isometry too large to materialize");
    Mat u = Mat::Zero(full_dim_, basis_.dim);
    for (int x = 0; x < basis_.dim; ++x) u.col(x) = column(x);
    return u;
  }

 private:
  SymBasis basis_;
  long full_dim_;
  std::vector<std::vector<long>> rows_;
};

/// tr_{[n-k]}[(U (x) I_aux) rho (U^dag (x) I_aux)] on (C^d)^(x)k (x) C^aux,
/// computed from cross-Gram tensors of the embedded columns so the full
/// d^n-dimensional density matrix is never materialized. Traces the first
/// n-k copies and keeps the last k.
inline DensityOp reduce_symmetric(const DensityOp& rho_small,
                                  const SymIsometry& iso, int k) {
  const int d = iso.d(), n = iso.n();
  if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
  const long sd = iso.sym_dim();
  if (rho_small.dim() % sd != 0)
    throw std::invalid_argument("input dimension is not sym_dim * aux");
  const long aux = rho_small.dim() / sd;

  long dk = 1;
  for (int i = 0; i < k; ++i) dk *= d;
  const long dtr = iso.full_dim() / dk;

  // Dense columns reshaped to (traced block) x (kept block); row-major
  // layout means the traced copies are the most significant index.
  std::vector<Mat> cols(sd);
  for (int x = 0; x < sd; ++x) {
    Vec u = iso.column(x);
    Mat m(dtr, dk);
    for (long r = 0; r < iso.full_dim(); ++r) m(r / dk, r % dk) = u[r];
    cols[x] = std::move(m);
  }

  const Mat& rho = rho_small.matrix();
  Mat out = Mat::Zero(dk * aux, dk * aux);
  for (int x = 0; x < sd; ++x)
    for (int y = 0; y < sd; ++y) {
      Mat g = cols[x].transpose() * cols[y].conjugate();  // dk x dk
      if (g.cwiseAbs().maxCoeff() < 1e-300) continue;
      for (long s = 0; s < dk; ++s)
        for (long t = 0; t < dk; ++t) {
          if (g(s, t) == cxd(0.0)) continue;
          out.block(s * aux, t * aux, aux, aux) +=
              g(s, t) * rho.block(x * aux, y * aux, aux, aux);
        }
    }

  std::vector<int> factors(k, d);
  if (aux > 1) factors.push_back(static_cast<int>(aux));
  return DensityOp(std::move(out), std::move(factors));
}

/// Discretized i.i.d. mixture over a net: sum_i w_i phihat_i^(x)k, with
/// optional per-atom auxiliary states for the generalized fit.
struct IIDMixture {
  std::vector<PureState> support;
  RVec weights;
  int copies = 1;
  std::vector<Mat> aux_states;  // empty unless the generalized fit ran
};

struct DefinettiFit {
  double dist = 0.0;
  IIDMixture mix;
  bool converged = false;
};

namespace detail {

inline Mat pow_outer(const PureState& phi, int k) {
  Vec v = qcore::vec_power(phi.amplitudes(), k);
  return v * v.adjoint();
}

}  // namespace detail

/// Best trace-distance fit of rho_red by mixtures of k-fold i.i.d. states
/// drawn from the net; an upper bound on the distance to the continuous
/// i.i.d. mixture set.
inline DefinettiFit definetti_fit(const DensityOp& rho_red, const PureNet& net,
                                  int iters = 500) {
  std::vector<Mat> atoms;
  atoms.reserve(net.size());
  long dk = 1;
  int k = 0;
  while (dk < rho_red.dim()) {
    dk *= net.dim();
    ++k;
  }
  if (dk != rho_red.dim())
    throw std::invalid_argument("state dimension is not a power of the net dimension");
  for (const auto& p : net.points()) atoms.push_back(detail::pow_outer(p, k));

  fit::SimplexFitOptions opts;
  opts.max_iters = iters;
  auto r = fit::fit_simplex_mixture(atoms, rho_red.matrix(), opts);
  DefinettiFit out;
  out.dist = r.dist;
  out.converged = r.converged;
  out.mix = IIDMixture{net.points(), r.weights, k, {}};
  return out;
}

/// Generalized fit with atoms phihat_i^(x)k (x) sigma_i: weights go through
/// the same Frank-Wolfe engine; each active sigma_i is then improved by a
/// trace-distance descent step (min-eigvec direction of the contracted
/// subgradient, exact line search), and the two phases alternate.
inline DefinettiFit definetti_fit_general(const DensityOp& rho_red, int aux_dim,
                                          const PureNet& net, int iters = 500) {
  if (aux_dim < 1) throw std::invalid_argument("aux dimension must be >= 1");
  if (aux_dim == 1) {
    DefinettiFit f = definetti_fit(
        DensityOp(rho_red.matrix(), {rho_red.dim()}), net, iters);
    f.mix.aux_states.assign(net.size(), Mat::Identity(1, 1));
    return f;
  }
  if (rho_red.dim() % aux_dim != 0)
    throw std::invalid_argument("state dimension is not d^k * aux");
  long dk = rho_red.dim() / aux_dim;
  long chk = 1;
  int k = 0;
  while (chk < dk) {
    chk *= net.dim();
    ++k;
  }
  if (chk != dk)
    throw std::invalid_argument("copy dimension is not a power of the net dimension");

  const int na = net.size();
  std::vector<Mat> pows(na);
  for (int i = 0; i < na; ++i) pows[i] = detail::pow_outer(net.points()[i], k);

  const Mat& target = rho_red.matrix();
  // Conditional aux states as the initial sigma_i.
  std::vector<Mat> sigmas(na);
  for (int i = 0; i < na; ++i) {
    Vec v = qcore::vec_power(net.points()[i].amplitudes(), k);
    Mat cond = Mat::Zero(aux_dim, aux_dim);
    for (long a = 0; a < aux_dim; ++a)
      for (long b = 0; b < aux_dim; ++b) {
        cxd acc = 0.0;
        for (long s = 0; s < dk; ++s)
          for (long t = 0; t < dk; ++t)
            acc += std::conj(v[s]) * target(s * aux_dim + a, t * aux_dim + b) * v[t];
        cond(a, b) = acc;
      }
    double tr = cond.trace().real();
    sigmas[i] = tr > 1e-12 ? Mat((cond + cond.adjoint()) / (2.0 * tr))
                           : Mat(Mat::Identity(aux_dim, aux_dim) / double(aux_dim));
    // clamp away any tiny negative part
    Eigen::SelfAdjointEigenSolver<Mat> es(sigmas[i]);
    Mat fixed = es.eigenvectors() *
                es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                es.eigenvectors().adjoint();
    sigmas[i] = fixed / fixed.trace().real();
  }

  auto atom = [&](int i) { return Mat(qcore::kron(pows[i], sigmas[i])); };

  RVec weights;
  double dist = 0.0;
  bool converged = false;
  const int rounds = 12;
  const int fw_budget = std::max(20, iters / rounds);
  for (int round = 0; round < rounds; ++round) {
    std::vector<Mat> atoms(na);
    for (int i = 0; i < na; ++i) atoms[i] = atom(i);
    fit::SimplexFitOptions opts;
    opts.max_iters = fw_budget;
    auto r = fit::fit_simplex_mixture(atoms, target, opts,
                                      weights.size() == na ? &weights : nullptr);
    weights = r.weights;
    double prev = dist > 0.0 ? dist : r.dist;
    dist = r.dist;

    // sigma pass
    Mat x = Mat::Zero(target.rows(), target.cols());
    for (int i = 0; i < na; ++i)
      if (weights[i] > 0.0) x += weights[i] * atoms[i];
    auto [val, sub] = fit::trace_norm_half(x - target);
    for (int i = 0; i < na; ++i) {
      if (weights[i] < 1e-12) continue;
      // K[a,b] = sum_{s,t} S[(s,a),(t,b)] * A[t,s]
      Mat kmat = Mat::Zero(aux_dim, aux_dim);
      for (long a = 0; a < aux_dim; ++a)
        for (long b = 0; b < aux_dim; ++b) {
          cxd acc = 0.0;
          for (long s = 0; s < dk; ++s)
            for (long t = 0; t < dk; ++t)
              acc += sub(s * aux_dim + a, t * aux_dim + b) * pows[i](t, s);
          kmat(a, b) = acc;
        }
      Eigen::SelfAdjointEigenSolver<Mat> es(kmat);
      Vec vmin = es.eigenvectors().col(0);
      Mat dir_sigma = vmin * vmin.adjoint() - sigmas[i];
      Mat dmat = weights[i] * qcore::kron(pows[i], dir_sigma);
      auto [gamma, fval] = fit::line_search_trace(x - target, dmat, 1.0);
      if (gamma > 0.0) {
        sigmas[i] += gamma * dir_sigma;
        x += gamma * dmat;
      }
    }
    double after = fit::trace_norm_half_value(x - target);
    if (round > 0 && prev - after < 1e-9) {
      dist = after;
      converged = true;
      break;
    }
    dist = after;
  }

  // Exact value at the final configuration.
  Mat x = Mat::Zero(target.rows(), target.cols());
  for (int i = 0; i < na; ++i)
    if (weights[i] > 0.0) x += weights[i] * atom(i);
  DefinettiFit out;
  out.dist = fit::trace_norm_half_value(x - target);
  out.converged = converged;
  out.mix = IIDMixture{net.points(), weights, k, sigmas};
  return out;
}

}  // namespace dlab::symsub
