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

#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace dlab {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Raised when a request exceeds the configured desk-scale caps
/// (distinct from invalid-argument errors so the CLI can map it to its
/// own exit code).
struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Shared knobs for the iterative optimizers (see-saw, Frank-Wolfe).
/// These are the documented defaults; the CLI can override them from a
/// JSON config file.
struct OptimOptions {
  int restarts = 20;
  int iters = 500;
  double tol = 1e-9;
};

/// Desk-scale resource caps. Requests beyond these throw CapExceeded.
struct Caps {
  long sym_dim = 1000000;        // max dim of the symmetric subspace
  long embed_len = 4000000;      // max length of an embedded vector d^n * aux
  int definetti_n_d2 = 10;       // max copies for d = 2 disentangler builds
  int definetti_n_d3 = 6;        // max copies for d = 3 disentangler builds
  long choi_dim = 4096;          // max dimension of a materialized Choi matrix
};

inline constexpr double kHermTol = 1e-10;
inline constexpr double kPsdTol = -1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kKrausClosureTol = 1e-10;

// ---------------------------------------------------------------------------
// Seeding and RNG
// ---------------------------------------------------------------------------

/// splitmix64 finalizer; used to derive independent per-task seeds from a
/// master seed so that parallel sweeps are schedule-independent.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(master ^ mix_seed(index + 1));
}

/// Seeded RNG wrapper. One instance per task; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double gauss() { return normal_(eng_); }
  double uniform() { return unif_(eng_); }
  std::uint64_t integer(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> d(0, bound - 1);
    return d(eng_);
  }

  cxd cgauss() { return cxd(gauss(), gauss()); }

  Vec cgauss_vec(int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = cgauss();
    return v;
  }

  Mat cgauss_mat(int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cgauss();
    return m;
  }

  /// Uniform point on the probability simplex (normalized exponentials).
  RVec simplex(int n) {
    RVec w(n);
    for (int i = 0; i < n; ++i) w[i] = -std::log(1.0 - uniform());
    return w / w.sum();
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Deterministic parallel map
// ---------------------------------------------------------------------------

/// Worker count: DLAB_THREADS if set, hardware concurrency otherwise.
inline int worker_count() {
  if (const char* env = std::getenv("DLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(i) for i in [0, n). Results must be written to per-index slots;
/// the output is then independent of scheduling and of the worker count.
template <typename F>
void parallel_for(long n, F&& body) {
  int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  int spawn = static_cast<int>(std::min<long>(workers, n));
  pool.reserve(spawn);
  for (int w = 0; w < spawn; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dlab
