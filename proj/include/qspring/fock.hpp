// Copyright 2026 The qspring Authors
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

/**
 * @file fock.hpp
 * @brief Truncated-Fock density matrices and a brute-force master-equation
 * integrator for the same QuadraticModel the Gaussian engine consumes.
 *
 * Basis ordering is row-major over modes: |n_0, n_1, ...> has index
 * ((n_0 d_1 + n_1) d_2 + n_2) ... . Quadratic operators are normal ordered
 * before truncation, so a^dag a, a^2 and a_i a_j are exact on the kept levels.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "qspring/error.hpp"
#include "qspring/gaussian.hpp"
#include "qspring/model.hpp"

namespace qspring {

using SparseC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr int fock_dimension_cap = 2500;
inline constexpr double fock_tail_tolerance = 1e-4;

struct FockDensityMatrix {
  std::vector<int> dims;
  Eigen::MatrixXcd rho;

  int total() const { return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>()); }
  int modes() const { return static_cast<int>(dims.size()); }
};

namespace fock {

inline int total_dimension(const std::vector<int>& dims) {
  detail::require(!dims.empty(), "dims", "need at least one mode");
  long long n = 1;
  for (int d : dims) {
    detail::require(d >= 2, "dims", "every truncation must keep at least two levels");
    n *= d;
  }
  if (n > fock_dimension_cap)
    throw DomainError("dims", "total dimension " + std::to_string(n) + " exceeds cap " +
                                  std::to_string(fock_dimension_cap));
  return static_cast<int>(n);
}

/// Per-mode ladder operators embedded in the product space.
class Ladder {
 public:
  explicit Ladder(std::vector<int> dims) : dims_(std::move(dims)), n_(total_dimension(dims_)) {
    stride_.assign(dims_.size(), 1);
    for (int m = static_cast<int>(dims_.size()) - 2; m >= 0; --m) stride_[m] = stride_[m + 1] * dims_[m + 1];
    for (int m = 0; m < modes(); ++m) {
      std::vector<Eigen::Triplet<cplx>> t;
      for (int i = 0; i < n_; ++i) {
        const int k = level(i, m);
        if (k > 0) t.emplace_back(i - stride_[m], i, std::sqrt(static_cast<double>(k)));
      }
      SparseC a(n_, n_);
      a.setFromTriplets(t.begin(), t.end());
      a_.push_back(a);
      adag_.push_back(SparseC(a.adjoint()));
    }
  }

  int modes() const { return static_cast<int>(dims_.size()); }
  int dim() const { return n_; }
  const std::vector<int>& dims() const { return dims_; }
  int level(int index, int mode) const { return (index / stride_[mode]) % dims_[mode]; }

  const SparseC& a(int m) const { return a_[m]; }
  const SparseC& adag(int m) const { return adag_[m]; }

  /// Ladder operator b_k with b = (a_0, a_0^dag, a_1, a_1^dag, ...).
  const SparseC& b(int k) const { return (k % 2 == 0) ? a_[k / 2] : adag_[k / 2]; }

  SparseC identity() const {
    SparseC I(n_, n_);
    I.setIdentity();
    return I;
  }

  /// Normal-ordered product of b_k b_l (the c-number commutator is dropped).
  SparseC normal_product(int k, int l) const {
    if (k % 2 == 0 && l % 2 == 1) return SparseC(b(l) * b(k));
    return SparseC(b(k) * b(l));
  }

  /// c^T r for a quadrature coefficient vector c.
  SparseC linear(const Eigen::VectorXcd& c) const {
    detail::require(c.size() == 2 * modes(), "coeff", "length does not match the mode count");
    const Eigen::MatrixXcd T = to_ladder(modes());
    const Eigen::VectorXcd w = T.transpose() * c;
    SparseC L(n_, n_);
    for (int k = 0; k < 2 * modes(); ++k)
      if (w(k) != cplx(0.0)) L += w(k) * b(k);
    return L;
  }

  /// r = T b.
  static Eigen::MatrixXcd to_ladder(int modes) {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(2 * modes, 2 * modes);
    const double s = 1.0 / std::sqrt(2.0);
    for (int m = 0; m < modes; ++m) {
      T(2 * m, 2 * m) = s;
      T(2 * m, 2 * m + 1) = s;
      T(2 * m + 1, 2 * m) = cplx(0.0, -s);
      T(2 * m + 1, 2 * m + 1) = cplx(0.0, s);
    }
    return T;
  }

 private:
  std::vector<int> dims_;
  int n_;
  std::vector<int> stride_;
  std::vector<SparseC> a_, adag_;
};

/// Normal-ordered truncation of 1/2 r^T H r.
inline SparseC hamiltonian(const Ladder& ops, const Eigen::MatrixXd& H) {
  const int n = 2 * ops.modes();
  detail::require(H.rows() == n, "hamiltonian", "size does not match the truncation");
  const Eigen::MatrixXcd T = Ladder::to_ladder(ops.modes());
  const Eigen::MatrixXcd M = 0.5 * T.transpose() * H.cast<cplx>() * T;
  SparseC out(ops.dim(), ops.dim());
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (std::abs(M(k, l)) > 0) out += M(k, l) * ops.normal_product(k, l);
  return out;
}

inline cplx expectation(const SparseC& op, const Eigen::MatrixXcd& rho) {
  cplx s = 0;
  for (int r = 0; r < op.outerSize(); ++r)
    for (SparseC::InnerIterator it(op, r); it; ++it) s += it.value() * rho(it.col(), r);
  return s;
}

// ---------------------------------------------------------------------------
// Single-mode building blocks (dense, on a padded space)

inline Eigen::MatrixXcd ladder_dense(int d) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

inline Eigen::MatrixXcd thermal_dense(double n_bar, int d) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  const double q = n_bar / (n_bar + 1.0);
  double p = 1.0 / (n_bar + 1.0);
  for (int k = 0; k < d; ++k, p *= q) rho(k, k) = p;
  return rho;
}

/// Single-mode density matrix with the given first and second moments.
/// Built as D(alpha) R(theta) S(r) rho_th S^dag R^dag D^dag on a padded space,
/// then truncated to `d` levels and renormalised.
inline Eigen::MatrixXcd single_mode_rho(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov, int d,
                                        double* tail_out = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const double l1 = es.eigenvalues()(0), l2 = es.eigenvalues()(1);
  detail::require(l1 > 0 && l1 * l2 >= 0.25 - 1e-12, "state", "covariance violates the uncertainty relation");
  const double nu = std::sqrt(l1 * l2);
  const double r = 0.25 * std::log(l2 / l1);
  const Eigen::Vector2d v = es.eigenvectors().col(0);
  const double theta = std::atan2(v(1), v(0));
  const double n_th = std::max(0.0, nu - 0.5);

  const int pad = std::min(fock_dimension_cap, std::max(2 * d, d + 60));
  const Eigen::MatrixXcd a = ladder_dense(pad), ad = a.adjoint();
  Eigen::MatrixXcd rho = thermal_dense(n_th, pad);
  if (r > 0) {
    const Eigen::MatrixXcd gen = 0.5 * r * (a * a - ad * ad);
    const Eigen::MatrixXcd S = gen.exp();
    rho = S * rho * S.adjoint();
  }
  if (theta != 0.0) {
    Eigen::VectorXcd ph(pad);
    for (int k = 0; k < pad; ++k) ph(k) = std::polar(1.0, theta * k);
    rho = ph.asDiagonal() * rho * ph.conjugate().asDiagonal();
  }
  const cplx alpha = cplx(mean(0), mean(1)) / std::sqrt(2.0);
  if (std::abs(alpha) > 0) {
    const Eigen::MatrixXcd gen = alpha * ad - std::conj(alpha) * a;
    const Eigen::MatrixXcd Dm = gen.exp();
    rho = Dm * rho * Dm.adjoint();
  }
  Eigen::MatrixXcd out = rho.topLeftCorner(d, d);
  const double kept = out.trace().real();
  if (tail_out) *tail_out = 1.0 - kept + out(d - 1, d - 1).real() + out(d - 2, d - 2).real();
  out /= kept;
  return 0.5 * (out + out.adjoint());
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

}  // namespace fock

/// Population in each mode's top two kept levels.
inline std::vector<double> tail_populations(const FockDensityMatrix& s) {
  const fock::Ladder idx(s.dims);
  std::vector<double> tail(s.dims.size(), 0.0);
  for (int i = 0; i < idx.dim(); ++i)
    for (int m = 0; m < idx.modes(); ++m)
      if (idx.level(i, m) >= s.dims[m] - 2) tail[m] += s.rho(i, i).real();
  return tail;
}

/// Product state built mode by mode; correlated Gaussian states are rejected.
inline FockDensityMatrix from_gaussian(const GaussianState& g, const std::vector<int>& dims,
                                       double tail_tol = fock_tail_tolerance) {
  detail::require(static_cast<int>(dims.size()) == g.modes(), "dims", "one truncation per mode is required");
  fock::total_dimension(dims);
  for (int i = 0; i < g.modes(); ++i)
    for (int j = 0; j < g.modes(); ++j)
      if (i != j && g.cov.block<2, 2>(2 * i, 2 * j).cwiseAbs().maxCoeff() > 1e-12)
        throw DomainError("state", "only product states can be mapped to Fock space");
  FockDensityMatrix out{dims, Eigen::MatrixXcd::Ones(1, 1)};
  for (int m = 0; m < g.modes(); ++m) {
    double tail = 0;
    const Eigen::MatrixXcd r = fock::single_mode_rho(g.mode_mean(m), g.mode_cov(m), dims[m], &tail);
    if (tail >= tail_tol) {
      std::ostringstream os;
      os << "population " << tail << " in the top two levels exceeds " << tail_tol;
      throw TruncationError("dims[" + std::to_string(m) + "]", os.str());
    }
    out.rho = fock::kron(out.rho, r);
  }
  return out;
}

/// Mean and symmetrised covariance from normal-ordered ladder moments.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> covariance_of(const FockDensityMatrix& s,
                                                                 const fock::Ladder& ops) {
  const int n = 2 * s.modes();
  const Eigen::MatrixXcd T = fock::Ladder::to_ladder(s.modes());
  Eigen::VectorXcd b1(n);
  for (int k = 0; k < n; ++k) b1(k) = fock::expectation(ops.b(k), s.rho);
  Eigen::MatrixXcd E(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      E(k, l) = fock::expectation(ops.normal_product(k, l), s.rho);
      if (k / 2 == l / 2 && k != l) E(k, l) += 0.5;
    }
  const Eigen::VectorXd mu = (T * b1).real();
  Eigen::MatrixXd cov = (T * E * T.transpose()).real() - mu * mu.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {mu, cov};
}

inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> covariance_of(const FockDensityMatrix& s) {
  return covariance_of(s, fock::Ladder(s.dims));
}

inline FockDensityMatrix reduce(const FockDensityMatrix& s, int mode) {
  detail::require(mode >= 0 && mode < s.modes(), "mode", "index out of range");
  const fock::Ladder idx(s.dims);
  const int d = s.dims[mode];
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(d, d);
  const int n = idx.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool same = true;
      for (int m = 0; m < s.modes() && same; ++m)
        if (m != mode && idx.level(i, m) != idx.level(j, m)) same = false;
      if (same) r(idx.level(i, mode), idx.level(j, mode)) += s.rho(i, j);
    }
  return {{d}, r};
}

inline double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.
inline double fidelity_fock(const FockDensityMatrix& s1, const FockDensityMatrix& s2, double psd_tol = 1e-8) {
  detail::require(s1.dims == s2.dims, "dims", "states live on different truncations");
  auto hermitian = [](const Eigen::MatrixXcd& m) -> Eigen::MatrixXcd { return 0.5 * (m + m.adjoint()); };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(hermitian(s1.rho));
  if (e1.eigenvalues().minCoeff() < -psd_tol || min_eigenvalue(s2.rho) < -psd_tol)
    throw DomainError("rho", "density matrix is not positive semidefinite");
  const Eigen::VectorXd sq = e1.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd r1 = e1.eigenvectors() * sq.cast<cplx>().asDiagonal() * e1.eigenvectors().adjoint();
  const Eigen::MatrixXcd m = hermitian(r1 * s2.rho * r1);
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues().cwiseMax(0.0);
  const double f = ev.cwiseSqrt().sum();
  return std::clamp(f * f, 0.0, 1.0);
}

/**
 * Wigner function of one mode on a phase-space grid, normalised so that
 * integral W dx dp = 1. Uses the Laguerre expansion of W for |m><n|.
 */
inline WignerGrid wigner_fock(const FockDensityMatrix& s, int mode, const PhaseGrid& g) {
  const Eigen::MatrixXcd r = (s.modes() == 1) ? s.rho : reduce(s, mode).rho;
  const int d = static_cast<int>(r.rows());
  WignerGrid out{g, Eigen::MatrixXd::Zero(g.nx, g.np)};
  for (int ix = 0; ix < g.nx; ++ix)
    for (int ip = 0; ip < g.np; ++ip) {
      const cplx alpha = cplx(g.x(ix), g.p(ip)) / std::sqrt(2.0);
      const double x = 4.0 * std::norm(alpha);
      const double env = std::exp(-0.5 * x);
      cplx w = 0;
      for (int n = 0; n < d; ++n)
        for (int m = n; m < d; ++m) {
          if (r(m, n) == cplx(0.0) && r(n, m) == cplx(0.0)) continue;
          const double pref = ((n % 2) ? -1.0 : 1.0) *
                              std::sqrt(boost::math::factorial<double>(n) / boost::math::factorial<double>(m));
          const cplx term =
              pref * std::pow(2.0 * alpha, m - n) * boost::math::laguerre(n, m - n, x) * env;
          // <m|W|n> pairs with rho(n, m)
          w += r(n, m) * term;
          if (m != n) w += r(m, n) * std::conj(term);
        }
      out.values(ix, ip) = w.real() / constants::pi;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Master-equation integration

struct FockEvolveOptions {
  double dt = 2e-3;
  double tail_tol = fock_tail_tolerance;
  bool strict_truncation = false;  // throw TruncationError instead of flagging
  bool eigen_diagnostics = true;
};

struct FockSample {
  double t = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double trace_error = 0;      // |Tr rho - 1| before renormalisation
  double hermiticity = 0;      // max |rho - rho^dag| before symmetrisation
  double min_eigenvalue = 0;
  std::vector<double> tail;
};

struct FockTrajectory {
  std::vector<FockSample> samples;
  FockDensityMatrix final_state;
  double dt = 0;
  double max_renorm_rate = 0;  // max |Tr rho - 1| per unit time before renormalisation
  bool truncation_valid = true;
};

class Liouvillian {
 public:
  Liouvillian(const QuadraticModel& model, const std::vector<int>& dims) : ops_(dims) {
    detail::require(static_cast<int>(dims.size()) == model.modes(), "dims", "one truncation per mode is required");
    const int n = 2 * model.modes();
    const Eigen::MatrixXcd T = fock::Ladder::to_ladder(model.modes());
    // sum_k L_k rho L_k^dag = sum_ij M_ij b_i rho b_j^dag; diagonalising M
    // gives at most 2n channels with the same dissipator.
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t k = 0; k < model.jumps.size(); ++k) {
      const auto& j = model.jumps[k];
      if (!(j.rate >= 0.0)) throw DomainError("jumps[" + std::to_string(k) + "].rate", "rates must be non-negative");
      const Eigen::VectorXcd w = T.transpose() * j.coeff;
      M += j.rate * w * w.adjoint();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()));
    const double scale = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
    SparseC sum(ops_.dim(), ops_.dim());
    for (int e = 0; e < n; ++e) {
      const double lam = es.eigenvalues()(e);
      if (lam <= 1e-14 * scale) continue;
      SparseC L(ops_.dim(), ops_.dim());
      for (int i = 0; i < n; ++i)
        if (std::abs(es.eigenvectors()(i, e)) > 0) L += (std::sqrt(lam) * es.eigenvectors()(i, e)) * ops_.b(i);
      L.prune(cplx(0.0));
      sum += SparseC(L.adjoint() * L);
      jumps_.push_back(std::move(L));
    }
    K_ = cplx(0.0, -1.0) * fock::hamiltonian(ops_, model.hamiltonian) - 0.5 * sum;
    K_.prune(cplx(0.0));
  }

  const fock::Ladder& ladder() const { return ops_; }

  /// d rho/dt for Hermitian rho.
  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    Eigen::MatrixXcd Kr = K_ * rho;
    out = Kr + Kr.adjoint();
    for (const auto& L : jumps_) {
      Kr = L * rho;
      out.noalias() += L * Kr.adjoint();
    }
  }

 private:
  fock::Ladder ops_;
  SparseC K_;
  std::vector<SparseC> jumps_;
};

inline FockTrajectory evolve_rho(const QuadraticModel& model, const FockDensityMatrix& init, double t_final,
                                 int samples, const FockEvolveOptions& opt = {}) {
  detail::require_positive(t_final, "t_final");
  detail::require_positive(opt.dt, "dt");
  detail::require(samples >= 2, "samples", "need at least two samples");
  const Liouvillian L(model, init.dims);
  const auto& ops = L.ladder();
  const int n = ops.dim();
  detail::require(init.rho.rows() == n && init.rho.cols() == n, "rho", "size does not match dims");

  const double interval = t_final / (samples - 1);
  const auto steps = std::max(1LL, static_cast<long long>(std::ceil(interval / opt.dt - 1e-9)));
  const double h = interval / static_cast<double>(steps);

  FockTrajectory tr;
  tr.dt = h;
  FockDensityMatrix cur = init;
  double trace_err_interval = 0;
  double herm_interval = 0;

  auto record = [&](double t) {
    FockSample s;
    s.t = t;
    std::tie(s.mean, s.cov) = covariance_of(cur, ops);
    s.trace_error = trace_err_interval;
    s.hermiticity = herm_interval;
    s.min_eigenvalue = opt.eigen_diagnostics ? min_eigenvalue(cur.rho) : 0.0;
    s.tail = tail_populations(cur);
    for (std::size_t m = 0; m < s.tail.size(); ++m)
      if (s.tail[m] >= opt.tail_tol) {
        tr.truncation_valid = false;
        if (opt.strict_truncation) {
          std::ostringstream os;
          os << "population " << s.tail[m] << " in the top two levels exceeds " << opt.tail_tol << " at t = " << t;
          throw TruncationError("dims[" + std::to_string(m) + "]", os.str());
        }
      }
    tr.samples.push_back(std::move(s));
  };

  record(0.0);
  Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
  for (int s = 1; s < samples; ++s) {
    trace_err_interval = 0;
    herm_interval = 0;
    for (long long i = 0; i < steps; ++i) {
      L.apply(cur.rho, k1);
      tmp = cur.rho + 0.5 * h * k1;
      L.apply(tmp, k2);
      tmp = cur.rho + 0.5 * h * k2;
      L.apply(tmp, k3);
      tmp = cur.rho + h * k3;
      L.apply(tmp, k4);
      cur.rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double tr_now = cur.rho.trace().real();
      if (!std::isfinite(tr_now)) throw InstabilityError("density matrix became non-finite");
      const double err = std::abs(tr_now - 1.0);
      trace_err_interval = std::max(trace_err_interval, err);
      tr.max_renorm_rate = std::max(tr.max_renorm_rate, err / h);
      cur.rho /= tr_now;
      herm_interval = std::max(herm_interval, (cur.rho - cur.rho.adjoint()).cwiseAbs().maxCoeff());
      cur.rho = 0.5 * (cur.rho + cur.rho.adjoint()).eval();
    }
    record(interval * s);
  }
  tr.final_state = std::move(cur);
  return tr;
}

}  // namespace qspring
