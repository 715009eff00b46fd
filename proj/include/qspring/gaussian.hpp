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
 * @file gaussian.hpp
 * @brief First and second moments under a QuadraticModel.
 *
 * sigma_ij = 1/2 <{r_i - <r_i>, r_j - <r_j>}>, so vacuum is I/2 and the
 * uncertainty principle reads sigma + (i/2) W >= 0.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qspring/constants.hpp"
#include "qspring/error.hpp"
#include "qspring/model.hpp"

namespace qspring {

struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::vector<std::string> mode_labels;

  int modes() const { return static_cast<int>(mode_labels.size()); }

  Eigen::Matrix2d mode_cov(int mode) const { return cov.block<2, 2>(2 * mode, 2 * mode); }
  Eigen::Vector2d mode_mean(int mode) const { return mean.segment<2>(2 * mode); }
};

namespace state {

inline GaussianState single(Eigen::Matrix2d cov, std::string label) {
  return {Eigen::Vector2d::Zero(), std::move(cov), {std::move(label)}};
}

inline GaussianState vacuum(std::string label = "mode") {
  return single(0.5 * Eigen::Matrix2d::Identity(), std::move(label));
}

inline GaussianState thermal(double n_bar, std::string label = "mode") {
  detail::require(n_bar >= 0.0, "n_bar", "must be non-negative");
  return single((n_bar + 0.5) * Eigen::Matrix2d::Identity(), std::move(label));
}

/// Passive phase-space rotation; the free evolution exp(-i angle a^dag a).
inline Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d R;
  R << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
  return R;
}

/// Squeezed vacuum: Var = 1/2 * 10^(-dB/10) along the direction at `angle`
/// from the X axis (angle 0 squeezes X).
inline GaussianState squeezed(double db, double angle = 0.0, std::string label = "mode") {
  detail::require(db >= 0.0, "squeeze_db", "must be non-negative");
  const double s = std::pow(10.0, -db / 10.0);
  Eigen::Matrix2d d = Eigen::Vector2d(0.5 * s, 0.5 / s).asDiagonal();
  Eigen::Matrix2d U;
  U << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return single(U * d * U.transpose(), std::move(label));
}

inline GaussianState product(const std::vector<GaussianState>& parts) {
  int n = 0;
  for (const auto& p : parts) n += p.modes();
  GaussianState out{Eigen::VectorXd::Zero(2 * n), Eigen::MatrixXd::Zero(2 * n, 2 * n), {}};
  int off = 0;
  for (const auto& p : parts) {
    const int d = 2 * p.modes();
    out.mean.segment(off, d) = p.mean;
    out.cov.block(off, off, d, d) = p.cov;
    out.mode_labels.insert(out.mode_labels.end(), p.mode_labels.begin(), p.mode_labels.end());
    off += d;
  }
  return out;
}

}  // namespace state

/// Smallest eigenvalue of sigma + (i/2) W; negative means unphysical.
inline double uncertainty_min_eigenvalue(const Eigen::MatrixXd& cov) {
  const int n = static_cast<int>(cov.rows() / 2);
  const Eigen::MatrixXcd M = cov.cast<cplx>() + cplx(0.0, 0.5) * symplectic_form(n).cast<cplx>();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(M, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

inline bool is_physical(const GaussianState& s, double tol = 1e-9) {
  return (s.cov - s.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + s.cov.cwiseAbs().maxCoeff()) &&
         uncertainty_min_eigenvalue(s.cov) >= -tol;
}

inline GaussianState reduce(const GaussianState& s, const std::vector<int>& modes) {
  GaussianState out;
  const int n = static_cast<int>(modes.size());
  out.mean.resize(2 * n);
  out.cov.resize(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    detail::require(modes[i] >= 0 && modes[i] < s.modes(), "mode", "index out of range");
    out.mode_labels.push_back(s.mode_labels[modes[i]]);
    out.mean.segment<2>(2 * i) = s.mean.segment<2>(2 * modes[i]);
    for (int j = 0; j < n; ++j) out.cov.block<2, 2>(2 * i, 2 * j) = s.cov.block<2, 2>(2 * modes[i], 2 * modes[j]);
  }
  return out;
}

inline GaussianState rotate(const GaussianState& s, int mode, double angle) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(s.cov.rows(), s.cov.cols());
  S.block<2, 2>(2 * mode, 2 * mode) = state::rotation(angle);
  return {S * s.mean, S * s.cov * S.transpose(), s.mode_labels};
}

/// Squeezing of the best quadrature in dB below vacuum (negative: anti-squeezed).
inline double squeezing_db(const GaussianState& s, int mode) {
  const Eigen::Matrix2d c = s.mode_cov(mode);
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(c, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return -10.0 * std::log10(lmin / 0.5);
}

/// Squeezing of the fixed quadrature X cos(angle) + P sin(angle).
inline double quadrature_squeezing_db(const GaussianState& s, int mode, double angle = 0.0) {
  const Eigen::Vector2d u(std::cos(angle), std::sin(angle));
  return -10.0 * std::log10(u.dot(s.mode_cov(mode) * u) / 0.5);
}

// ---------------------------------------------------------------------------
// Dynamics

struct EvolveOptions {
  double initial_dt = 0.0;   // 0: min(2 pi / w_max / 50, t_final / 1e4)
  double tolerance = 1e-8;   // on max |d sigma| between successive halvings, relative to max(1, |sigma|)
  int max_halvings = 10;
  double blowup = 1e6;
  bool fixed_step = false;   // run once at initial_dt (rounded to the sample grid), no refinement
};

struct Trajectory {
  std::vector<double> times;
  std::vector<GaussianState> states;
  double dt = 0;                 // accepted step
  double convergence_error = 0;  // final-sigma change at the last halving
  double min_uncertainty_eigenvalue = INFINITY;
};

namespace detail {

inline double spectral_radius(const Eigen::MatrixXd& A) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().cwiseAbs().maxCoeff();
}

/// Fixed-step RK4 from t = 0, recording `samples` uniformly spaced states.
inline Trajectory rk4_run(const QuadraticModel& model, const GaussianState& init, double t_final,
                          int samples, long long steps_per_sample, double blowup) {
  const Eigen::MatrixXd& A = model.drift;
  const Eigen::MatrixXd& D = model.diffusion;
  const double h = t_final / (static_cast<double>(samples - 1) * static_cast<double>(steps_per_sample));
  const auto n = A.rows();

  Eigen::VectorXd mu = init.mean, m1(n), m2(n), m3(n), m4(n);
  Eigen::MatrixXd S = init.cov, k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n), AS(n, n);
  auto F = [&](const Eigen::MatrixXd& X, Eigen::MatrixXd& out) {
    AS.noalias() = A * X;
    out = AS + AS.transpose() + D;
  };

  Trajectory tr;
  tr.dt = h;
  tr.times.reserve(samples);
  tr.states.reserve(samples);
  tr.times.push_back(0.0);
  tr.states.push_back(init);
  for (int s = 1; s < samples; ++s) {
    for (long long i = 0; i < steps_per_sample; ++i) {
      m1.noalias() = A * mu;
      m2.noalias() = A * (mu + 0.5 * h * m1);
      m3.noalias() = A * (mu + 0.5 * h * m2);
      m4.noalias() = A * (mu + h * m3);
      mu += h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);

      F(S, k1);
      tmp = S + 0.5 * h * k1;
      F(tmp, k2);
      tmp = S + 0.5 * h * k2;
      F(tmp, k3);
      tmp = S + h * k3;
      F(tmp, k4);
      S += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double t = t_final * s / (samples - 1);
    const double worst = S.cwiseAbs().maxCoeff();
    if (!(worst <= blowup)) {
      std::ostringstream os;
      os << "covariance exceeded " << blowup << " (max |sigma_ij| = " << worst << ") at t = " << t
         << "; max Re eig(A) = " << max_real_eigenvalue(A);
      throw InstabilityError(os.str());
    }
    tr.times.push_back(t);
    tr.states.push_back({mu, 0.5 * (S + S.transpose()), init.mode_labels});
  }
  return tr;
}

}  // namespace detail

/**
 * Integrates d<r>/dt = A <r>, d sigma/dt = A sigma + sigma A^T + D with RK4,
 * halving the step until the final covariance stops changing.
 */
inline Trajectory evolve(const QuadraticModel& model, const GaussianState& init, double t_final,
                         int samples, const EvolveOptions& opt = {}) {
  detail::require(init.cov.rows() == model.dim(), "state", "mode count does not match the model");
  detail::require_positive(t_final, "t_final");
  detail::require(samples >= 2, "samples", "need at least two samples");

  double h0 = opt.initial_dt;
  if (h0 <= 0) {
    const double w = detail::spectral_radius(model.drift);
    h0 = t_final / 1e4;
    if (w > 0) h0 = std::min(h0, constants::two_pi / w / 50.0);
  }
  const double interval = t_final / (samples - 1);
  auto steps = static_cast<long long>(std::ceil(interval / h0 - 1e-9));
  steps = std::max(steps, 1LL);

  Trajectory coarse = detail::rk4_run(model, init, t_final, samples, steps, opt.blowup);
  auto finish = [](Trajectory& t) {
    for (const auto& s : t.states)
      t.min_uncertainty_eigenvalue = std::min(t.min_uncertainty_eigenvalue, uncertainty_min_eigenvalue(s.cov));
  };
  if (opt.fixed_step) {
    detail::require(opt.initial_dt > 0, "initial_dt", "fixed_step needs an explicit step");
    finish(coarse);
    return coarse;
  }
  for (int k = 0; k < opt.max_halvings; ++k) {
    steps *= 2;
    Trajectory fine = detail::rk4_run(model, init, t_final, samples, steps, opt.blowup);
    const auto& a = coarse.states.back().cov;
    const auto& b = fine.states.back().cov;
    const double err = (a - b).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    fine.convergence_error = err;
    coarse = std::move(fine);
    if (err <= opt.tolerance * scale) {
      finish(coarse);
      return coarse;
    }
  }
  throw InstabilityError("RK4 did not converge after " + std::to_string(opt.max_halvings) +
                         " step halvings (last change " + std::to_string(coarse.convergence_error) + ")");
}

/// Solves A sigma + sigma A^T + D = 0 through the Kronecker form.
inline GaussianState steady_state(const QuadraticModel& model) {
  const Eigen::MatrixXd& A = model.drift;
  const auto n = A.rows();
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues();
  Eigen::Index worst = 0;
  ev.real().maxCoeff(&worst);
  if (!(ev(worst).real() < 0.0)) {
    std::ostringstream os;
    os << "drift is not strictly stable: eigenvalue " << ev(worst).real()
       << (ev(worst).imag() >= 0 ? " + " : " - ") << std::abs(ev(worst).imag()) << "i";
    throw InstabilityError(os.str());
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd K(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n) = (i == j ? A : Eigen::MatrixXd::Zero(n, n)) + A(i, j) * I;
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(model.diffusion.data(), n * n);
  const Eigen::VectorXd x = K.fullPivLu().solve(rhs);
  Eigen::MatrixXd S = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  S = 0.5 * (S + S.transpose()).eval();
  return {Eigen::VectorXd::Zero(n), S, model.mode_labels};
}

inline double lyapunov_residual(const QuadraticModel& model, const Eigen::MatrixXd& S) {
  return (model.drift * S + S * model.drift.transpose() + model.diffusion).norm();
}

// ---------------------------------------------------------------------------
// Phase-space observables

struct PhaseGrid {
  double x_min = -5, x_max = 5;
  int nx = 101;
  double p_min = -5, p_max = 5;
  int np = 101;

  double x(int i) const { return nx > 1 ? x_min + (x_max - x_min) * i / (nx - 1) : x_min; }
  double p(int j) const { return np > 1 ? p_min + (p_max - p_min) * j / (np - 1) : p_min; }
};

struct WignerGrid {
  PhaseGrid grid;
  Eigen::MatrixXd values;  // values(i, j) = W(x_i, p_j)

  /// Trapezoidal integral over the grid.
  double integral() const {
    const double dx = (grid.x_max - grid.x_min) / (grid.nx - 1);
    const double dp = (grid.p_max - grid.p_min) / (grid.np - 1);
    double s = 0;
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.np; ++j) {
        const double wx = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
        const double wp = (j == 0 || j == grid.np - 1) ? 0.5 : 1.0;
        s += wx * wp * values(i, j);
      }
    return s * dx * dp;
  }
};

inline double wigner_at(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov, double x, double p) {
  const double det = cov.determinant();
  if (!(det > 1e-30)) throw DomainError("cov", "singular covariance");
  const Eigen::Vector2d d(x - mean(0), p - mean(1));
  return std::exp(-0.5 * d.dot(cov.inverse() * d)) / (constants::two_pi * std::sqrt(det));
}

inline WignerGrid wigner(const GaussianState& s, int mode, const PhaseGrid& g) {
  detail::require(mode >= 0 && mode < s.modes(), "mode", "index out of range");
  WignerGrid out{g, Eigen::MatrixXd(g.nx, g.np)};
  const Eigen::Vector2d mu = s.mode_mean(mode);
  const Eigen::Matrix2d c = s.mode_cov(mode);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j) out.values(i, j) = wigner_at(mu, c, g.x(i), g.p(j));
  return out;
}

/// Grid covering +- `sigmas` standard deviations of the mode's marginals.
inline PhaseGrid auto_grid(const GaussianState& s, int mode, double sigmas = 8.0, int points = 161) {
  const Eigen::Matrix2d c = s.mode_cov(mode);
  const Eigen::Vector2d mu = s.mode_mean(mode);
  const double hx = sigmas * std::sqrt(c(0, 0)), hp = sigmas * std::sqrt(c(1, 1));
  return {mu(0) - hx, mu(0) + hx, points, mu(1) - hp, mu(1) + hp, points};
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 of two single-mode Gaussian states.
inline double fidelity(const Eigen::Vector2d& m1, const Eigen::Matrix2d& c1, const Eigen::Vector2d& m2,
                       const Eigen::Matrix2d& c2) {
  const Eigen::Matrix2d sum = c1 + c2;
  const double delta = sum.determinant();
  const double lambda = std::max(0.0, 4.0 * (c1.determinant() - 0.25) * (c2.determinant() - 0.25));
  const Eigen::Vector2d d = m1 - m2;
  const double f = std::exp(-0.5 * d.dot(sum.inverse() * d)) / (std::sqrt(delta + lambda) - std::sqrt(lambda));
  return std::clamp(f, 0.0, 1.0);
}

inline double fidelity(const GaussianState& a, const GaussianState& b, int mode_a = 0, int mode_b = 0) {
  return fidelity(a.mode_mean(mode_a), a.mode_cov(mode_a), b.mode_mean(mode_b), b.mode_cov(mode_b));
}

}  // namespace qspring
