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
 * @file model.hpp
 * @brief Quadratic open-system models and their moment equations.
 *
 * Conventions, fixed for the whole library:
 *  - quadratures r = (X_1, P_1, ..., X_n, P_n), X = (a + a^dag)/sqrt2,
 *    P = -i(a - a^dag)/sqrt2, [X, P] = i, vacuum variance 1/2;
 *  - H = 1/2 r^T H r (constant offsets dropped);
 *  - a Jump {c, rate} is the Lindblad operator L = sqrt(rate) c^T r with the
 *    standard dissipator L rho L^dag - 1/2 {L^dag L, rho}.
 *
 * Rates quoted with the D[a] = 2 a rho a^dag - ... normalisation are doubled
 * when converted to Jump rates. That bookkeeping, and every sqrt2 between the
 * (a + a^dag) operators and X, lives only in the two builders below.
 */

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qspring/error.hpp"

namespace qspring {

using cplx = std::complex<double>;

struct Jump {
  Eigen::VectorXcd coeff;
  double rate = 0;
};

struct QuadraticModel {
  std::vector<std::string> mode_labels;
  Eigen::MatrixXd hamiltonian;
  std::vector<Jump> jumps;
  Eigen::MatrixXd drift;
  Eigen::MatrixXd diffusion;

  int modes() const { return static_cast<int>(mode_labels.size()); }
  int dim() const { return 2 * modes(); }

  int mode_index(const std::string& label) const {
    for (int i = 0; i < modes(); ++i)
      if (mode_labels[i] == label) return i;
    throw DomainError("mode", "unknown mode label '" + label + "'");
  }
};

namespace labels {
inline const std::string atom = "atom";
inline const std::string membrane = "membrane";
inline const std::string cav1 = "cav1";
inline const std::string cav2 = "cav2";
}  // namespace labels

inline Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int i = 0; i < modes; ++i) {
    W(2 * i, 2 * i + 1) = 1.0;
    W(2 * i + 1, 2 * i) = -1.0;
  }
  return W;
}

namespace quad {

inline Eigen::VectorXcd annihilation(int modes, int mode) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * modes);
  c(2 * mode) = 1.0 / std::sqrt(2.0);
  c(2 * mode + 1) = cplx(0.0, 1.0 / std::sqrt(2.0));
  return c;
}

inline Eigen::VectorXcd creation(int modes, int mode) { return annihilation(modes, mode).conjugate(); }

inline Eigen::VectorXcd position(int modes, int mode) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * modes);
  c(2 * mode) = 1.0;
  return c;
}

}  // namespace quad

/// A = W (H + Im(C^dag C)), D = W Re(C^dag C) W^T with C_k = sqrt(rate_k) c_k^T.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> drift_diffusion(const Eigen::MatrixXd& H,
                                                                   const std::vector<Jump>& jumps) {
  detail::require(H.rows() == H.cols() && H.rows() % 2 == 0, "hamiltonian",
                  "must be a square 2n x 2n matrix");
  detail::require((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + H.cwiseAbs().maxCoeff()),
                  "hamiltonian", "must be symmetric");
  const auto n = H.rows();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const auto& j = jumps[k];
    if (!(j.rate >= 0.0))
      throw DomainError("jumps[" + std::to_string(k) + "].rate", "rates must be non-negative");
    detail::require(j.coeff.size() == n, "jumps", "coefficient vector has wrong length");
    M += j.rate * j.coeff.conjugate() * j.coeff.transpose();
  }
  const Eigen::MatrixXd W = symplectic_form(static_cast<int>(n / 2));
  Eigen::MatrixXd A = W * (H + M.imag());
  Eigen::MatrixXd D = W * M.real() * W.transpose();
  D = 0.5 * (D + D.transpose()).eval();
  return {std::move(A), std::move(D)};
}

inline QuadraticModel make_model(std::vector<std::string> mode_labels, Eigen::MatrixXd H,
                                 std::vector<Jump> jumps) {
  detail::require(H.rows() == 2 * static_cast<Eigen::Index>(mode_labels.size()), "hamiltonian",
                  "size does not match the number of modes");
  QuadraticModel m;
  m.mode_labels = std::move(mode_labels);
  m.hamiltonian = 0.5 * (H + H.transpose());
  m.jumps = std::move(jumps);
  std::tie(m.drift, m.diffusion) = drift_diffusion(m.hamiltonian, m.jumps);
  return m;
}

/// Divide every frequency and rate by `reference`, so time is measured in 1/reference.
inline QuadraticModel make_dimensionless(const QuadraticModel& model, double reference) {
  detail::require_positive(reference, "reference");
  auto jumps = model.jumps;
  for (auto& j : jumps) j.rate /= reference;
  return make_model(model.mode_labels, model.hamiltonian / reference, std::move(jumps));
}

inline double max_real_eigenvalue(const Eigen::MatrixXd& A) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().real().maxCoeff();
}

// ---------------------------------------------------------------------------

struct EffectiveRates {
  double G = 0;
  double omega_at = 0;
  double omega_m = 0;
  double gamma_c_plus = 0;
  double gamma_c_minus = 0;
  double phi = 0;
  double gamma_at = 0;
  double gamma_m = 0;
  double n_bar = 0;
};

/**
 * Two modes [atom, membrane]:
 *   H = w_at a^dag a + w_m b^dag b - G (a + a^dag)(b + b^dag),
 * with the four cavity channels built from J_pm = cos(phi) b +- sin(phi) a,
 * momentum diffusion on the atom and the thermal membrane bath.
 */
inline QuadraticModel build_effective_model(const EffectiveRates& r) {
  for (auto [v, n] : {std::pair{r.gamma_c_plus, "gamma_c_plus"}, {r.gamma_c_minus, "gamma_c_minus"},
                      {r.gamma_at, "gamma_at"}, {r.gamma_m, "gamma_m"}, {r.n_bar, "n_bar"}})
    detail::require(v >= 0.0, n, "must be non-negative");
  constexpr int n = 2, at = 0, mem = 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4, 4);
  H(0, 0) = H(1, 1) = r.omega_at;
  H(2, 2) = H(3, 3) = r.omega_m;
  // (a + a^dag)(b + b^dag) = 2 X_at X_m
  H(0, 2) = H(2, 0) = -2.0 * r.G;

  const Eigen::VectorXcd a = quad::annihilation(n, at), b = quad::annihilation(n, mem);
  const Eigen::VectorXcd Jp = std::cos(r.phi) * b + std::sin(r.phi) * a;
  const Eigen::VectorXcd Jm = std::cos(r.phi) * b - std::sin(r.phi) * a;

  std::vector<Jump> jumps;
  jumps.push_back({Jp, r.gamma_c_plus});
  jumps.push_back({Jp.conjugate(), r.gamma_c_minus});
  jumps.push_back({Jm, r.gamma_c_minus});
  jumps.push_back({Jm.conjugate(), r.gamma_c_plus});
  // (Gamma_at/2) D[a + a^dag] = Gamma_at D_std[sqrt2 X] = 2 Gamma_at D_std[X]
  jumps.push_back({quad::position(n, at), 2.0 * r.gamma_at});
  jumps.push_back({b, r.gamma_m * (r.n_bar + 1.0)});
  jumps.push_back({b.conjugate(), r.gamma_m * r.n_bar});
  return make_model({labels::atom, labels::membrane}, H, std::move(jumps));
}

struct FullModelParams {
  double omega_at = 0;
  double omega_m = 0;
  double detuning = 0;  // Delta
  double kappa = 0;
  double g_atc = 0;
  double g_mc = 0;
  double gamma_at = 0;
  double gamma_m = 0;
  double n_bar = 0;
};

/**
 * Four modes [atom, membrane, cav1, cav2] in the two laser frames:
 *   H = w_at a^dag a + w_m b^dag b - Delta (c1^dag c1 - c2^dag c2)
 *     + g_atc [(c1 + c1^dag) - (c2 + c2^dag)](a + a^dag)
 *     + g_mc  [(c1 + c1^dag) + (c2 + c2^dag)](b + b^dag),
 * cavity amplitude decay kappa D[c_i].
 *
 * With these signs the eliminated dynamics is the effective model with
 * coupling -G (see mediated_coupling_sign).
 */
inline QuadraticModel build_full_model(const FullModelParams& p) {
  detail::require_positive(p.kappa, "kappa");
  for (auto [v, n] : {std::pair{p.gamma_at, "gamma_at"}, {p.gamma_m, "gamma_m"}, {p.n_bar, "n_bar"}})
    detail::require(v >= 0.0, n, "must be non-negative");
  constexpr int n = 4, at = 0, mem = 1, c1 = 2, c2 = 3;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(8, 8);
  auto diag = [&](int mode, double w) { H(2 * mode, 2 * mode) = H(2 * mode + 1, 2 * mode + 1) = w; };
  diag(at, p.omega_at);
  diag(mem, p.omega_m);
  diag(c1, -p.detuning);
  diag(c2, p.detuning);
  // g (c + c^dag)(a + a^dag) = 2 g X_c X_a
  auto xx = [&](int i, int j, double g) { H(2 * i, 2 * j) = H(2 * j, 2 * i) = 2.0 * g; };
  xx(c1, at, p.g_atc);
  xx(c2, at, -p.g_atc);
  xx(c1, mem, p.g_mc);
  xx(c2, mem, p.g_mc);

  const Eigen::VectorXcd b = quad::annihilation(n, mem);
  std::vector<Jump> jumps;
  // kappa D[c] = 2 kappa D_std[c]
  jumps.push_back({quad::annihilation(n, c1), 2.0 * p.kappa});
  jumps.push_back({quad::annihilation(n, c2), 2.0 * p.kappa});
  jumps.push_back({quad::position(n, at), 2.0 * p.gamma_at});
  jumps.push_back({b, p.gamma_m * (p.n_bar + 1.0)});
  jumps.push_back({b.conjugate(), p.gamma_m * p.n_bar});
  return make_model({labels::atom, labels::membrane, labels::cav1, labels::cav2}, H, std::move(jumps));
}

/// Sign relating the full model's mediated coupling to the G of the effective model.
inline constexpr double mediated_coupling_sign = -1.0;

}  // namespace qspring
