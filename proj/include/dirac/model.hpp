#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dirac/linalg.hpp"
#include "dirac/units.hpp"

// Single-k-point continuum model of graphene with Rashba spin-orbit coupling.
//
// Basis ordering is {A-up, B-up, A-down, B-down}: the amplitude index is
// 2*spin + sublattice, so spin is the slow index.  An abstract operator
// written "pseudospin_op (x) spin_op" therefore becomes kron(spin_op,
// pseudospin_op) on amplitude vectors.  This file is the single place that
// fixes the convention; everything else goes through it.

namespace dirac {

inline const Mat<2>& pauli(int i) {
  static const std::array<Mat<2>, 4> p = [] {
    std::array<Mat<2>, 4> m{};
    m[0](0, 0) = 1.0; m[0](1, 1) = 1.0;                      // identity
    m[1](0, 1) = 1.0; m[1](1, 0) = 1.0;                      // x
    m[2](0, 1) = cplx(0.0, -1.0); m[2](1, 0) = cplx(0.0, 1.0);  // y
    m[3](0, 0) = 1.0; m[3](1, 1) = -1.0;                     // z
    return m;
  }();
  if (i < 0 || i > 3) throw std::invalid_argument("pauli index must be 0..3");
  return p[static_cast<std::size_t>(i)];
}

// pseudospin_op (x) spin_op, realized in the {A-up, B-up, A-down, B-down}
// ordering (spin slow).
inline Mat<4> pseudospin_spin_op(const Mat<2>& pseudospin_op, const Mat<2>& spin_op) {
  return kron(spin_op, pseudospin_op);
}

struct ModelParams {
  double epsilon;   // kinetic energy hbar*v_F*|k|, ueV, >= 0
  double theta;     // momentum direction atan2(k_y, k_x), radians
  double lambda_R;  // Rashba coupling strength, ueV, > 0
  int tau = +1;     // valley index, +1 or -1

  void validate() const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0 ueV");
    if (!(lambda_R > 0.0)) throw std::invalid_argument("lambda_R must be > 0 ueV");
    if (tau != 1 && tau != -1) throw std::invalid_argument("tau must be +1 or -1");
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  }

  // Band energies epsilon_pm = sqrt(eps^2 + lam^2) +/- lam.
  double eps_plus() const { return std::hypot(epsilon, lambda_R) + lambda_R; }
  double eps_minus() const { return std::hypot(epsilon, lambda_R) - lambda_R; }
};

// Convert a Cartesian momentum-space point to model parameters.
// v_F in m/s, k in 1/m; energy comes out in ueV.
inline ModelParams kpoint_from_cartesian(double v_F, double k_x, double k_y,
                                         double lambda_R, int tau = +1) {
  if (!(v_F > 0.0)) throw std::invalid_argument("v_F must be > 0 m/s");
  const double eps = units::hbar_ueV_s * v_F * std::hypot(k_x, k_y);
  double th = std::atan2(k_y, k_x);
  if (th >= std::numbers::pi) th -= 2.0 * std::numbers::pi;
  ModelParams p{eps, th, lambda_R, tau};
  p.validate();
  return p;
}

// H = eps (tau cos(theta) sigma_x + sin(theta) sigma_y) (x) s_0
//   + lambda_R (tau sigma_x (x) s_y - sigma_y (x) s_x), all in ueV.
inline Mat<4> build_hamiltonian(const ModelParams& p) {
  p.validate();
  const double t = static_cast<double>(p.tau);
  Mat<2> kin;  // in pseudospin space
  {
    const Mat<2>& sx = pauli(1);
    const Mat<2>& sy = pauli(2);
    kin = cplx(p.epsilon * t * std::cos(p.theta)) * sx + cplx(p.epsilon * std::sin(p.theta)) * sy;
  }
  Mat<4> h = pseudospin_spin_op(kin, pauli(0));
  h = h + cplx(p.lambda_R * t) * pseudospin_spin_op(pauli(1), pauli(2));
  h = h - cplx(p.lambda_R) * pseudospin_spin_op(pauli(2), pauli(1));
  return h;
}

enum class Band { h_plus, h_minus, e_minus, e_plus };

inline const char* band_name(Band b) {
  switch (b) {
    case Band::h_plus: return "h_plus";
    case Band::h_minus: return "h_minus";
    case Band::e_minus: return "e_minus";
    case Band::e_plus: return "e_plus";
  }
  return "?";
}

struct EigenLevel {
  double energy;  // ueV
  Vec<4> state;
  Band label;
};

// Four levels sorted by energy ascending:
// {-eps_plus, -eps_minus, +eps_minus, +eps_plus}.
struct EigenSystem {
  std::array<EigenLevel, 4> levels;
};

// Closed-form eigensystem (valley tau = +1 only).  The generic expression has
// a removable singularity at epsilon = 0, where the explicit degenerate-limit
// states are returned instead.
inline EigenSystem analytic_eigensystem(const ModelParams& p) {
  p.validate();
  if (p.tau != +1)
    throw std::invalid_argument(
        "analytic_eigensystem supports valley tau=+1 only; use numeric_eigensystem for tau=-1");

  const double ep = p.eps_plus();
  const double em = p.eps_minus();
  const cplx phase_m = std::exp(cplx(0.0, -p.theta));  // e^{-i theta}
  const cplx phase_p = std::exp(cplx(0.0, +p.theta));
  const cplx I(0.0, 1.0);

  EigenSystem sys;
  if (p.epsilon < 1e-9) {
    // Degenerate point: levels are {-2lam, 0, 0, +2lam} with
    // (0, nu, i, 0)/sqrt(2) at +/-2lam and (1, 0, 0, -i nu)/sqrt(2) at 0.
    const double r = 1.0 / std::sqrt(2.0);
    sys.levels[0] = {-ep, Vec<4>{0.0, -r, I * r, 0.0}, Band::h_plus};
    sys.levels[1] = {0.0, Vec<4>{r, 0.0, 0.0, I * r}, Band::h_minus};
    sys.levels[2] = {0.0, Vec<4>{r, 0.0, 0.0, -I * r}, Band::e_minus};
    sys.levels[3] = {ep, Vec<4>{0.0, r, I * r, 0.0}, Band::e_plus};
    return sys;
  }

  const auto make = [&](double gamma, double nu, double sign) {
    // (e^{-i theta}, nu gamma, sign * i gamma, sign * nu i e^{i theta}) / sqrt(N)
    const double n = std::sqrt(2.0 * (1.0 + gamma * gamma));
    return Vec<4>{phase_m / n, cplx(nu * gamma / n), sign * I * gamma / n,
                  sign * nu * I * phase_p / n};
  };
  const double gp = ep / p.epsilon;
  const double gm = em / p.epsilon;
  sys.levels[0] = {-ep, make(gp, -1.0, +1.0), Band::h_plus};
  sys.levels[1] = {-em, make(gm, -1.0, -1.0), Band::h_minus};
  sys.levels[2] = {+em, make(gm, +1.0, -1.0), Band::e_minus};
  sys.levels[3] = {+ep, make(gp, +1.0, +1.0), Band::e_plus};
  return sys;
}

// Numeric oracle path: cyclic Jacobi diagonalization of an explicit
// Hamiltonian matrix.  Works for either valley and any angle.
inline EigenSystem numeric_eigensystem(const Mat<4>& h) {
  const EigenResult<4> r = jacobi_hermitian(h);  // throws if not Hermitian
  EigenSystem sys;
  constexpr Band order[4] = {Band::h_plus, Band::h_minus, Band::e_minus, Band::e_plus};
  for (std::size_t j = 0; j < 4; ++j) {
    Vec<4> v;
    for (std::size_t i = 0; i < 4; ++i) v[i] = r.vectors(i, j);
    sys.levels[j] = {r.values[j], v, order[j]};
  }
  return sys;
}

}  // namespace dirac
