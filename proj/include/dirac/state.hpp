#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dirac/linalg.hpp"
#include "dirac/model.hpp"
#include "dirac/rng.hpp"

// Pure 4-component states of the spin-pseudospin pair and their Bloch
// vectors, plus the two random ensembles (Haar-uniform and separable).

namespace dirac {

// Normalized amplitudes (a, b, c, d) in the {A-up, B-up, A-down, B-down}
// basis.
struct SpinorState {
  Vec<4> amp;

  static SpinorState from_amplitudes(const Vec<4>& v) { return SpinorState{normalized(v)}; }
};

enum class NamedState { psi_x_up, psi_y_up, bell_1, bell_2 };

inline const char* named_state_name(NamedState w) {
  switch (w) {
    case NamedState::psi_x_up: return "psi_x_up";
    case NamedState::psi_y_up: return "psi_y_up";
    case NamedState::bell_1: return "bell_1";
    case NamedState::bell_2: return "bell_2";
  }
  return "?";
}

inline SpinorState named_state(NamedState which) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx I(0.0, 1.0);
  switch (which) {
    case NamedState::psi_x_up: return {{r, r, 0.0, 0.0}};        // pseudospin +x, spin +z
    case NamedState::psi_y_up: return {{r, I * r, 0.0, 0.0}};    // pseudospin +y, spin +z
    case NamedState::bell_1: return {{r, 0.0, 0.0, r}};          // (|A up> + |B down>)/sqrt2
    case NamedState::bell_2: return {{0.0, r, r, 0.0}};          // (|B up> + |A down>)/sqrt2
  }
  throw std::invalid_argument("unknown named state");
}

inline SpinorState named_state(const std::string& name) {
  if (name == "psi_x_up") return named_state(NamedState::psi_x_up);
  if (name == "psi_y_up") return named_state(NamedState::psi_y_up);
  if (name == "bell_1") return named_state(NamedState::bell_1);
  if (name == "bell_2") return named_state(NamedState::bell_2);
  throw std::invalid_argument("unknown state name: " + name +
                              " (expected psi_x_up, psi_y_up, bell_1 or bell_2)");
}

// Polar/azimuthal Bloch angles for the pseudospin and spin factors.
struct BlochAngles {
  double theta_p, phi_p;  // pseudospin
  double theta_s, phi_s;  // spin
};

inline Vec<2> bloch_spinor(double theta, double phi) {
  return {std::cos(0.5 * theta), std::exp(cplx(0.0, phi)) * std::sin(0.5 * theta)};
}

// Tensor product of two Bloch spinors; spin is the slow index.
inline SpinorState product_state(const BlochAngles& a) {
  return {kron(bloch_spinor(a.theta_s, a.phi_s), bloch_spinor(a.theta_p, a.phi_p))};
}

// Haar-uniform pure state: four i.i.d. standard complex Gaussians,
// normalized.
inline SpinorState random_haar_state(RandomStream& rng) {
  for (;;) {
    Vec<4> v;
    for (auto& z : v) {
      const double re = rng.next_normal();
      const double im = rng.next_normal();
      z = cplx(re, im);
    }
    if (norm(v) > 0.0) return {normalized(v)};
  }
}

// Separable state with both factors uniform on their Bloch spheres
// (cos(theta) uniform in [-1, 1], phi uniform in [0, 2pi)).
inline SpinorState random_separable_state(RandomStream& rng) {
  const auto draw = [&](double& theta, double& phi) {
    theta = std::acos(2.0 * rng.next_double() - 1.0);
    phi = 2.0 * std::numbers::pi * rng.next_double();
  };
  BlochAngles a{};
  draw(a.theta_p, a.phi_p);
  draw(a.theta_s, a.phi_s);
  return product_state(a);
}

struct BlochVectors {
  std::array<double, 3> spin;
  std::array<double, 3> pseudospin;

  double spin_norm() const {
    return std::sqrt(spin[0] * spin[0] + spin[1] * spin[1] + spin[2] * spin[2]);
  }
  double pseudospin_norm() const {
    return std::sqrt(pseudospin[0] * pseudospin[0] + pseudospin[1] * pseudospin[1] +
                     pseudospin[2] * pseudospin[2]);
  }
};

// <s_i> = <psi| s_i (x) sigma_0 |psi> and <sigma_i> = <psi| sigma_i (x) s_0 |psi>.
inline BlochVectors bloch_vectors(const SpinorState& st) {
  BlochVectors b{};
  for (int i = 1; i <= 3; ++i) {
    const Mat<4> spin_op = pseudospin_spin_op(pauli(0), pauli(i));
    const Mat<4> pseudo_op = pseudospin_spin_op(pauli(i), pauli(0));
    b.spin[static_cast<std::size_t>(i - 1)] = dot(st.amp, spin_op * st.amp).real();
    b.pseudospin[static_cast<std::size_t>(i - 1)] = dot(st.amp, pseudo_op * st.amp).real();
  }
  return b;
}

}  // namespace dirac
